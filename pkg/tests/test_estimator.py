import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import PENTAGON
from xicontour.estimator import ChamberClassifier, DiscriminantContour
from xicontour.parametrization import lift_reduced, parse_sign, reduce_coefficients


def test_params_round_trip():
    est = DiscriminantContour(window=6.0, sign_classes=["+--++"])
    assert est.get_params()["window"] == 6.0
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    est.set_params(max_step=0.02)
    assert est.max_step == 0.02
    assert set(ChamberClassifier().get_params()) == {"sigma", "window", "resolution", "max_step"}


def test_contour_fit_transform():
    est = DiscriminantContour().fit(np.array(PENTAGON))
    assert len(est.attained_) == 5 and len(est.contours_) == 5
    assert est.d_ == 2 and len(est.cusps_) == 2
    C = np.array([[1.0, -2.0, -3.0, 1.0, 0.5], [2.0, 1.0, 1.0, 1.0, 1.0]])
    assert np.allclose(est.transform(C), reduce_coefficients(C, est.basis_))
    with pytest.raises(ValueError):
        est.transform(np.ones((1, 4)))


def test_unfitted():
    with pytest.raises(NotFittedError):
        DiscriminantContour().transform(np.ones((1, 5)))
    with pytest.raises(NotFittedError):
        ChamberClassifier().predict(np.ones((1, 5)))


def test_classifier_predicts_chambers():
    clf = ChamberClassifier(sigma="+--++").fit(np.array(PENTAGON))
    assert list(clf.classes_) == [0, 1, 2] and clf.bounded_.sum() == 1
    sigma = parse_sign("+--++")
    for ch in clf.chambers_.chambers:
        V = clf.chambers_.sample(ch.id, 3, rng=ch.id)
        C = np.array([lift_reduced(v, clf.basis_, sigma) for v in V])
        assert list(clf.predict(C)) == [ch.id] * 3
        # global negation gives the same class
        assert list(clf.predict(-C)) == [ch.id] * 3
    assert clf.predict(np.ones((1, 5)))[0] == -1
