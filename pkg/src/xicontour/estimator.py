"""scikit-learn style wrappers.

``fit`` takes the exponent matrix ``A`` (n x t, one column per term); the
fitted objects then act on coefficient vectors, one row per exponential sum.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chambers import count_chambers
from .completion import completed_signed_contour
from .contour import Sampling, attained_sign_classes, find_cusps
from .parametrization import all_sign_classes, canonical_sign, parse_sign
from .spectrum import Spectrum, affine_dimension, analyze, basis_for, build_lifted


def _as_spectrum(A) -> Spectrum:
    return A if isinstance(A, Spectrum) else Spectrum(np.asarray(A, dtype=float))


def _sigma(value):
    if isinstance(value, str):
        return parse_sign(value)
    return canonical_sign(value)


class DiscriminantContour(BaseEstimator, TransformerMixin):
    """Reduced signed contours of a spectrum.

    Parameters
    ----------
    sign_classes : "attained", "all" or list of sign strings / tuples
    window : half-width of the clipping square
    max_step, max_turn : tracing refinement controls
    tol : relative SVD tolerance for the nullspace basis
    """

    def __init__(self, sign_classes="attained", window=8.0, max_step=0.01, max_turn=0.15, tol=1e-10):
        self.sign_classes = sign_classes
        self.window = window
        self.max_step = max_step
        self.max_turn = max_turn
        self.tol = tol

    def _sampling(self):
        return Sampling(clip_window=self.window, max_step=self.max_step, max_turn=self.max_turn)

    def fit(self, A, y=None):
        spec = _as_spectrum(A)
        self.spectrum_ = spec
        self.report_ = analyze(spec, self.tol)
        self.basis_ = basis_for(spec, self.tol).B
        self.d_ = affine_dimension(build_lifted(spec), self.tol)
        self.cusps_ = find_cusps(self.basis_)
        self.attained_ = attained_sign_classes(self.basis_)
        if self.sign_classes == "attained":
            wanted = list(self.attained_)
        elif self.sign_classes == "all":
            wanted = all_sign_classes(spec.t)
        else:
            wanted = [_sigma(s) for s in self.sign_classes]
        sampling = self._sampling()
        self.contours_ = {
            s: completed_signed_contour(spec, self.basis_, s, sampling, self.cusps_) for s in wanted
        }
        return self

    def transform(self, C):
        """Reduced coordinates ``(Log|c|) B`` of coefficient rows."""
        check_is_fitted(self, "basis_")
        C = np.atleast_2d(np.asarray(C, dtype=float))
        if C.shape[1] != self.basis_.shape[0]:
            raise ValueError(f"expected {self.basis_.shape[0]} coefficients per row, got {C.shape[1]}")
        return np.log(np.abs(C)) @ self.basis_


class ChamberClassifier(BaseEstimator, ClassifierMixin):
    """Assigns coefficient vectors to chambers of one signed completed contour.

    ``predict`` returns the chamber id, or -1 when the coefficient signs are
    not ``+-sigma`` or the reduced point sits on a wall pixel.
    """

    def __init__(self, sigma="+--++", window=8.0, resolution=2048, max_step=0.01):
        self.sigma = sigma
        self.window = window
        self.resolution = resolution
        self.max_step = max_step

    def fit(self, A, y=None):
        spec = _as_spectrum(A)
        self.sigma_ = _sigma(self.sigma)
        self.basis_ = basis_for(spec).B
        sampling = Sampling(clip_window=self.window, max_step=self.max_step)
        self.contour_ = completed_signed_contour(spec, self.basis_, self.sigma_, sampling)
        self.chambers_ = count_chambers(self.contour_, window=self.window, resolution=self.resolution)
        self.classes_ = np.arange(self.chambers_.count)
        self.bounded_ = np.array([c.bounded for c in self.chambers_.chambers])
        return self

    def predict(self, C):
        check_is_fitted(self, "chambers_")
        C = np.atleast_2d(np.asarray(C, dtype=float))
        V = np.log(np.abs(C)) @ self.basis_
        out = np.full(len(C), -1, dtype=int)
        for i, (c, v) in enumerate(zip(C, V)):
            if canonical_sign(np.sign(c)) != self.sigma_:
                continue
            k = self.chambers_.locate(v)
            if k is not None:
                out[i] = k
        return out
