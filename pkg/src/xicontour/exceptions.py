"""Exception and warning types raised across the package."""


class XiContourError(Exception):
    """Base class for all errors raised by xicontour."""


class SpectrumError(XiContourError, ValueError):
    """Invalid exponent matrix (duplicate columns, bad shape, unparseable entry)."""


class DegenerateNullspace(XiContourError):
    """The lifted matrix has full column rank, so there are no affine relations."""


class UnsupportedDimension(XiContourError):
    pass


class HyperplaneHit(XiContourError):
    """A projective parameter lies (numerically) on one of the hyperplanes ``lambda . beta_i = 0``."""

    def __init__(self, index, value=None):
        self.index = index
        self.value = value
        msg = f"parameter lies on hyperplane {index}"
        if value is not None:
            msg += f" (|lambda . beta| = {value:.3e})"
        super().__init__(msg)


class NotACircuit(XiContourError):
    pass


class PyramidalCircuit(XiContourError):
    pass


class DegenerateDerivative(XiContourError):
    pass


class InterpolationFailure(XiContourError):
    pass


class InconsistentLift(XiContourError):
    pass


class WindowTooSmall(XiContourError):
    """Chamber counts changed when the clipping window was doubled."""


class ConstancyViolation(XiContourError):
    """Two samples of one chamber produced different zero-set signatures."""

    def __init__(self, chamber, first, second):
        self.chamber = chamber
        self.witness = (first, second)
        super().__init__(
            f"chamber {chamber}: samples {first[0]} and {second[0]} have "
            f"signatures {first[1]} and {second[1]}"
        )


class ConfigError(XiContourError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ResolutionWarning(UserWarning):
    """A numerical count changed under grid refinement."""


class DefectiveWarning(UserWarning):
    """The spectrum fails a necessary condition for non-defectiveness."""
