"""Exception hierarchy shared by all twsolve modules."""


class TWError(Exception):
    """Base class for every error raised by twsolve."""


class InvalidParams(TWError, ValueError):
    pass


class NonHyperbolicFrame(TWError, ValueError):
    """The effective dispersion h = tau*v**2 - kappa is not positive."""


class NoRealRoots(TWError):
    pass


# integration --------------------------------------------------------------

class IntegrationError(TWError):
    pass


class StepSizeUnderflow(IntegrationError):
    """Step size collapsed, or the state left the blowup guard."""


class MaxStepsExceeded(IntegrationError):
    pass


class RadicandNegative(TWError, ValueError):
    pass


class TurningPointOrderTooHigh(TWError, ValueError):
    pass


# homoclinic search --------------------------------------------------------

class SectionMiss(TWError):
    """An invariant-manifold shot never reached the Poincare section."""


class NoSignChange(TWError, ValueError):
    pass


# series -------------------------------------------------------------------

class SeriesError(TWError):
    pass


class ResonantIndex(SeriesError):
    def __init__(self, k):
        super().__init__(f"linear factor vanishes at index k={k}")
        self.k = k


class CalibrationFailed(SeriesError):
    pass


class IllConditioned(UserWarning):
    """Vandermonde residual larger than expected; the solve still returns."""


# catalog ------------------------------------------------------------------

class ConstraintViolation(TWError, ValueError):
    pass


class DegenerateDenominator(TWError, ValueError):
    pass


class PoleAt(TWError, ArithmeticError):
    def __init__(self, xi):
        super().__init__(f"denominator vanishes at xi={xi!r}")
        self.xi = xi


class PoleInSampleSet(TWError, ValueError):
    pass
