"""Exception and warning types shared across the package."""


class IllConditionedSpecError(ValueError):
    """Requested beam trajectory cannot be phase-unwrapped reliably.

    Raised when adjacent-subcarrier target phases jump by nearly pi after
    detrending, so the delay/phase regression would be fit to garbage.
    """


class AliasingError(ValueError):
    """Wavenumber support region touches the spectrum border.

    The array is too small, or the source too close, for the plane-wave
    support disk to fit inside the resolvable wavenumber window.
    """


class CalibrationError(ValueError):
    """Radius-range calibration sweep produced non-monotone radii."""


class OutOfCalibrationError(ValueError):
    """Measured support radius falls outside the calibrated table."""


class InfeasibleAllocationError(ValueError):
    """Power budget cannot cover the reserved sensing power."""


class HardwareBoundError(ValueError):
    """Delay element exceeds the configured hardware bound."""


class BoundaryPeakWarning(UserWarning):
    """A grid search peaked on the boundary of the evaluation grid."""
