"""Exception hierarchy. Every validation failure raises a named error so the
CLI can report exactly which invariant was violated."""


class PwbeamError(Exception):
    """Base class for all toolkit errors."""


# -- probe / core types ------------------------------------------------------

class EmptyProbe(PwbeamError):
    pass


class UnsortedElements(PwbeamError):
    pass


class NonUniformPitch(PwbeamError):
    pass


class AllZeroData(PwbeamError):
    pass


# -- geometry ----------------------------------------------------------------

class NonPositiveDepth(PwbeamError):
    pass


class GridOutsideRecording(PwbeamError):
    pass


# -- beamforming -------------------------------------------------------------

class GridMismatch(PwbeamError):
    pass


class EmptyAngleList(PwbeamError):
    pass


class SingularCovariance(PwbeamError):
    pass


# -- simulation --------------------------------------------------------------

class EmptyExtent(PwbeamError):
    pass


class DurationTooShort(PwbeamError):
    pass


class UndersampledPsf(PwbeamError):
    pass


# -- postprocessing ----------------------------------------------------------

class ColumnTooShort(PwbeamError):
    pass


class AllZeroEnvelope(PwbeamError):
    pass


# -- metrics -----------------------------------------------------------------

class PeakAtBoundary(PwbeamError):
    pass


class NoCrossing(PwbeamError):
    pass


class ZeroVariance(PwbeamError):
    pass


class EmptyMask(PwbeamError):
    pass


class ZeroBackground(PwbeamError):
    pass


# -- storage / config --------------------------------------------------------

class BadMagic(PwbeamError):
    pass


class TruncatedPayload(PwbeamError):
    pass


class UnsupportedDtype(PwbeamError):
    pass


class ConfigError(PwbeamError):
    pass


class IoFailure(PwbeamError):
    pass
