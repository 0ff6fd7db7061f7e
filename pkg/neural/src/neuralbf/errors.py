"""Exception hierarchy for the learned beamformer."""


class NeuralBfError(Exception):
    """Base class for all neuralbf failures."""


class ShapeMismatch(NeuralBfError):
    pass


class OddDims(NeuralBfError):
    pass


class IndivisibleSpatialDims(NeuralBfError):
    pass


class ManifestEmpty(NeuralBfError):
    pass


class NanLoss(NeuralBfError):
    pass


class DimsIncompatible(NeuralBfError):
    pass


class BadMagic(NeuralBfError):
    pass


class TruncatedPayload(NeuralBfError):
    pass


class UnsupportedDtype(NeuralBfError):
    pass
