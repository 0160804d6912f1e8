class ZenoError(ValueError):
    """Base class for every invariant violation raised by zenolab."""


class DimensionMismatch(ZenoError):
    pass


class NotHermitian(ZenoError):
    pass


class NotNormalized(ZenoError):
    pass


class NotUnitary(ZenoError):
    pass


class NotProjector(ZenoError):
    pass


class NotDensityMatrix(ZenoError):
    pass


class AncillaNotOrthogonal(ZenoError):
    pass


class NonPositiveDuration(ZenoError):
    pass


class EmptyChain(ZenoError):
    pass


class ConfigInvalid(ZenoError):
    pass
