class RescompError(Exception):
    """Base class of every domain error raised by the workbench."""


class ResourceError(RescompError):
    pass


class GrowthError(ResourceError):
    pass


class PrecisionError(RescompError):
    pass


class DeviceError(RescompError):
    pass


class LedgerError(RescompError):
    pass
