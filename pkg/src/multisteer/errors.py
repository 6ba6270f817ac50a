"""Exception types raised by the package."""


class MultisteerError(ValueError):
    """Base class for invalid inputs and internal consistency failures."""


class DimensionMismatch(MultisteerError):
    def __init__(self, site: int, expected: int, got: int, what: str = "operator"):
        self.site = site
        super().__init__(
            f"site {site + 1}: {what} has dimension {got}, expected {expected}"
        )


class DenseCapExceeded(MultisteerError):
    """Raised when a dense evaluation would exceed the configured dimension cap."""


class KrausError(MultisteerError):
    pass


class EncodingError(MultisteerError):
    pass


class ThresholdError(MultisteerError):
    pass
