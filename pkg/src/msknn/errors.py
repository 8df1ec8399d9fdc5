"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or unusable input data (bad CSV, impossible split, ...)."""


class NumericalError(Exception):
    """A numerical procedure cannot proceed (singular design, empty ball, ...)."""
