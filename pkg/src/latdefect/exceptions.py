"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input: wrong shapes, mismatched dimensions, bad syntax."""


class PreconditionError(ValueError):
    """Well-formed input that lies outside the hypotheses of an operation."""
