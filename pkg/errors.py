"""
Error types raised by the accumulation-point toolkit.

Every error carries a stable kebab-case ``code`` so that the CLI and the JSON
reports can name the failure without parsing messages.
"""


class AccumLabError(Exception):
    """Base error. ``code`` identifies the failure family."""

    code = "accum-lab-error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class InvalidModulusError(AccumLabError):
    code = "invalid-modulus"


class InvalidSetError(AccumLabError):
    """Malformed eventually periodic data (bad residues, overlapping exceptions)."""

    code = "invalid-set"


class InsufficientElementsError(AccumLabError):
    code = "insufficient-elements"


class NotInfiniteError(AccumLabError):
    code = "not-infinite"


class InvalidPartitionError(AccumLabError):
    code = "invalid-partition"


class ZeroDirectionError(AccumLabError):
    code = "zero-direction"


class WitnessError(AccumLabError):
    """A witness construction whose precondition fails.

    Codes: no-submax, not-dominant, bad-order, epsilon-too-large, degenerate,
    no-overflow, empty-column, bad-surrogate, bad-family.
    """

    code = "witness-error"


class UndecidablePatternError(AccumLabError):
    code = "undecidable-pattern"


class InvalidGapsError(AccumLabError):
    code = "invalid-gaps"


class SizeLimitError(AccumLabError):
    code = "size-limit"


class NotDistinctError(AccumLabError):
    code = "not-distinct"


class RatioOutOfRangeError(AccumLabError):
    code = "ratio-out-of-range"


class InadequateConfigError(AccumLabError):
    code = "inadequate-config"


class ParseError(AccumLabError):
    code = "parse-error"


class InvalidArgumentError(AccumLabError):
    """An argument outside its documented range (indices, counts, shifts)."""

    code = "invalid-argument"
