"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand dimensions are inconsistent with each other or with a model."""


class DegenerateNodeError(RuntimeError):
    """A classifier node produced an all-constant (zero-norm) activation.

    Callers skip the node; fitting a deterministic layer again on the same
    residual would reproduce it, so greedy fitting stops here.
    """


class ModeError(RuntimeError):
    """Operation requires a model trained in the other mode."""


class ParseError(ValueError):
    """A dataset cell could not be read as a number; names the row/column."""


class FormatError(ValueError):
    """A dataset file is structurally malformed (ragged or empty rows)."""
