"""Exception types raised across the package."""


class CclabError(Exception):
    """Base class for every error raised by cclab."""


class TooFewAttributes(CclabError, ValueError):
    pass


class DuplicatePair(CclabError, ValueError):
    pass


class MissingPair(CclabError, ValueError):
    pass


class NonPositiveJudgment(CclabError, ValueError):
    pass


class DimensionMismatch(CclabError, ValueError):
    pass


class UnsupportedOrder(CclabError, ValueError):
    pass


class NonConvergence(CclabError, RuntimeError):
    pass


class InconsistentJudgments(CclabError):
    """Pairwise judgments failed the consistency-ratio gate.

    The diagnostics that tripped the gate are kept on ``.diagnostics``.
    """

    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__(
            f"Inconsistent pairwise comparisons (CR={diagnostics.cr:.4f} > "
            f"{diagnostics.cr_threshold:.2f})"
        )


class ConfigInvalid(CclabError, ValueError):
    pass


class TimestampRegression(CclabError, ValueError):
    pass


class EmptyLog(CclabError, ValueError):
    pass


class IoFailure(CclabError, OSError):
    pass


class CellFailure(CclabError):
    """A sweep cell raised; ``cell`` names its coordinates."""

    def __init__(self, cell, cause):
        self.cell = cell
        self.cause = cause
        super().__init__(f"cell {cell} failed: {type(cause).__name__}: {cause}")
