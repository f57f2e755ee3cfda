class RankRangeError(Exception):
    """Base class for every error raised by the rank-k numerical range code."""


class NotHermitian(RankRangeError):
    pass


class NonFinite(RankRangeError):
    pass


class DimensionMismatch(RankRangeError):
    pass


class Unbounded(RankRangeError):
    """The half-plane family does not enclose a bounded region."""


class EmptyRegion(RankRangeError):
    pass


class CombinatorialLimit(RankRangeError):
    pass


class ThresholdViolated(RankRangeError):
    pass


class EmptyIntersection(RankRangeError):
    """Numerical subspace intersection came out zero-dimensional."""


class MatrixFormatError(RankRangeError):
    pass


class NoConvergence(RankRangeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SynthesisFailed(RankRangeError):
    def __init__(self, message, best_residual):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class EmptinessLost(RankRangeError):
    def __init__(self, message, largest_preserving_epsilon):
        super().__init__(
            f"{message} (largest epsilon keeping emptiness: "
            f"{largest_preserving_epsilon:.6g})"
        )
        self.largest_preserving_epsilon = largest_preserving_epsilon


class NotPositiveDefinite(RankRangeError):
    pass


class InvalidAngles(RankRangeError):
    pass
