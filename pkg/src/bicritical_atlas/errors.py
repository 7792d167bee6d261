"""Exception types shared across the package."""


class AtlasError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteParameter(AtlasError):
    pass


class OutsideDomain(AtlasError):
    """Newton parameter outside the conjugate-criticals region."""


class DegenerateParameter(AtlasError):
    """Antipodal q = 0, where the free critical point collides with 0."""


class NoCycleFound(AtlasError):
    pass


class PeriodCapExceeded(AtlasError):
    pass


class NoConvergence(AtlasError):
    pass


class DerivativeSingular(AtlasError):
    pass


class OrbitHitPole(AtlasError):
    pass


class NoRootInRange(AtlasError):
    pass


class BisectionFailed(AtlasError):
    pass


class RefinementDiverged(AtlasError):
    pass


class NotInPetal(AtlasError):
    pass


class DepthExhausted(AtlasError):
    pass


class CuspReached(AtlasError):
    """Arc continuation ran into a degenerate (double) parabolic point."""

    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = samples if samples is not None else []


class ContinuationStalled(AtlasError):
    pass


class NotEscaping(AtlasError):
    pass


class SplitPointsNotFound(AtlasError):
    pass


class SeedingFailed(AtlasError):
    pass


class AmbiguousTag(AtlasError):
    pass


class OutOfWorld(AtlasError):
    pass


class UnknownFigure(AtlasError):
    def __init__(self, figure_id, valid_ids):
        super().__init__(f"unknown figure {figure_id!r}; valid ids: {sorted(valid_ids)}")
        self.figure_id = figure_id
        self.valid_ids = sorted(valid_ids)
