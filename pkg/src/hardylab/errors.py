"""Exception hierarchy for the hardylab package.

Every error raised by the library derives from :class:`HardyLabError`, so
callers can catch one type at the boundary (the CLI maps them to exit codes).
"""


class HardyLabError(Exception):
    """Base class for all hardylab errors."""


class UnknownFamily(HardyLabError):
    """Requested test-function family is not in the registry."""


class SupportExceedsMargin(HardyLabError):
    """Declared support would touch the periodic boundary margin."""


class OrderTooHigh(HardyLabError):
    """Derivative order above the supported maximum."""


class ScaleOutOfRange(HardyLabError):
    """Convolution scale t outside (0, 1]."""


class SupportOverflow(HardyLabError):
    """Dilated support exceeds the box margin."""


class BallOutsideDomain(HardyLabError):
    """Ball (or cube) average requested outside the box."""


class ChannelMismatch(HardyLabError):
    """Operand channel count does not match the expected one."""


class EmptyScaleSet(HardyLabError):
    """Maximal operator invoked with no scales."""


class EmptyDictionary(HardyLabError):
    """Grand maximal invoked with an empty profile dictionary."""


class OutOfRange(HardyLabError):
    """An exponent violates its admissible range; message names the constraint."""


class IllConditioned(HardyLabError):
    """Polynomial Gram matrix too ill-conditioned; raise m or resolution."""


class MomentCorrectionFailed(HardyLabError):
    """Moment-corrected mollifier system is ill-conditioned (L too large)."""


class LevelAboveMax(HardyLabError):
    """CZ level sits above max of the grand maximal; decomposition is trivial."""


class LadderDiverged(HardyLabError):
    """Atomic-ladder residual seminorm failed to decrease with more levels."""


class SupportOutsideDomainBall(HardyLabError):
    """Operator applied to data supported outside its certified domain ball."""


class DerivativeUnavailable(HardyLabError):
    """Coefficient field lacks the closed-form derivative needed by adjoint."""


class ProjectionUnavailable(HardyLabError):
    """Kernel-field projection requires constant-coefficient principal part."""


class NotElliptic(HardyLabError):
    """Operator failed the ellipticity probe required by the experiment."""


class BoxTooSmall(HardyLabError):
    """Box too small for the requested kernel to decay at the boundary."""


class KernelConstraintViolated(HardyLabError):
    """||A* v|| too large for a kernel-constrained experiment."""


class ConfigError(HardyLabError):
    """Experiment configuration failed schema validation; message names the key."""
