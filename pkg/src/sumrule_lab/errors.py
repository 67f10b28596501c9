"""Exception hierarchy shared by all sumrule_lab modules."""


class SumruleLabError(Exception):
    """Base class for all errors raised by this package."""


class SingularPotential(SumruleLabError):
    """Raised when a pointwise/ODE operation is attempted on a distributional
    potential that only supports closed-form reference evaluation."""


class OutOfRange(SumruleLabError):
    """Evaluation point lies outside the tabulated grid."""


class DivergentMoment(SumruleLabError):
    """A potential moment integral failed to converge."""


class StiffnessFailure(SumruleLabError):
    """Adaptive step control underflowed before reaching the target point."""


class BranchAmbiguity(SumruleLabError):
    """Phase-branch unwinding could not be resolved at the maximum grid
    refinement depth."""


class ConvergenceFailure(SumruleLabError):
    """Iterative evaluation (Born tail, Richardson limit) exceeded its
    error budget."""


class CrossCheckMismatch(SumruleLabError):
    """The two independent bound-state methods disagree in count or location."""


class ScanIncomplete(SumruleLabError):
    """Bound-state scan terminated before covering the admissible kappa range."""


class TailFitFailure(SumruleLabError):
    """Fitted large-k tail exponent is incompatible with the expected decay."""


class ResidueInstability(SumruleLabError):
    """Laurent-coefficient extraction disagrees between the two circle radii."""


class DomainError(SumruleLabError):
    """Argument outside the mathematical domain of a special function."""


class PositivePotential(SumruleLabError):
    """Semiclassical routines require an everywhere-attractive potential."""


class UnsupportedSubtraction(SumruleLabError):
    """The requested (n, m, channel) combination has no convergent
    real-axis integral representation."""


class ConfigError(SumruleLabError):
    """Invalid job configuration."""
