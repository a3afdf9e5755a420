"""Exception hierarchy for the splitsim package.

Every precondition gate and every internal guard has a dedicated class so
callers and tests can discriminate failure modes without string matching.
"""


class SplitsimError(Exception):
    """Base class for all package errors."""


# ---- instance construction -------------------------------------------------

class DuplicateEdge(SplitsimError):
    pass


class IndexOutOfRange(SplitsimError):
    pass


class InfeasibleParams(SplitsimError):
    """A generator cannot realize the requested parameters."""


class SchemaError(SplitsimError):
    """Malformed instance/certificate/report JSON."""


# ---- precondition gates ----------------------------------------------------

class PreconditionDelta(SplitsimError):
    """Minimum left degree below the threshold a solver requires."""


class PreconditionRatio(SplitsimError):
    """delta < 6*r where the ratio gate applies."""


class PreconditionDegree(SplitsimError):
    """A constrained node is below the balanced-splitting degree floor."""


class DegreeBelowDelta(SplitsimError):
    """Left node with degree below the declared delta in a heavy-node split."""


class MinDegreeTooSmall(SplitsimError):
    """Graph minimum degree below what a reduction requires."""


class GirthTooSmall(SplitsimError):
    pass


class ParamViolation(SplitsimError):
    """Multicolor parameters outside the admissible range."""


# ---- runtime guards --------------------------------------------------------

class ShrinkageViolation(SplitsimError):
    """A degree/rank shrinkage bound failed; indicates an implementation bug."""


class GapViolation(SplitsimError):
    """Residual graph violates delta_H >= 6*r_H after shattering."""


class ComponentTooLarge(SplitsimError):
    """A shattering residual component exceeds the configured size budget."""


class RetryExhausted(SplitsimError):
    """A randomized solver failed verification on every allowed attempt."""


class EstimatorOverflow(SplitsimError):
    """Initial pessimistic estimator >= 1; the greedy has no certificate."""


class IterationBudgetExceeded(SplitsimError):
    pass


# ---- executor errors -------------------------------------------------------

class RoundLimitExceeded(SplitsimError):
    pass


class RadiusViolation(SplitsimError):
    """A sequential program read state outside its declared radius."""


class UnsupportedRadius(SplitsimError):
    pass


class InvalidScheduleColoring(SplitsimError):
    """Two same-color nodes lie within the schedule radius."""


# ---- certificate errors ----------------------------------------------------

class IncompleteColoring(SplitsimError):
    pass


class NotAWeakSplitting(SplitsimError):
    pass


class NotAWeakMulticolorSplitting(SplitsimError):
    pass
