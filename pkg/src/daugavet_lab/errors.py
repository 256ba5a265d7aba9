"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by daugavet_lab."""


class DimensionMismatch(LabError, ValueError):
    pass


class OutsideBall(LabError, ValueError):
    pass


class EmptyRestriction(LabError):
    """The restriction set rejected every candidate the search produced."""


class InfeasibleOnBudget(LabError):
    """No point of the requested slice was found within the evaluation budget.

    This does not prove the slice is empty; nonlinear slices can be empty,
    and a search can only ever fail to find a member.
    """


class DegenerateFunctional(LabError):
    """``y* o Phi`` vanishes (numerically) on the unit ball."""


class StaleWitness(LabError):
    """A stored witness no longer satisfies its defining inequalities."""


class NoExposedPoint(LabError):
    pass


class PreconditionError(LabError, ValueError):
    pass


class ConfigError(LabError, ValueError):
    pass
