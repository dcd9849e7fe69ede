"""Exception types shared across the package."""


class MinionLabError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInput(MinionLabError):
    """Input document is not valid JSON or misses required fields."""


class ArityMismatch(MinionLabError):
    """A tuple length does not match the declared arity."""


class UnknownAtom(MinionLabError):
    """A relation tuple mentions an atom outside the domain."""


class SignatureMismatch(MinionLabError):
    """Two structures that must share a signature do not."""


class SymbolClash(MinionLabError):
    """A reserved enhancement symbol exists with a conflicting interpretation."""


class BudgetExceeded(MinionLabError):
    """A construction would exceed the configured size budget."""


class EmptySubset(MinionLabError):
    """An induced substructure needs a nonempty atom subset."""


class EmptyRelation(MinionLabError):
    """An operation requires a nonempty relation."""


class IndexOutOfRange(MinionLabError):
    """A 1-based index tuple points outside its mode sizes."""


class LengthMismatch(MinionLabError):
    """Two tuples that must have equal length do not."""


class ShapeMismatch(MinionLabError):
    """Tensor shapes are incompatible for the requested contraction."""


class SemiringMismatch(MinionLabError):
    """Operands live over incompatible semirings."""


class MembershipLost(MinionLabError):
    """Internal invariant violation: a minor left its minion.

    This signals an implementation bug, never an expected runtime condition.
    """


class SupportViolation(MinionLabError):
    """A semi-direct product operand has support outside its partner."""


class NotAHomomorphism(MinionLabError):
    """A claimed homomorphism witness fails verification."""


class InvalidWitness(MinionLabError):
    """A solver witness fails its defining equations."""


class WrongKind(MinionLabError):
    """A certificate of the wrong kind was passed to a verifier."""


class IterationBudget(MinionLabError):
    """An iterative solver exceeded its pivot/iteration budget."""


class NotPSD(MinionLabError):
    """A matrix expected to be positive semidefinite is not."""
