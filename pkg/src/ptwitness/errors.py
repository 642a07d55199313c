"""Exception hierarchy shared by all ptwitness modules."""


class PTWitnessError(Exception):
    """Base class for every error raised by this package."""


class ContractError(PTWitnessError, ValueError):
    """An input violates an operation's precondition (e.g. a non-Hermitian matrix)."""


class DegreeError(PTWitnessError, ValueError):
    """A requested monomial degree exceeds what the data source can supply accurately."""


class TruncationError(PTWitnessError):
    """A Fock cutoff is too small for the requested state.

    Attributes
    ----------
    tail_mass : float
        Population found in the top two Fock levels of either mode.
    """

    def __init__(self, message, tail_mass=float("nan")):
        super().__init__(message)
        self.tail_mass = tail_mass


class SpecError(PTWitnessError, ValueError):
    """A state or moment-table document is malformed."""
