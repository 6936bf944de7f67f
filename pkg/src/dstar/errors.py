"""Exception hierarchy shared by every module."""


class DstarError(Exception):
    pass


class DecodeError(DstarError):
    """A point or region code does not decode in the requested carrier."""


class ParseError(DstarError):
    """Malformed text input (poset files, space files, region syntax)."""


class ContractViolation(DstarError):
    """An operation was called outside its precondition."""


class FamilyMismatch(DstarError):
    pass


class UnsupportedCombination(DstarError):
    """The region algebra has no closure rule for the requested operation."""


class MalformedScenario(DstarError):
    pass
