"""Exception hierarchy shared by every module.

Each error carries a short category used by the command line front end to
pick an exit code: ``input`` (1), ``contract`` (2) or ``budget`` (3).
"""


class TournaError(Exception):
    category = "contract"


class InputError(TournaError):
    category = "input"


class ContractError(TournaError):
    category = "contract"


class BudgetError(TournaError):
    category = "budget"


# core
class EmptySet(InputError):
    pass


class Overlap(InputError):
    pass


class NotTransitive(ContractError):
    pass


class ArityMismatch(InputError):
    pass


class PartialColoring(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvariantViolation(InputError):
    pass


# patterns
class BadOrdering(InputError):
    pass


class NotStarForest(ContractError):
    def __init__(self, message: str, component=()):
        super().__init__(message)
        self.component = tuple(component)


class TooLarge(BudgetError):
    pass


class NotConstellation(InputError):
    pass


# sequences
class RolePatternMismatch(InputError):
    pass


class BadIndexSet(InputError):
    pass


# engine
class DomainError(InputError):
    pass


class InsufficientSize(ContractError):
    """Input too small for the guarantee of a stage.

    ``required`` describes the violated threshold; ``log2_required`` holds the
    base-2 logarithm of the minimum size when it is known.
    """

    def __init__(self, message: str, required: str = "", log2_required=None):
        super().__init__(message)
        self.required = required
        self.log2_required = log2_required


class PreconditionViolated(ContractError):
    pass


class EmptyResult(ContractError):
    pass


class ExtractorBroke(ContractError):
    pass


class InternalContractViolation(ContractError):
    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


class NotSaturated(ContractError):
    pass


# oracles
class BudgetExceeded(BudgetError):
    pass
