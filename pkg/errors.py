"""Exception hierarchy shared by every module, with CLI exit codes."""

from enum import IntEnum
from typing import Optional


class ExitCode(IntEnum):
    """Process exit codes used by the command-line front end."""
    SUCCESS = 0
    VALIDATION = 2
    BUDGET = 3
    COVERAGE = 4


class MRError(ValueError):
    """Root of all library errors. Subclasses set a structured exit code."""
    exit_code = ExitCode.VALIDATION
    code = "error"

    def to_dict(self) -> dict:
        """Structured form used by the CLI's JSON output."""
        return {'error': self.code, 'message': str(self)}


# --- words / systems -------------------------------------------------------

class UnboundVariable(MRError):
    code = "unbound_variable"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Variable {name} has no image in the substitution")


class RelationViolated(MRError):
    code = "relation_violated"

    def __init__(self, index: int, residue: str = ""):
        self.index = index
        self.residue = residue
        detail = f" (residue {residue})" if residue else ""
        super().__init__(f"Relation {index} does not reduce to the identity{detail}")


class InvalidSystem(MRError):
    code = "invalid_system"


class EquationSyntaxError(MRError):
    code = "syntax_error"

    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, column {col}: expected {expected}")

    def to_dict(self) -> dict:
        return {'error': self.code, 'line': self.line, 'col': self.col,
                'expected': self.expected, 'message': str(self)}


# --- oracle ----------------------------------------------------------------

class BudgetExceeded(MRError):
    """A search cap was hit. `partial` holds whatever was found so far."""
    exit_code = ExitCode.BUDGET
    code = "budget_exceeded"

    def __init__(self, what: str, partial=None):
        self.what = what
        self.partial = partial
        super().__init__(f"Search budget exceeded: {what}")


# --- lattice ---------------------------------------------------------------

class NotSpanning(MRError):
    code = "not_spanning"


class NonPositiveGenerator(MRError):
    code = "non_positive_generator"

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Generator {index} has non-positive length under the functional")


class DegenerateLengths(MRError):
    code = "degenerate_lengths"


# --- pseudogroup -----------------------------------------------------------

class InvalidBandSystem(MRError):
    code = "invalid_band_system"


class NotIsolated(MRError):
    code = "not_isolated"

    def __init__(self, base_id: str):
        self.base_id = base_id
        super().__init__(f"Base {base_id} is not isolated")


class PreconditionViolated(MRError):
    code = "precondition_violated"


class DegenerateOverlap(PreconditionViolated):
    code = "degenerate_overlap"


class NotPositivelyExpressible(MRError):
    code = "not_positively_expressible"

    def __init__(self, generator_id: str):
        self.generator_id = generator_id
        super().__init__(f"Generator {generator_id} has no positive expression in the new generators")


class NoOverlap(MRError):
    code = "no_overlap"


# --- diagrams --------------------------------------------------------------

class UnboundLabel(MRError):
    code = "unbound_label"

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"Label {label} has no value in the assignment")


class TwistNotApplicable(PreconditionViolated):
    code = "twist_not_applicable"


class TwistBreaksSolution(MRError):
    code = "twist_breaks_solution"

    def __init__(self, twist: str, equation: Optional[int] = None):
        self.twist = twist
        self.equation = equation
        where = f" (equation {equation})" if equation is not None else ""
        super().__init__(f"Twist {twist} maps a solution to a non-solution{where}")


class NotSeparable(MRError):
    code = "not_separable"

    def __init__(self, equation: int):
        self.equation = equation
        super().__init__(f"No marker placement keeps equation {equation} satisfied")


class CoverageFailure(MRError):
    exit_code = ExitCode.COVERAGE
    code = "coverage_failure"
