"""Exception hierarchy shared by every scforge module."""

from __future__ import annotations


class ScforgeError(Exception):
    """Base class for all toolkit errors."""


# -- evaluation ---------------------------------------------------------------

class EvalError(ScforgeError):
    """Raised when an expression or action cannot be evaluated."""


class UnboundVariable(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class TypeMismatch(EvalError):
    pass


class DomainOverflow(EvalError):
    def __init__(self, name: str, value: int, lo: int | None, hi: int | None):
        super().__init__(
            f"assignment {name} = {value} leaves declared domain [{lo}, {hi}]")
        self.name = name
        self.value = value
        self.lo = lo
        self.hi = hi


# -- parsing ------------------------------------------------------------------

class DSLError(ScforgeError):
    """Parse or resolution failure. Carries one or more diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "invalid document")


# -- transformation -----------------------------------------------------------

class TransformError(ScforgeError):
    pass


# -- timed automata -----------------------------------------------------------

class TAError(ScforgeError):
    pass


class InvariantViolation(TAError):
    def __init__(self, message: str, max_admissible: int):
        super().__init__(message)
        self.max_admissible = max_admissible


class Deadlock(TAError):
    pass


class NondeterminismError(TAError):
    """More than one edge is eligible where the lockstep policy needs exactly one."""


# -- analysis -----------------------------------------------------------------

class MapMismatch(ScforgeError):
    pass


class UnboundedDomainError(ScforgeError):
    pass


class StateSpaceBudgetExceeded(ScforgeError):
    def __init__(self, budget: int):
        super().__init__(f"explored more than {budget} statuses")
        self.budget = budget


class ExportError(ScforgeError):
    pass


class UnsupportedConstruct(ExportError):
    def __init__(self, element: str, reason: str):
        super().__init__(f"{element}: {reason}")
        self.element = element
        self.reason = reason
