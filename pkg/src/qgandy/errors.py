"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class FieldMismatchError(TypeError):
    """Scalars (or vectors) from two different fields were combined."""


class ContractViolation(RuntimeError):
    """A physical hypothesis required by an operation does not hold.

    ``hypothesis`` names the violated assumption, e.g. ``"unitarity"`` or
    ``"quiescence"``.
    """

    def __init__(self, hypothesis: str, message: str):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis
