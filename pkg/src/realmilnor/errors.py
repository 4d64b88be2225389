"""Exception hierarchy shared by every module."""


class RealMilnorError(Exception):
    """Base class for all package errors."""


class PolySyntaxError(RealMilnorError, ValueError):
    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnknownVariableError(RealMilnorError, ValueError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown variable {name!r}{where}")


class NegativeExponentError(RealMilnorError, ValueError):
    pass


class ResourceLimitError(RealMilnorError):
    pass


class DimensionMismatchError(RealMilnorError, ValueError):
    pass


class NotSquareError(RealMilnorError, ValueError):
    pass


class GermError(RealMilnorError, ValueError):
    """A map-germ failed validation (e.g. nonzero constant term)."""


class NotZeroDimensionalError(RealMilnorError):
    pass


class NotOriginConfinedError(RealMilnorError):
    pass


class ZeroJacobianClassError(RealMilnorError):
    pass


class DegenerateFormError(RealMilnorError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class IsolationSuspectError(RealMilnorError):
    pass


class SingularJacobianAtRootError(RealMilnorError):
    def __init__(self, message, root=None):
        self.root = root
        super().__init__(message)


class InconsistentTrialsError(RealMilnorError):
    def __init__(self, message, values=()):
        self.values = tuple(values)
        super().__init__(message)


class InconsistentEvidenceError(RealMilnorError):
    pass
