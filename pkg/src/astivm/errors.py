"""Exception hierarchy shared by every module of the package."""


class AstIvmError(Exception):
    """Base class for all errors raised by astivm."""


class SchemaViolation(AstIvmError):
    pass


class ChildAlreadyAttached(AstIvmError):
    pass


class UnknownNode(AstIvmError, KeyError):
    pass


class ReplacementAttached(AstIvmError):
    pass


class UnboundVariable(AstIvmError):
    pass


class UnknownAttribute(AstIvmError):
    pass


class DivisionByZero(AstIvmError, ZeroDivisionError):
    pass


class UnboundReuse(AstIvmError):
    pass


class HostFnFailure(AstIvmError):
    pass


class MatchMismatch(AstIvmError):
    pass


class UnsafeGenerator(AstIvmError):
    pass


class UnsupportedRootAnyNode(AstIvmError):
    pass


class ConfigError(AstIvmError):
    pass
