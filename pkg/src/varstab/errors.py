"""Exception hierarchy for varstab.

Every error raised by the library derives from VarstabError so callers can
catch library failures without masking programming errors.
"""


class VarstabError(Exception):
    """Base class for all varstab errors."""


# --- expression layer ---------------------------------------------------

class ExprSyntaxError(VarstabError):
    """Malformed expression text.

    Carries the 0-based character position and a description of what was
    expected there.
    """

    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at position {position}{suffix}")


class UnboundParameterError(VarstabError):
    """An expression references $name with no binding supplied."""

    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound parameter ${name}")


class EvalDomainError(VarstabError):
    """Evaluation left the domain of a node (log/sqrt/div/pow)."""

    def __init__(self, node_text, y):
        self.node_text = node_text
        self.y = y
        super().__init__(f"domain error in {node_text} at y={y!r}")


# --- system layer --------------------------------------------------------

class SingularMetricError(VarstabError):
    """det(a_ij) vanishes somewhere on the working interval."""

    def __init__(self, y):
        self.y = y
        super().__init__(f"kinetic metric is singular at y={y!r}")


class UnknownBuiltinError(VarstabError):
    pass


class MissingParameterError(VarstabError):
    def __init__(self, builtin, name):
        self.builtin = builtin
        self.name = name
        super().__init__(f"builtin {builtin!r} requires parameter {name!r}")


# --- variational layer ----------------------------------------------------

class Phi22VanishesError(VarstabError):
    """The nonzero eigenvalue of the Jacobi endomorphism vanishes."""

    def __init__(self, y):
        self.y = y
        super().__init__(f"Phi^2_2 vanishes (or changes sign) near y={y!r}")


class QuadratureFailureError(VarstabError):
    pass


class EquilibriumMissingError(VarstabError):
    """S(0) or U(0) is not zero: y=0 is not a relative equilibrium."""


class InconsistentCriteriaError(VarstabError):
    """The equivalent variationality criteria disagree beyond tolerance.

    Signals numerical trouble (ill conditioning), not a property of the
    underlying system.
    """


# --- synthesis layer -------------------------------------------------------

class RootFindFailureError(VarstabError):
    def __init__(self, y, detail=""):
        self.y = y
        super().__init__(f"no root bracket for M' at y={y!r} {detail}".rstrip())


class SingularAtEquilibriumError(VarstabError):
    """The M' coefficient vanishes at y=0 (always true when S(0)=0)."""


class DenominatorVanishesError(VarstabError):
    def __init__(self, y):
        self.y = y
        super().__init__(f"control denominator vanishes at y={y!r}")


class FNotNegativeError(VarstabError):
    def __init__(self, x, y):
        self.x = x
        self.y = y
        super().__init__(f"dissipation gain f is not negative at (x={x!r}, y={y!r})")


# --- simulation layer -------------------------------------------------------

class LeftWorkingIntervalError(VarstabError):
    """The trajectory left the working interval; integration halted.

    Attributes time (exit time) and trajectory (the partial result).
    """

    def __init__(self, time, trajectory=None):
        self.time = time
        self.trajectory = trajectory
        super().__init__(f"trajectory left the working interval at t={time!r}")


class NonFiniteStateError(VarstabError):
    def __init__(self, time, trajectory=None):
        self.time = time
        self.trajectory = trajectory
        super().__init__(f"non-finite state at t={time!r}")


# --- configuration layer ----------------------------------------------------

class ConfigParseError(VarstabError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"config line {line}: {reason}")


class ConfigValidationError(VarstabError):
    pass
