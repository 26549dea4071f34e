# App_CHIROCOOL/exceptions.py


class ChirocoolError(Exception):
    """Base de todos los errores del simulador."""


# --- ÁLGEBRA DE OPERADORES ---
class InvalidTruncationError(ChirocoolError):
    pass


class DimensionMismatchError(ChirocoolError):
    pass


class SiteOutOfRangeError(ChirocoolError):
    pass


# --- CONFIGURACIÓN ---
class ConfigValidationError(ChirocoolError):
    """La configuración viola invariantes; `issues` trae el detalle completo."""

    def __init__(self, issues):
        self.issues = list(issues)
        detalle = "; ".join(f"{i.field}: {i.message}" for i in self.issues)
        super().__init__(f"Configuración inválida: {detalle}")


class ConfigParseError(ChirocoolError):
    pass


# --- SOLVERS ---
class SuperoperatorTooLargeError(ChirocoolError):
    pass


class AmbiguousSteadyStateError(ChirocoolError):
    pass


class NonNormalizableSteadyStateError(ChirocoolError):
    pass


class InvalidDensityMatrixError(ChirocoolError):
    pass


class UndefinedNormalizationError(ChirocoolError):
    pass


class StiffnessError(ChirocoolError):
    pass


class FitFailureError(ChirocoolError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class OutOfValidityError(ChirocoolError):
    pass


class DegenerateParameterError(ChirocoolError):
    pass


class NumericalError(ChirocoolError):
    """Falla numérica de numpy/scipy (factorización, ARPACK, álgebra lineal)."""


# --- BARRIDOS ---
class UnknownPresetError(ChirocoolError):
    pass


class InvalidSweepSpecError(ChirocoolError):
    pass
