"""
Jerarquía de errores de CostBandit

Cada clase lleva el código de salida que usa la CLI.
"""

from typing import Optional


class CostBanditError(Exception):
    """Error base del sistema"""

    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigError(CostBanditError):
    """Configuración inválida (clave faltante, tipo incorrecto, valor fuera de rango)"""

    exit_code = 2

    def __init__(self, message: str, key: Optional[str] = None):
        self.reason = message
        if key and key not in message:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key


class DataError(CostBanditError):
    """Datos de entrada corruptos: contextos no finitos, trazas incompletas"""

    exit_code = 3


class NumericalError(CostBanditError):
    """Fallo numérico: no convergencia o raíz negativa fuera de tolerancia"""

    exit_code = 4

    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residuo={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class ArgumentError(CostBanditError, ValueError):
    """Argumento inválido en una llamada a la librería"""


class StateError(CostBanditError):
    """Operación llamada en un estado que no la admite"""


class TrialFailure(CostBanditError):
    """Fallo de un trial con su contexto (algoritmo, semilla, paso)"""

    def __init__(self, message: str, exit_code: int = 1, algorithm: Optional[str] = None,
                 seed: Optional[int] = None, step: Optional[int] = None):
        self.algorithm = algorithm
        self.seed = seed
        self.step = step
        self.exit_code = exit_code
        self.cause_message = message

        context = []
        if algorithm is not None:
            context.append(f"algoritmo={algorithm}")
        if seed is not None:
            context.append(f"semilla={seed}")
        if step is not None:
            context.append(f"paso={step}")

        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__(f"{prefix}{message}")

    @classmethod
    def from_error(cls, error: Exception, **context) -> 'TrialFailure':
        """Envolver un error de la librería conservando su código de salida"""
        if isinstance(error, TrialFailure):
            merged = {
                'algorithm': error.algorithm,
                'seed': error.seed,
                'step': error.step,
            }
            merged.update({k: v for k, v in context.items() if v is not None})
            return cls(error.cause_message, error.exit_code, **merged)

        exit_code = getattr(error, 'exit_code', 1)
        return cls(str(error), exit_code, **context)
