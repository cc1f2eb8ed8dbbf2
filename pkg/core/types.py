"""
Tipos de dominio compartidos por todos los módulos

Contextos, brazos, acciones, observaciones, registros de paso e hiperparámetros.
"""

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from core.errors import ArgumentError, ConfigError, DataError

# Los contextos viven en la bola unidad
CONTEXT_NORM_TOLERANCE = 1e-9
UTILITY_TOLERANCE = 1e-12

# Alias: un contexto es un vector numpy de solo lectura
Context = np.ndarray


def _freeze(vector: np.ndarray) -> Context:
    vector = np.array(vector, dtype=float)
    vector.setflags(write=False)
    return vector


def make_context(values: Iterable[float]) -> Context:
    """
    Construir un contexto validado

    Args:
        values: Coordenadas del embedding

    Returns:
        Vector de solo lectura con norma <= 1
    """
    vector = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise ArgumentError("El contexto debe ser un vector no vacío")
    if not np.all(np.isfinite(vector)):
        raise DataError("El contexto contiene valores NaN o infinitos")

    norm = float(np.linalg.norm(vector))
    if norm > 1.0 + CONTEXT_NORM_TOLERANCE:
        raise ArgumentError(f"El contexto está fuera de la bola unidad (norma={norm:.6f})")

    return _freeze(vector)


def one_hot_context(category: int, num_categories: int) -> Context:
    """Embedding one-hot de una categoría (p. ej. nivel de dificultad)"""
    if num_categories < 1:
        raise ArgumentError(f"num_categories debe ser >= 1 (recibido {num_categories})")
    if not 0 <= category < num_categories:
        raise ArgumentError(f"Categoría {category} fuera de rango [0, {num_categories})")

    vector = np.zeros(num_categories)
    vector[category] = 1.0
    return _freeze(vector)


def normalize_context(raw: Sequence[float]) -> Context:
    """
    Proyectar un embedding crudo a la bola unidad

    Los vectores con norma <= 1 se devuelven sin cambios; el resto se divide
    por su norma L2. El vector cero se acepta tal cual.
    """
    vector = np.asarray(raw, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise DataError("El embedding debe ser un vector no vacío")
    if not np.all(np.isfinite(vector)):
        raise DataError("El embedding contiene valores NaN o infinitos")

    norm = float(np.linalg.norm(vector))
    if norm > 1.0:
        vector = vector / norm
    return _freeze(vector)


@dataclass(frozen=True)
class Arm:
    """Modelo candidato con costo fijo por consulta"""
    id: int
    cost: float
    label: str = ""
    available_from: int = 1  # Primer paso (1-based) en que el brazo está disponible

    def __post_init__(self):
        if self.id < 0:
            raise ArgumentError(f"Id de brazo inválido: {self.id}")
        if not math.isfinite(self.cost) or self.cost < 0:
            raise ArgumentError(f"El costo del brazo {self.id} debe ser >= 0 (recibido {self.cost})")
        if self.available_from < 1:
            raise ArgumentError(f"available_from del brazo {self.id} debe ser >= 1")


def validate_arm_set(arms: Sequence[Arm]) -> None:
    """Verificar ids únicos y contiguos desde 0"""
    if not arms:
        raise ArgumentError("El conjunto de brazos está vacío")
    ids = [arm.id for arm in arms]
    if ids != list(range(len(arms))):
        raise ArgumentError(f"Los ids de brazo deben ser contiguos desde 0 y ordenados: {ids}")


@dataclass(frozen=True)
class Action:
    """Acción etiquetada: Null (terminar el paso) o Pull(brazo)"""
    arm: Optional[int] = None

    def __post_init__(self):
        if self.arm is not None and self.arm < 0:
            raise ArgumentError(f"Id de brazo inválido en la acción: {self.arm}")

    @classmethod
    def null(cls) -> 'Action':
        return cls(None)

    @classmethod
    def pull(cls, arm: int) -> 'Action':
        return cls(int(arm))

    @property
    def is_null(self) -> bool:
        return self.arm is None

    def __str__(self) -> str:
        return "Null" if self.is_null else f"Pull({self.arm})"


NULL_ACTION = Action.null()


def check_binary_reward(reward: int) -> int:
    if reward not in (0, 1):
        raise DataError(f"La recompensa debe ser binaria (recibido {reward!r})")
    return int(reward)


@dataclass(frozen=True)
class Observation:
    """Par (contexto, recompensa binaria)"""
    context: Context
    reward: int

    def __post_init__(self):
        object.__setattr__(self, 'reward', check_binary_reward(self.reward))


class ObservationSet:
    """
    Datos de regresión D_a de un brazo

    Guarda los contextos en un buffer que crece por duplicación para que
    agregar una observación sea O(d) amortizado.
    """

    def __init__(self, dimension: int, capacity: int = 16):
        if dimension < 1:
            raise ArgumentError(f"La dimensión debe ser >= 1 (recibido {dimension})")
        self.dimension = dimension
        self._contexts = np.zeros((max(capacity, 1), dimension))
        self._rewards = np.zeros(max(capacity, 1))
        self._size = 0

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Sequence[float], int]]) -> 'ObservationSet':
        pairs = list(pairs)
        if not pairs:
            raise ArgumentError("from_pairs necesita al menos una observación")
        dataset = cls(len(pairs[0][0]), capacity=len(pairs))
        for context, reward in pairs:
            dataset.add(context, reward)
        return dataset

    def add(self, context: Sequence[float], reward: int):
        """Agregar una observación"""
        context = np.asarray(context, dtype=float)
        if context.shape != (self.dimension,):
            raise ArgumentError(
                f"Dimensión de contexto {context.shape} distinta de ({self.dimension},)"
            )
        reward = check_binary_reward(reward)

        if self._size == len(self._rewards):
            self._contexts = np.vstack([self._contexts, np.zeros_like(self._contexts)])
            self._rewards = np.concatenate([self._rewards, np.zeros_like(self._rewards)])

        self._contexts[self._size] = context
        self._rewards[self._size] = reward
        self._size += 1

    @property
    def X(self) -> np.ndarray:
        return self._contexts[:self._size]

    @property
    def y(self) -> np.ndarray:
        return self._rewards[:self._size]

    def __len__(self) -> int:
        return self._size

    def __iter__(self):
        for i in range(self._size):
            yield Observation(_freeze(self._contexts[i]), int(self._rewards[i]))


class TerminationReason(Enum):
    """Motivo de cierre de un paso"""
    NULL_CHOSEN = "NullChosen"
    BUDGET_HIT = "BudgetHit"
    SUCCESS = "Success"


@dataclass(frozen=True)
class Pull:
    arm: int
    reward: int
    cost: float


@dataclass(frozen=True)
class StepRecord:
    """Interacción completa con un prompt: brazos jugados, recompensas, costos y utilidad"""
    step_index: int
    context: Context
    pulls: Tuple[Pull, ...]
    terminated_by: TerminationReason
    utility: float

    @property
    def num_pulls(self) -> int:
        return len(self.pulls)

    @property
    def total_cost(self) -> float:
        return math.fsum(pull.cost for pull in self.pulls)

    @property
    def max_reward(self) -> int:
        return max((pull.reward for pull in self.pulls), default=0)

    @property
    def succeeded(self) -> bool:
        return self.max_reward == 1

    def validate(self, tau_max: int, lam: float):
        """Comprobar los invariantes del registro; lanza DataError si alguno falla"""
        if not 0 <= self.num_pulls <= tau_max:
            raise DataError(f"Paso {self.step_index}: {self.num_pulls} pulls excede tau_max={tau_max}")

        for i, pull in enumerate(self.pulls):
            if pull.reward == 1 and i != self.num_pulls - 1:
                raise DataError(f"Paso {self.step_index}: hubo pulls después de un éxito")

        expected = step_utility(self, lam)
        if abs(expected - self.utility) > UTILITY_TOLERANCE:
            raise DataError(
                f"Paso {self.step_index}: utilidad {self.utility} no coincide con {expected}"
            )

        if self.succeeded and self.terminated_by is not TerminationReason.SUCCESS:
            raise DataError(f"Paso {self.step_index}: éxito registrado como {self.terminated_by.value}")


def step_utility(record: StepRecord, lam: float) -> float:
    """Utilidad de un paso: máxima recompensa menos lambda por el costo acumulado"""
    return float(record.max_reward) - lam * record.total_cost


def practical_alpha(num_arms: int, delta: float) -> float:
    """Escala del bono UCB: sqrt(2 ln(2|A|/delta))"""
    if num_arms < 1:
        raise ArgumentError(f"num_arms debe ser >= 1 (recibido {num_arms})")
    if not 0 < delta < 1:
        raise ArgumentError(f"delta debe estar en (0, 1) (recibido {delta})")
    return math.sqrt(2.0 * math.log(2.0 * num_arms / delta))


@dataclass(frozen=True)
class HyperParams:
    """Hiperparámetros de un algoritmo (valores por defecto del protocolo experimental)"""
    lam: float = 0.01
    tau_max: int = 5
    tau_exp: int = 1
    alpha: Optional[float] = None  # None => practical_alpha(|A|, delta)
    delta: float = 0.05
    kernel_sigma: float = 3.0
    kernel_beta: float = 1.0
    max_support: Optional[int] = None

    # Nombre de cada campo en el archivo de configuración
    CONFIG_KEYS = {
        'lambda': 'lam',
        'tau_max': 'tau_max',
        'tau_exp': 'tau_exp',
        'alpha': 'alpha',
        'delta': 'delta',
        'kernel_sigma': 'kernel_sigma',
        'kernel_beta': 'kernel_beta',
        'max_support': 'max_support',
    }

    def __post_init__(self):
        self.validate()

    def validate(self, prefix: str = "hyper"):
        checks = [
            ('lambda', self.lam >= 0, "debe ser >= 0"),
            ('tau_max', isinstance(self.tau_max, int) and self.tau_max >= 1, "debe ser un entero >= 1"),
            ('tau_exp', isinstance(self.tau_exp, int) and self.tau_exp >= 1, "debe ser un entero >= 1"),
            ('alpha', self.alpha is None or self.alpha >= 0, "debe ser >= 0"),
            ('delta', 0 < self.delta < 1, "debe estar en (0, 1)"),
            ('kernel_sigma', self.kernel_sigma > 0, "debe ser > 0"),
            ('kernel_beta', self.kernel_beta > 0, "debe ser > 0"),
            ('max_support', self.max_support is None or self.max_support >= 1, "debe ser >= 1"),
        ]
        for key, ok, reason in checks:
            if not ok:
                raise ConfigError(f"{reason}", key=f"{prefix}.{key}")

    def resolved_alpha(self, num_arms: int) -> float:
        """Alpha efectivo: el configurado o el valor práctico derivado de delta"""
        if self.alpha is not None:
            return float(self.alpha)
        return practical_alpha(num_arms, self.delta)

    def with_overrides(self, **overrides) -> 'HyperParams':
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(overrides)
        return HyperParams(**values)

    def to_dict(self) -> dict:
        return {key: getattr(self, attr) for key, attr in self.CONFIG_KEYS.items()}
