"""
Interfaz común de los entornos
"""

from abc import ABC, abstractmethod
from typing import List, Sequence

import numpy as np

from core.errors import StateError
from core.rng import RngStreams
from core.types import Arm, Context, validate_arm_set


class Environment(ABC):
    """Fuente de contextos y recompensas para un trial"""

    kind = "base"
    has_ground_truth = False

    def __init__(self, arms: Sequence[Arm], dimension: int):
        validate_arm_set(arms)
        self.arms: List[Arm] = list(arms)
        self.dimension = dimension
        self.costs = np.array([arm.cost for arm in self.arms])

    @property
    def num_arms(self) -> int:
        return len(self.arms)

    @abstractmethod
    def draw_context(self, step: int, streams: RngStreams) -> Context:
        """Contexto del paso (1-based)"""

    @abstractmethod
    def pull(self, arm: int, context: Context, step: int, round_index: int, streams: RngStreams) -> int:
        """Recompensa binaria de jugar arm en la ronda dada"""

    def success_probs(self, context: Context) -> np.ndarray:
        """Probabilidad de éxito verdadera de cada brazo"""
        raise StateError(f"El entorno '{self.kind}' no conoce las probabilidades verdaderas")
