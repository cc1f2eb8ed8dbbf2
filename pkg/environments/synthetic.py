"""
Entornos sintéticos con verdad conocida

- SyntheticLogisticEnv: q_a(x) = mu(<theta*_a, x>)
- SyntheticExpertEnv: grilla de expertos de generación texto-imagen
"""

import logging
from typing import Optional, Sequence

import numpy as np

from core.errors import ConfigError
from core.rng import Purpose
from core.types import Arm, Context, one_hot_context
from environments.base import Environment
from environments.sampling import ContextSampler, sample_context
from estimators.glm import sigmoid

logger = logging.getLogger('costbandit.environments')

EXPERT_COSTS = (0.75, 1.37, 1.60, 12.50, 90.00)
EXPERT_CLEAN = 1.0
EXPERT_NOISY = 0.5


def bernoulli(prob: float, rng: np.random.Generator) -> int:
    return int(rng.random() < prob)


class SyntheticLogisticEnv(Environment):
    """Brazos logísticos con theta* conocido"""

    kind = "logistic"
    has_ground_truth = True

    def __init__(self, arms: Sequence[Arm], theta_star: np.ndarray, sampler: ContextSampler,
                 q_floor: Optional[float] = None):
        theta_star = np.atleast_2d(np.asarray(theta_star, dtype=float))
        super().__init__(arms, theta_star.shape[1])
        if theta_star.shape[0] != len(arms):
            raise ConfigError(
                f"theta_star tiene {theta_star.shape[0]} filas para {len(arms)} brazos", key="env.theta_star"
            )
        if sampler.dimension != self.dimension:
            raise ConfigError(f"el muestreador usa d={sampler.dimension}, theta* usa d={self.dimension}",
                              key="env.d")
        if q_floor is not None and not 0 < q_floor < 1:
            raise ConfigError("debe estar en (0, 1)", key="env.q_floor")

        self.theta_star = theta_star
        self.sampler = sampler
        self.q_floor = q_floor

    @classmethod
    def generate(cls, arms: Sequence[Arm], sampler: ContextSampler, rng: np.random.Generator,
                 theta_norm: float = 1.0, q_floor: Optional[float] = None) -> 'SyntheticLogisticEnv':
        """theta*_a con entradas normales estándar, reescalado a norma theta_norm"""
        if theta_norm <= 0:
            raise ConfigError("debe ser > 0", key="env.theta_norm")
        theta = rng.standard_normal((len(arms), sampler.dimension))
        norms = np.linalg.norm(theta, axis=1, keepdims=True)
        theta = theta_norm * theta / np.where(norms > 0, norms, 1.0)
        return cls(arms, theta, sampler, q_floor)

    def success_probs(self, context: Context) -> np.ndarray:
        probs = sigmoid(self.theta_star @ np.asarray(context, dtype=float))
        if self.q_floor is not None:
            probs = np.maximum(probs, self.q_floor)
        return np.atleast_1d(probs)

    def draw_context(self, step, streams):
        return sample_context(self.sampler, streams.stream(Purpose.CONTEXT, step), step)

    def pull(self, arm, context, step, round_index, streams):
        prob = self.success_probs(context)[arm]
        return bernoulli(prob, streams.stream(Purpose.REWARD, step, round_index))


def expert_success_matrix(num_types: int) -> np.ndarray:
    """q[i, j] = 1 si el experto i cubre el tipo j (i >= j), 0.5 si no"""
    experts = np.arange(num_types)[:, None]
    types = np.arange(num_types)[None, :]
    return np.where(experts >= types, EXPERT_CLEAN, EXPERT_NOISY)


def expert_arms(costs: Sequence[float] = EXPERT_COSTS) -> list:
    return [Arm(i, float(c), label=f"experto-{i + 1}") for i, c in enumerate(costs)]


class SyntheticExpertEnv(Environment):
    """
    Expertos de generación de imágenes

    El experto i genera imágenes limpias (recompensa 1) para los tipos de
    prompt 0..i y ruido con probabilidad 0.5 para el resto. El contexto es
    el one-hot del tipo, uniforme.
    """

    kind = "expert_t2i"
    has_ground_truth = True

    def __init__(self, arms: Optional[Sequence[Arm]] = None, num_types: int = 5):
        arms = list(arms) if arms is not None else expert_arms(EXPERT_COSTS[:num_types])
        if len(arms) != num_types:
            raise ConfigError(f"se esperaban {num_types} expertos, hay {len(arms)}", key="env.arms")
        super().__init__(arms, num_types)
        self.num_types = num_types
        self.success_matrix = expert_success_matrix(num_types)

    def prompt_type(self, context: Context) -> int:
        return int(np.argmax(context))

    def success_probs(self, context):
        return self.success_matrix[:, self.prompt_type(context)].copy()

    def draw_context(self, step, streams):
        rng = streams.stream(Purpose.CONTEXT, step)
        return one_hot_context(int(rng.integers(self.num_types)), self.num_types)

    def pull(self, arm, context, step, round_index, streams):
        prob = self.success_matrix[arm, self.prompt_type(context)]
        return bernoulli(prob, streams.stream(Purpose.REWARD, step, round_index))
