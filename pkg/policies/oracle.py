"""
Política óptima con probabilidades conocidas

Null si ningún brazo tiene ganancia q - lambda c positiva; si no, el brazo
de menor costo por éxito c/q.
"""

from typing import Callable, Sequence

import numpy as np

from core.errors import ArgumentError
from core.rng import RngStreams
from core.types import Action, Arm, HyperParams
from policies.base import Policy, PolicyDecision, pick_min


def oracle_action(probs: Sequence[float], costs: Sequence[float], lam: float) -> Action:
    """
    Acción óptima del oráculo

    Args:
        probs: Probabilidad de éxito por brazo, en [0, 1]
        costs: Costo por brazo, >= 0
        lam: Coeficiente de costo, >= 0

    Returns:
        Action.null() o Action.pull(i) con i índice en las listas

    Raises:
        ArgumentError: Listas inválidas o brazo con q = 0 y c = 0
    """
    probs = np.asarray(probs, dtype=float)
    costs = np.asarray(costs, dtype=float)
    if probs.ndim != 1 or probs.size == 0 or probs.shape != costs.shape:
        raise ArgumentError("probs y costs deben ser listas no vacías de igual longitud")
    if np.any(probs < 0) or np.any(probs > 1) or not np.all(np.isfinite(probs)):
        raise ArgumentError("Las probabilidades deben estar en [0, 1]")
    if np.any(costs < 0) or not np.all(np.isfinite(costs)):
        raise ArgumentError("Los costos deben ser >= 0")
    if lam < 0:
        raise ArgumentError(f"lambda debe ser >= 0 (recibido {lam})")
    if np.any((probs == 0) & (costs == 0)):
        raise ArgumentError("Cociente c/q indefinido: brazo con q = 0 y c = 0")

    if np.max(probs - lam * costs) <= 0:
        return Action.null()

    # q = 0 con c > 0 nunca se elige
    candidates = [i for i in range(len(probs)) if probs[i] > 0]
    ratios = [costs[i] / probs[i] if probs[i] > 0 else np.inf for i in range(len(probs))]
    return Action.pull(pick_min(candidates, ratios, costs))


class OraclePolicy(Policy):
    """Juega la acción del oráculo con la verdad del entorno"""

    name = "oracle"

    def __init__(self, arms: Sequence[Arm], dimension: int, params: HyperParams, streams: RngStreams,
                 truth: Callable[[np.ndarray], np.ndarray]):
        super().__init__(arms, dimension, params, streams)
        self.truth = truth
        self._probs = None

    def _on_begin_step(self, context: np.ndarray):
        self._probs = np.asarray(self.truth(context), dtype=float)

    def _decide(self, round_index, rewards_so_far) -> PolicyDecision:
        probs = self._probs[self.active]
        action = oracle_action(probs, self.costs[self.active], self.params.lam)
        if action.is_null:
            return PolicyDecision.stop()
        arm_id = self.active[action.arm]
        return PolicyDecision(Action.pull(arm_id), float(self._probs[arm_id]))

    def step_estimates(self):
        if self._probs is None:
            return None
        return self._full_vector({a: self._probs[a] for a in self.active})
