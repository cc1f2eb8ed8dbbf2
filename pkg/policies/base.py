"""
Contrato común de las políticas

El motor llama begin_step, decide_round y observe por cada ronda, y end_step
al cerrar el paso. La base resuelve la terminación por éxito o presupuesto
y la fase de exploración.
"""

import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.errors import ArgumentError, ConfigError, StateError
from core.rng import RngStreams
from core.types import NULL_ACTION, Action, Arm, HyperParams

logger = logging.getLogger('costbandit.policies')


@dataclass(frozen=True)
class PolicyDecision:
    """Acción elegida y la probabilidad de éxito estimada que la justificó"""
    action: Action
    predicted_success: Optional[float] = None

    def __post_init__(self):
        if self.action.is_null and self.predicted_success is not None:
            raise ArgumentError("Una decisión Null no lleva predicted_success")
        if not self.action.is_null and self.predicted_success is None:
            raise ArgumentError(f"{self.action} requiere predicted_success")

    @classmethod
    def stop(cls) -> 'PolicyDecision':
        return cls(NULL_ACTION)


def should_stop(round_index: int, rewards_so_far: Sequence[int], tau_max: int) -> bool:
    """Terminación forzada: ya hubo éxito o se agotó el presupuesto de rondas"""
    return 1 in rewards_so_far or round_index > tau_max


def exploration_phase(arm_ids: Sequence[int], tau_exp: int, start_step: int = 1,
                      horizon: Optional[int] = None) -> List[int]:
    """
    Calendario de exploración: cada brazo tau_exp veces, un pull por contexto

    Args:
        arm_ids: Brazos a explorar, en orden
        tau_exp: Pulls de exploración por brazo
        start_step: Primer paso disponible para explorar
        horizon: Horizonte T; si se da, el calendario debe caber

    Returns:
        Lista de ids, un elemento por paso de exploración

    Raises:
        ConfigError: Si el horizonte no alcanza para la exploración
    """
    if tau_exp < 1:
        raise ConfigError("debe ser >= 1", key="hyper.tau_exp")

    schedule = [arm for arm in arm_ids for _ in range(tau_exp)]
    if horizon is not None and start_step + len(schedule) - 1 > horizon:
        raise ConfigError(
            f"el horizonte {horizon} no alcanza para {len(schedule)} pasos de exploración "
            f"desde el paso {start_step}",
            key="horizon",
        )
    return schedule


def pick_min(candidates: Sequence[int], values: Sequence[float], costs: Sequence[float]) -> int:
    """Índice del menor valor; empates por menor costo y luego menor id"""
    return min(candidates, key=lambda i: (values[i], costs[i], i))


def pick_max(candidates: Sequence[int], values: Sequence[float], costs: Sequence[float]) -> int:
    """Índice del mayor valor; empates por menor costo y luego menor id"""
    return min(candidates, key=lambda i: (-values[i], costs[i], i))


class Policy(ABC):
    """Agente de decisión de un trial"""

    name = "policy"
    explores = False  # Si tiene fase de exploración

    def __init__(self, arms: Sequence[Arm], dimension: int, params: HyperParams, streams: RngStreams):
        self.arms = list(arms)
        self.costs = np.array([arm.cost for arm in self.arms])
        self.dimension = dimension
        self.params = params
        self.streams = streams
        self.alpha = params.resolved_alpha(len(self.arms))

        self.active: List[int] = []
        self._exploration_queue = deque()
        self.exploring_arm: Optional[int] = None
        self.step = 0
        self.context: Optional[np.ndarray] = None
        self._in_step = False

    # --- ciclo de vida -------------------------------------------------

    def activate_arms(self, arm_ids: Sequence[int], step: int, horizon: Optional[int] = None):
        """Hacer visibles brazos nuevos; las políticas que exploran los encolan"""
        for arm_id in arm_ids:
            if not 0 <= arm_id < len(self.arms):
                raise ArgumentError(f"Brazo desconocido: {arm_id}")
            if arm_id in self.active:
                raise StateError(f"El brazo {arm_id} ya está activo")

        self.active.extend(arm_ids)
        self.active.sort()

        if self.explores and arm_ids:
            pending = len(self._exploration_queue)
            schedule = exploration_phase(arm_ids, self.params.tau_exp, step + pending, horizon)
            self._exploration_queue.extend(schedule)
            logger.debug(f"{self.name}: {len(schedule)} pasos de exploración encolados en el paso {step}")

    def begin_step(self, step: int, context: np.ndarray):
        if self._in_step:
            raise StateError("begin_step llamado sin cerrar el paso anterior")
        if not self.active:
            raise StateError("No hay brazos activos")
        self._in_step = True
        self.step = step
        self.context = context
        self.exploring_arm = self._exploration_queue.popleft() if self._exploration_queue else None
        if self.exploring_arm is None:
            self._on_begin_step(context)

    def decide_round(self, round_index: int, rewards_so_far: Sequence[int]) -> PolicyDecision:
        if not self._in_step:
            raise StateError("decide_round llamado fuera de un paso")
        if should_stop(round_index, rewards_so_far, self.params.tau_max):
            return PolicyDecision.stop()

        if self.exploring_arm is not None:
            if round_index > 1:
                return PolicyDecision.stop()
            return PolicyDecision(Action.pull(self.exploring_arm), self.exploration_estimate(self.exploring_arm))

        return self._decide(round_index, rewards_so_far)

    def observe(self, arm: int, context: np.ndarray, reward: int):
        if arm not in self.active:
            raise StateError(f"Observación de un brazo inactivo: {arm}")
        self._on_observe(arm, context, reward)

    def end_step(self):
        if not self._in_step:
            raise StateError("end_step llamado fuera de un paso")
        self._on_end_step()
        self._in_step = False

    # --- ganchos -------------------------------------------------------

    def _on_begin_step(self, context: np.ndarray):
        pass

    @abstractmethod
    def _decide(self, round_index: int, rewards_so_far: Sequence[int]) -> PolicyDecision:
        pass

    def _on_observe(self, arm: int, context: np.ndarray, reward: int):
        pass

    def _on_end_step(self):
        pass

    def exploration_estimate(self, arm: int) -> float:
        """Estimación reportada al explorar"""
        return 0.5

    def step_estimates(self) -> Optional[np.ndarray]:
        """Vector q-hat del inicio del paso (NaN en brazos inactivos), si la política lo calcula"""
        return None

    # --- utilidades ----------------------------------------------------

    def _full_vector(self, values: Dict[int, float]) -> np.ndarray:
        vector = np.full(len(self.arms), np.nan)
        for arm_id, value in values.items():
            vector[arm_id] = value
        return vector
