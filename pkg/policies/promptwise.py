"""
Familia PromptWise

- PromptWise: reajusta el modelo del brazo tras cada pull dentro del paso
- PromptWisePerStep: congela la elección al inicio del paso y actualiza al cerrarlo
- PromptWiseKLR: igual que PromptWise con el predictor de kernel
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.rng import Purpose, RngStreams
from core.types import Action, Arm, HyperParams
from estimators.glm import LinearLogisticEstimator
from estimators.kernel import KernelLogisticEstimator, KernelSpec
from policies.base import Policy, PolicyDecision, should_stop
from policies.oracle import oracle_action

logger = logging.getLogger('costbandit.promptwise')


def promptwise_decide(estimates: Sequence[float], costs: Sequence[float], params: HyperParams,
                      round_index: int, rewards_so_far: Sequence[int],
                      arm_ids: Optional[Sequence[int]] = None) -> PolicyDecision:
    """
    Decisión de una ronda de PromptWise

    Null si ya hubo éxito, si se agotó el presupuesto o si ningún brazo tiene
    q-hat - lambda c > 0; si no, el brazo con menor c / q-hat.

    Args:
        estimates: q-hat UCB por brazo candidato
        costs: Costo por brazo candidato
        params: Hiperparámetros (lambda, tau_max)
        round_index: Ronda actual (1-based)
        rewards_so_far: Recompensas ya observadas en el paso
        arm_ids: Id real de cada candidato (por defecto su posición)
    """
    if should_stop(round_index, rewards_so_far, params.tau_max):
        return PolicyDecision.stop()

    action = oracle_action(estimates, costs, params.lam)
    if action.is_null:
        return PolicyDecision.stop()

    arm_id = action.arm if arm_ids is None else arm_ids[action.arm]
    return PolicyDecision(Action.pull(arm_id), float(estimates[action.arm]))


class PromptWise(Policy):
    """PromptWise con actualización dentro del paso"""

    name = "promptwise"
    explores = True

    def __init__(self, arms: Sequence[Arm], dimension: int, params: HyperParams, streams: RngStreams):
        super().__init__(arms, dimension, params, streams)
        self.estimators = {arm.id: self._make_estimator(arm.id) for arm in self.arms}
        self._estimates: Dict[int, float] = {}
        self._step_start: Dict[int, float] = {}

    def _make_estimator(self, arm_id: int):
        return LinearLogisticEstimator(self.dimension)

    def _ucb(self, arm_id: int, context: np.ndarray) -> float:
        return self.estimators[arm_id].ucb(context, self.alpha)

    def _on_begin_step(self, context):
        self._estimates = {a: self._ucb(a, context) for a in self.active}
        self._step_start = dict(self._estimates)

    def _decide(self, round_index, rewards_so_far):
        return promptwise_decide(
            [self._estimates[a] for a in self.active],
            self.costs[self.active],
            self.params,
            round_index,
            rewards_so_far,
            arm_ids=self.active,
        )

    def _on_observe(self, arm, context, reward):
        self.estimators[arm].add(context, reward, refit=True)
        if self.exploring_arm is None:
            self._estimates[arm] = self._ucb(arm, context)

    def exploration_estimate(self, arm):
        return self._ucb(arm, self.context)

    def step_estimates(self):
        if self.exploring_arm is not None:
            return None
        return self._full_vector(self._step_start)

    def dataset_size(self, arm: int) -> int:
        return self.estimators[arm].num_obs


class PromptWisePerStep(PromptWise):
    """Elige el brazo al inicio del paso y lo repite; los datos se actualizan al cerrar el paso"""

    name = "promptwise_perstep"

    def __init__(self, arms, dimension, params, streams):
        super().__init__(arms, dimension, params, streams)
        self._pending: List[Tuple[int, np.ndarray, int]] = []
        self._frozen: PolicyDecision = PolicyDecision.stop()

    def _on_begin_step(self, context):
        super()._on_begin_step(context)
        self._frozen = promptwise_decide(
            [self._estimates[a] for a in self.active],
            self.costs[self.active],
            self.params,
            1,
            [],
            arm_ids=self.active,
        )

    def _decide(self, round_index, rewards_so_far):
        return self._frozen

    def _on_observe(self, arm, context, reward):
        self._pending.append((arm, context, reward))

    def _on_end_step(self):
        touched = set()
        for arm, context, reward in self._pending:
            self.estimators[arm].add(context, reward, refit=False)
            touched.add(arm)
        for arm in sorted(touched):
            self.estimators[arm].refit()
        self._pending = []


class PromptWiseKLR(PromptWise):
    """PromptWise con regresión logística de kernel RBF"""

    name = "promptwise_klr"

    def _make_estimator(self, arm_id: int):
        rng = None
        if self.params.max_support is not None:
            rng = self.streams.stream(Purpose.SUPPORT, arm_id)
        return KernelLogisticEstimator(
            self.dimension,
            KernelSpec(sigma=self.params.kernel_sigma),
            beta=self.params.kernel_beta,
            max_support=self.params.max_support,
            rng=rng,
        )
