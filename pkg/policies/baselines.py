"""
Políticas de referencia para comparar con PromptWise
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from core.errors import ArgumentError
from core.rng import Purpose, RngStreams
from core.types import Action, Arm, HyperParams
from estimators.kernel import KernelLogisticEstimator, KernelSpec
from policies.base import Policy, PolicyDecision, pick_max, pick_min, should_stop

logger = logging.getLogger('costbandit.baselines')

OPTIMISTIC_MEAN = 1.0


class BaselineKind(Enum):
    GREEDY = "greedy"
    RANDOM = "random"
    RTS = "rts"
    GTS = "gts"
    LOWEST_COST = "lowest_cost"
    HIGHEST_COST = "highest_cost"
    CA_PAK_UCB_TS = "ca_pak_ucb_ts"

    @property
    def one_pull(self) -> bool:
        """Un solo pull por paso, sin reintentos"""
        return self in (BaselineKind.GREEDY, BaselineKind.RANDOM,
                        BaselineKind.LOWEST_COST, BaselineKind.HIGHEST_COST)


@dataclass
class BaselineView:
    """Lo que una regla de referencia ve en una ronda"""
    costs: Sequence[float]
    means: Sequence[float]
    tau_max: int
    lam: float = 0.01
    estimates: Optional[Sequence[float]] = None
    rng: Optional[np.random.Generator] = None


def baseline_decide(kind: BaselineKind, view: BaselineView, round_index: int,
                    rewards_so_far: Sequence[int]) -> PolicyDecision:
    """
    Aplicar la regla de una política de referencia

    Devuelve el índice del brazo dentro de view; predicted_success es la
    media empírica, o q-hat para CA PAK-UCB-tS.

    Raises:
        ArgumentError: Tipo desconocido o vista incompleta
    """
    if not isinstance(kind, BaselineKind):
        raise ArgumentError(f"Política de referencia desconocida: {kind!r}")
    if should_stop(round_index, rewards_so_far, view.tau_max):
        return PolicyDecision.stop()
    if kind.one_pull and round_index > 1:
        return PolicyDecision.stop()

    candidates = range(len(view.costs))
    costs = view.costs

    if kind in (BaselineKind.GREEDY, BaselineKind.GTS):
        choice = pick_max(candidates, view.means, costs)
    elif kind in (BaselineKind.RANDOM, BaselineKind.RTS):
        if view.rng is None:
            raise ArgumentError(f"{kind.value} necesita un generador aleatorio")
        choice = int(view.rng.integers(len(costs)))
    elif kind is BaselineKind.LOWEST_COST:
        choice = pick_min(candidates, costs, costs)
    elif kind is BaselineKind.HIGHEST_COST:
        choice = min(candidates, key=lambda i: (-costs[i], i))
    else:
        if view.estimates is None:
            raise ArgumentError("ca_pak_ucb_ts necesita estimaciones q-hat")
        gains = [view.estimates[i] - view.lam * costs[i] for i in candidates]
        choice = pick_max(candidates, gains, costs)
        return PolicyDecision(Action.pull(choice), float(view.estimates[choice]))

    return PolicyDecision(Action.pull(choice), float(view.means[choice]))


class BaselinePolicy(Policy):
    """Política de referencia con conteos de éxitos por brazo"""

    def __init__(self, kind: BaselineKind, arms: Sequence[Arm], dimension: int,
                 params: HyperParams, streams: RngStreams):
        super().__init__(arms, dimension, params, streams)
        self.kind = kind
        self.name = kind.value
        self.successes = np.zeros(len(self.arms), dtype=int)
        self.pulls = np.zeros(len(self.arms), dtype=int)

    def empirical_mean(self, arm: int) -> float:
        """Éxitos / pulls, con inicialización optimista 1.0"""
        if self.pulls[arm] == 0:
            return OPTIMISTIC_MEAN
        return self.successes[arm] / self.pulls[arm]

    def _view(self, round_index: int) -> BaselineView:
        rng = None
        if self.kind in (BaselineKind.RANDOM, BaselineKind.RTS):
            rng = self.streams.stream(Purpose.POLICY, self.step, round_index)
        return BaselineView(
            costs=[self.arms[a].cost for a in self.active],
            means=[self.empirical_mean(a) for a in self.active],
            tau_max=self.params.tau_max,
            lam=self.params.lam,
            rng=rng,
        )

    def _decide(self, round_index, rewards_so_far):
        decision = baseline_decide(self.kind, self._view(round_index), round_index, rewards_so_far)
        return self._to_arm_ids(decision)

    def _to_arm_ids(self, decision: PolicyDecision) -> PolicyDecision:
        if decision.action.is_null:
            return decision
        return PolicyDecision(Action.pull(self.active[decision.action.arm]), decision.predicted_success)

    def _on_observe(self, arm, context, reward):
        self.pulls[arm] += 1
        self.successes[arm] += reward

    def exploration_estimate(self, arm):
        return self.empirical_mean(arm)


class CaPakUcbTs(BaselinePolicy):
    """
    CA PAK-UCB-tS: argmax q-hat - lambda c al inicio del paso y repetir
    hasta el éxito o el presupuesto; nunca elige Null
    """

    explores = True

    def __init__(self, arms, dimension, params, streams):
        super().__init__(BaselineKind.CA_PAK_UCB_TS, arms, dimension, params, streams)
        spec = KernelSpec(sigma=params.kernel_sigma)
        self.estimators = {}
        for arm in self.arms:
            rng = streams.stream(Purpose.SUPPORT, arm.id) if params.max_support is not None else None
            self.estimators[arm.id] = KernelLogisticEstimator(
                dimension, spec, beta=params.kernel_beta, max_support=params.max_support, rng=rng
            )
        self._estimates = {}
        self._pending = []

    def _on_begin_step(self, context):
        self._estimates = {a: self.estimators[a].ucb(context, self.alpha) for a in self.active}

    def _view(self, round_index):
        view = super()._view(round_index)
        view.estimates = [self._estimates[a] for a in self.active]
        return view

    def _on_observe(self, arm, context, reward):
        super()._on_observe(arm, context, reward)
        self._pending.append((arm, context, reward))

    def _on_end_step(self):
        touched = set()
        for arm, context, reward in self._pending:
            self.estimators[arm].add(context, reward, refit=False)
            touched.add(arm)
        for arm in sorted(touched):
            self.estimators[arm].refit()
        self._pending = []

    def exploration_estimate(self, arm):
        return self.estimators[arm].ucb(self.context, self.alpha)

    def step_estimates(self):
        if self.exploring_arm is not None:
            return None
        return self._full_vector(self._estimates)
