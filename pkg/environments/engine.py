"""
Motor del protocolo de interacción

Por cada paso: el entorno saca un contexto, la política decide ronda a ronda
y el paso termina por Null, éxito o presupuesto de rondas.
"""

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from analysis.utility import optimal_utility
from core.errors import ConfigError, CostBanditError, StateError, TrialFailure
from core.rng import RngStreams
from core.types import Arm, HyperParams, Pull, StepRecord, TerminationReason, step_utility
from environments.base import Environment
from policies import build_policy, uses_exploration
from policies.base import Policy
from policies.oracle import oracle_action

logger = logging.getLogger('costbandit.engine')


@dataclass
class TrialResult:
    """
    Resultado de un trial: registros por paso y, si hay verdad, el oráculo

    per_step_oracle_utility es u*(x_t) sin truncar; per_step_oracle_replay es la
    utilidad realizada del oráculo con los mismos sorteos de recompensa y el
    mismo tau_max que la política.
    """
    algorithm: str
    steps: List[StepRecord]
    seed: int
    config_digest: str = ""
    per_step_oracle_utility: Optional[List[float]] = None
    per_step_oracle_replay: Optional[List[float]] = None
    step_estimates: List[Optional[np.ndarray]] = field(default_factory=list)
    step_truth: Optional[List[np.ndarray]] = None

    @property
    def horizon(self) -> int:
        return len(self.steps)

    @property
    def utilities(self) -> np.ndarray:
        return np.array([record.utility for record in self.steps])

    @property
    def costs(self) -> np.ndarray:
        return np.array([record.total_cost for record in self.steps])

    @property
    def successes(self) -> np.ndarray:
        return np.array([float(record.succeeded) for record in self.steps])


def run_step(env: Environment, policy: Policy, t: int, params: HyperParams,
             streams: RngStreams) -> StepRecord:
    """
    Ejecutar un paso completo del protocolo

    Returns:
        StepRecord validado

    Raises:
        DataError: Traza agotada
        StateError: La política jugó un brazo inactivo
    """
    context = env.draw_context(t, streams)
    policy.begin_step(t, context)

    pulls: List[Pull] = []
    rewards: List[int] = []
    round_index = 1
    while True:
        if rewards and rewards[-1] == 1:
            reason = TerminationReason.SUCCESS
            break
        if round_index > params.tau_max:
            reason = TerminationReason.BUDGET_HIT
            break

        decision = policy.decide_round(round_index, rewards)
        if decision.action.is_null:
            reason = TerminationReason.NULL_CHOSEN
            break

        arm = decision.action.arm
        if arm not in policy.active:
            raise StateError(f"La política eligió el brazo inactivo {arm}")

        reward = env.pull(arm, context, t, round_index, streams)
        pulls.append(Pull(arm, reward, float(env.costs[arm])))
        rewards.append(reward)
        policy.observe(arm, context, reward)
        round_index += 1

    policy.end_step()

    record = StepRecord(t, context, tuple(pulls), reason, 0.0)
    record = dataclasses.replace(record, utility=step_utility(record, params.lam))
    record.validate(params.tau_max, params.lam)
    return record


def replay_oracle(env: Environment, probs: np.ndarray, active: Sequence[int], context: np.ndarray, t: int,
                  params: HyperParams, streams: RngStreams) -> float:
    """
    Utilidad realizada del oráculo en el paso t

    Usa los subflujos de recompensa (t, ronda) de la política, así que donde
    ambos juegan el mismo brazo observan el mismo resultado.
    """
    active = list(active)
    action = oracle_action(probs[active], env.costs[active], params.lam)
    if action.is_null:
        return 0.0

    arm = active[action.arm]
    price = float(env.costs[arm])
    for round_index in range(1, params.tau_max + 1):
        if env.pull(arm, context, t, round_index, streams):
            return 1.0 - params.lam * math.fsum([price] * round_index)
    return -params.lam * math.fsum([price] * params.tau_max)


def check_schedule(arms: Sequence[Arm], tau_exp: int, horizon: int, explores: bool):
    """Verificar llegadas de brazos y que la exploración quepa en el horizonte"""
    if horizon < 1:
        raise ConfigError("debe ser >= 1", key="horizon")
    if not any(arm.available_from == 1 for arm in arms):
        raise ConfigError("al menos un brazo debe estar disponible desde el paso 1", key="env.arms")
    if not explores:
        return

    queue_end = 0
    for start in sorted({arm.available_from for arm in arms if arm.available_from <= horizon}):
        arriving = sum(1 for arm in arms if arm.available_from == start)
        queue_end = max(queue_end, start - 1) + arriving * tau_exp
        if queue_end > horizon:
            raise ConfigError(
                f"el horizonte {horizon} no alcanza para explorar los brazos que llegan en el paso {start}",
                key="horizon",
            )


def run_trial(env: Environment, policy_kind: str, params: HyperParams, horizon: int, seed: int,
              config_digest: str = "") -> TrialResult:
    """
    Ejecutar un trial determinista dado (configuración, semilla)

    Raises:
        ConfigError: Antes de ejecutar cualquier paso
        TrialFailure: Fallo durante un paso, con algoritmo, semilla y paso
    """
    streams = RngStreams(seed)
    truth = env.success_probs if env.has_ground_truth else None
    policy = build_policy(policy_kind, env.arms, env.dimension, params, streams, truth)
    check_schedule(env.arms, params.tau_exp, horizon, uses_exploration(policy_kind))

    steps: List[StepRecord] = []
    oracle_utilities: Optional[List[float]] = [] if truth else None
    oracle_replay: Optional[List[float]] = [] if truth else None
    step_truth: Optional[List[np.ndarray]] = [] if truth else None
    estimates: List[Optional[np.ndarray]] = []

    started = time.time()
    t = 0
    try:
        for t in range(1, horizon + 1):
            arrivals = [arm.id for arm in env.arms if arm.available_from == t]
            if arrivals:
                policy.activate_arms(arrivals, t, horizon)

            record = run_step(env, policy, t, params, streams)
            steps.append(record)
            estimates.append(policy.step_estimates())

            if truth:
                probs = np.asarray(truth(record.context), dtype=float)
                active = policy.active
                oracle_utilities.append(optimal_utility(probs[active], env.costs[active], params.lam))
                oracle_replay.append(replay_oracle(env, probs, active, record.context, t, params, streams))
                masked = np.full(env.num_arms, np.nan)
                masked[active] = probs[active]
                step_truth.append(masked)

    except CostBanditError as e:
        raise TrialFailure.from_error(e, algorithm=policy_kind, seed=seed, step=t)
    except np.linalg.LinAlgError as e:
        raise TrialFailure(f"Fallo de álgebra lineal: {e}", exit_code=4, algorithm=policy_kind,
                           seed=seed, step=t)

    logger.info(f"Trial {policy_kind} semilla={seed}: {horizon} pasos en {time.time() - started:.2f}s")
    return TrialResult(
        algorithm=policy_kind,
        steps=steps,
        seed=seed,
        config_digest=config_digest,
        per_step_oracle_utility=oracle_utilities,
        per_step_oracle_replay=oracle_replay,
        step_estimates=estimates,
        step_truth=step_truth,
    )
