"""
Políticas de decisión: oráculo, familia PromptWise y referencias
"""

from typing import Callable, Dict, Optional, Sequence

import numpy as np

from core.errors import ConfigError
from core.rng import RngStreams
from core.types import Arm, HyperParams
from policies.base import Policy, PolicyDecision, exploration_phase
from policies.baselines import BaselineKind, BaselinePolicy, CaPakUcbTs, baseline_decide
from policies.oracle import OraclePolicy, oracle_action
from policies.promptwise import PromptWise, PromptWiseKLR, PromptWisePerStep, promptwise_decide

ALGORITHMS: Dict[str, type] = {
    'oracle': OraclePolicy,
    'promptwise': PromptWise,
    'promptwise_perstep': PromptWisePerStep,
    'promptwise_klr': PromptWiseKLR,
    'greedy': BaselinePolicy,
    'random': BaselinePolicy,
    'rts': BaselinePolicy,
    'gts': BaselinePolicy,
    'lowest_cost': BaselinePolicy,
    'highest_cost': BaselinePolicy,
    'ca_pak_ucb_ts': CaPakUcbTs,
}


def uses_exploration(name: str) -> bool:
    """Si el algoritmo consume pasos de exploración al inicio"""
    return getattr(ALGORITHMS[name], 'explores', False)


def build_policy(name: str, arms: Sequence[Arm], dimension: int, params: HyperParams,
                 streams: RngStreams,
                 truth: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> Policy:
    """
    Instanciar una política por nombre

    Raises:
        ConfigError: Nombre desconocido u oráculo sin verdad del entorno
    """
    if name not in ALGORITHMS:
        raise ConfigError(f"algoritmo desconocido '{name}'", key="algorithms.name")

    if name == 'oracle':
        if truth is None:
            raise ConfigError("el oráculo necesita un entorno con probabilidades conocidas", key="algorithms.name")
        return OraclePolicy(arms, dimension, params, streams, truth)

    policy_class = ALGORITHMS[name]
    if policy_class is BaselinePolicy:
        return BaselinePolicy(BaselineKind(name), arms, dimension, params, streams)
    return policy_class(arms, dimension, params, streams)


__all__ = [
    'ALGORITHMS', 'BaselineKind', 'Policy', 'PolicyDecision', 'build_policy', 'baseline_decide',
    'exploration_phase', 'oracle_action', 'promptwise_decide', 'uses_exploration',
]
