"""
Utilidades en forma cerrada y su simulación Monte Carlo
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from core.errors import ArgumentError
from policies.oracle import oracle_action


def optimal_utility(probs: Sequence[float], costs: Sequence[float], lam: float) -> float:
    """Utilidad esperada del oráculo: 1 - lambda c/q del brazo elegido, 0 si elige Null"""
    action = oracle_action(probs, costs, lam)
    if action.is_null:
        return 0.0
    return 1.0 - lam * costs[action.arm] / probs[action.arm]


def _check_arm(q: float, c: float, lam: float):
    if not 0 < q <= 1:
        raise ArgumentError(f"q debe estar en (0, 1] (recibido {q})")
    if c < 0 or lam < 0:
        raise ArgumentError("c y lambda deben ser >= 0")


def truncated_utility(q: float, c: float, lam: float, tau_max: int) -> float:
    """
    Utilidad esperada de repetir un brazo hasta el éxito o tau_max pulls

    1 - lambda c/q - (1 - q)^tau_max (q - lambda c)/q
    """
    _check_arm(q, c, lam)
    if tau_max < 1:
        raise ArgumentError(f"tau_max debe ser >= 1 (recibido {tau_max})")
    return 1.0 - lam * c / q - (1.0 - q) ** tau_max * (q - lam * c) / q


def expected_cost(q: float, c: float, tau_max: Optional[int] = None) -> float:
    """Costo esperado del mismo esquema; c/q sin presupuesto"""
    _check_arm(q, c, 0.0)
    if tau_max is None:
        return c / q
    return c * (1.0 - (1.0 - q) ** tau_max) / q


@dataclass
class MonteCarloEstimate:
    mean_utility: float
    stderr_utility: float
    mean_cost: float
    stderr_cost: float
    episodes: int


def simulate_keep_pulling(q: float, c: float, lam: float, tau_max: Optional[int],
                          episodes: int, rng: np.random.Generator) -> MonteCarloEstimate:
    """Simular episodios que repiten un brazo hasta el éxito (o hasta tau_max pulls)"""
    _check_arm(q, c, lam)
    if episodes < 2:
        raise ArgumentError("Se necesitan al menos 2 episodios")

    first_success = rng.geometric(q, size=episodes)
    if tau_max is None:
        pulls = first_success
        rewards = np.ones(episodes)
    else:
        pulls = np.minimum(first_success, tau_max)
        rewards = (first_success <= tau_max).astype(float)

    costs = c * pulls
    utilities = rewards - lam * costs
    scale = np.sqrt(episodes)
    return MonteCarloEstimate(
        mean_utility=float(utilities.mean()),
        stderr_utility=float(utilities.std(ddof=1) / scale),
        mean_cost=float(costs.mean()),
        stderr_cost=float(costs.std(ddof=1) / scale),
        episodes=episodes,
    )
