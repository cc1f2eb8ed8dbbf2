"""
Oráculo por iteración de valor sobre el MDP de tres estados

Estados: 0 (sin éxito todavía), 1 (éxito) y terminal. Solo el estado 0
tiene decisiones, así que basta iterar V(0).
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import ArgumentError, NumericalError
from core.types import Action

logger = logging.getLogger('costbandit.analysis')

TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class MdpOracleResult:
    value_at_zero: float
    best_action: Action
    iterations: int


def mdp_value_iteration(probs: Sequence[float], costs: Sequence[float], lam: float,
                        tol: float = 1e-12, max_iter: int = 100_000) -> MdpOracleResult:
    """
    Iterar V(0) <- max(0, max_a q_a - lambda c_a + (1 - q_a) V(0)) desde 0

    Raises:
        ArgumentError: Entradas inválidas
        NumericalError: Si no converge en max_iter iteraciones
    """
    probs = np.asarray(probs, dtype=float)
    costs = np.asarray(costs, dtype=float)
    if probs.ndim != 1 or probs.size == 0 or probs.shape != costs.shape:
        raise ArgumentError("probs y costs deben ser listas no vacías de igual longitud")
    if np.any(probs <= 0) or np.any(probs > 1):
        raise ArgumentError("Las probabilidades deben estar en (0, 1]")
    if tol <= 0:
        raise ArgumentError(f"tol debe ser > 0 (recibido {tol})")

    gains = probs - lam * costs
    value = 0.0
    residual = np.inf
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        updated = max(0.0, float(np.max(gains + (1.0 - probs) * value)))
        residual = abs(updated - value)
        value = updated
        if residual < tol:
            break
    else:
        raise NumericalError(f"Iteración de valor sin convergencia tras {max_iter} iteraciones",
                             residual=residual)

    q_values = gains + (1.0 - probs) * value
    if value <= 0.0 or np.max(q_values) <= 0.0:
        return MdpOracleResult(0.0, Action.null(), iterations)

    best = float(np.max(q_values))
    tied = [i for i in range(len(probs)) if q_values[i] >= best - TIE_TOLERANCE]
    arm = min(tied, key=lambda i: (costs[i], i))
    return MdpOracleResult(value, Action.pull(arm), iterations)
