"""
Curvas de regret
"""

from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np

from core.errors import ArgumentError, StateError

if TYPE_CHECKING:
    from environments.engine import TrialResult


class Benchmark(Enum):
    """Contra qué utilidad del oráculo se mide cada paso"""
    REPLAY = "replay"      # oráculo realizado con los mismos sorteos y el mismo tau_max
    EXPECTED = "expected"  # u*(x_t) sin truncar


def regret_curve(trial: 'TrialResult', benchmark: Benchmark = Benchmark.REPLAY) -> np.ndarray:
    """
    Regret acumulado por paso: cumsum(utilidad del oráculo - utilidad realizada)

    Con tau_max finito, EXPECTED suma además la pérdida por truncar de cada
    paso, (1 - q*)^tau (q* - lambda c*) / q*, que crece linealmente en T.

    Raises:
        StateError: Si el trial no tiene la serie del oráculo pedida
    """
    if benchmark is Benchmark.REPLAY:
        oracle = trial.per_step_oracle_replay
    else:
        oracle = trial.per_step_oracle_utility
    if oracle is None:
        raise StateError("El trial no tiene utilidades del oráculo (entorno sin verdad conocida)")
    increments = np.asarray(oracle, dtype=float) - trial.utilities
    return np.cumsum(increments)


def mean_regret_curve(trials: Sequence['TrialResult'], benchmark: Benchmark = Benchmark.REPLAY) -> np.ndarray:
    """Promedio entre semillas de las curvas de regret"""
    if not trials:
        raise ArgumentError("Se necesita al menos un trial")
    curves = [regret_curve(trial, benchmark) for trial in trials]
    if len({len(curve) for curve in curves}) != 1:
        raise ArgumentError("Los trials tienen horizontes distintos")
    return np.mean(curves, axis=0)
