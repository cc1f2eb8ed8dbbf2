"""
Resumen de métricas: utilidad, costo y éxito promedio por paso
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Optional, Sequence

import numpy as np

from analysis.regret import regret_curve
from core.errors import ArgumentError

if TYPE_CHECKING:
    from environments.engine import TrialResult

METRICS = ('utility', 'cost', 'success')
_SERIES = {'utility': 'utilities', 'cost': 'costs', 'success': 'successes'}


@dataclass
class MetricsSummary:
    """Promedios escalares y series por paso promediadas entre trials"""
    algorithm: str
    num_trials: int
    horizon: int
    avg_utility: float
    avg_cost: float
    avg_success: float
    utility_curve: np.ndarray
    cost_curve: np.ndarray
    success_curve: np.ndarray
    cum_regret: Optional[float] = None
    regret_curve: Optional[np.ndarray] = None

    def to_dict(self) -> Dict:
        return {
            'algorithm': self.algorithm,
            'num_trials': self.num_trials,
            'horizon': self.horizon,
            'avg_utility': self.avg_utility,
            'avg_cost': self.avg_cost,
            'avg_success': self.avg_success,
            'cum_regret': self.cum_regret,
        }


def _check_trials(trials: Sequence['TrialResult']) -> int:
    if not trials:
        raise ArgumentError("summarize necesita al menos un trial")
    horizons = {trial.horizon for trial in trials}
    if len(horizons) != 1:
        raise ArgumentError(f"Horizontes mezclados: {sorted(horizons)}")
    return horizons.pop()


def per_step_matrix(trials: Sequence['TrialResult'], metric: str) -> np.ndarray:
    """Matriz trials x pasos de una métrica ('utility', 'cost' o 'success')"""
    if metric not in METRICS:
        raise ArgumentError(f"Métrica desconocida: {metric}")
    _check_trials(trials)
    return np.vstack([getattr(trial, _SERIES[metric]) for trial in trials])


def summarize(trials: Sequence['TrialResult']) -> MetricsSummary:
    """
    Resumir trials de un mismo algoritmo

    Raises:
        ArgumentError: Lista vacía u horizontes mezclados
    """
    horizon = _check_trials(trials)
    utility = per_step_matrix(trials, 'utility')
    cost = per_step_matrix(trials, 'cost')
    success = per_step_matrix(trials, 'success')

    cum_regret = None
    mean_curve = None
    if all(trial.per_step_oracle_replay is not None for trial in trials):
        curves = np.vstack([regret_curve(trial) for trial in trials])
        mean_curve = curves.mean(axis=0)
        cum_regret = float(mean_curve[-1])

    return MetricsSummary(
        algorithm=trials[0].algorithm,
        num_trials=len(trials),
        horizon=horizon,
        avg_utility=float(utility.mean()),
        avg_cost=float(cost.mean()),
        avg_success=float(success.mean()),
        utility_curve=utility.mean(axis=0),
        cost_curve=cost.mean(axis=0),
        success_curve=success.mean(axis=0),
        cum_regret=cum_regret,
        regret_curve=mean_curve,
    )


def trailing_averages(trials: Sequence['TrialResult'], window: int) -> Dict[str, float]:
    """Promedios de las últimas `window` pasos, entre todos los trials"""
    horizon = _check_trials(trials)
    if not 1 <= window <= horizon:
        raise ArgumentError(f"window debe estar en [1, {horizon}] (recibido {window})")
    return {metric: float(per_step_matrix(trials, metric)[:, -window:].mean()) for metric in METRICS}


def standard_error(matrix: np.ndarray) -> np.ndarray:
    """Error estándar por columna: std muestral / sqrt(n); 0 con un solo trial"""
    n = matrix.shape[0]
    if n < 2:
        return np.zeros(matrix.shape[1])
    return matrix.std(axis=0, ddof=1) / np.sqrt(n)


def optimism_frequency(trials: Sequence['TrialResult']) -> float:
    """
    Fracción de pares (paso, brazo) con q-hat >= q fuera de la exploración

    Raises:
        ArgumentError: Si los trials no tienen estimaciones y verdad por paso
    """
    hits = 0
    total = 0
    for trial in trials:
        if trial.step_truth is None:
            raise ArgumentError("optimism_frequency necesita un entorno con verdad conocida")
        for estimates, truth in zip(trial.step_estimates, trial.step_truth):
            if estimates is None:
                continue
            mask = ~np.isnan(estimates) & ~np.isnan(truth)
            hits += int(np.sum(estimates[mask] >= truth[mask]))
            total += int(np.sum(mask))
    if total == 0:
        raise ArgumentError("No hay pasos con estimaciones")
    return hits / total
