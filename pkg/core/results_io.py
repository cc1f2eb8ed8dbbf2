"""
Persistencia de resultados

Esquema de los archivos (todos con separador de línea '\n' y números en
repr de Python, que se relee sin pérdida):

- <algoritmo>/trial_<k>.csv: una fila por pull
      trial,step,round,arm_id,reward,cost,cum_cost,terminated_by,step_utility
  Un paso sin pulls deja una fila con round=0 y arm_id, reward, cost vacíos.
- <algoritmo>/summary.json: MetricsSummary + config_digest
- curves.csv: promedios por paso de cada algoritmo + regret acumulado
- plot_avg_<métrica>.csv: algorithm,step,mean,stderr
- tradeoff.csv: una fila por (algoritmo, tau_max) del barrido
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Sequence, Union

import numpy as np

from analysis.metrics import METRICS, MetricsSummary, standard_error
from core.errors import DataError, StateError
from core.types import TerminationReason

if TYPE_CHECKING:
    from environments.engine import TrialResult

logger = logging.getLogger('costbandit.results')

TRIAL_COLUMNS = ('trial', 'step', 'round', 'arm_id', 'reward', 'cost', 'cum_cost', 'terminated_by', 'step_utility')
CURVE_COLUMNS = ('algorithm', 'step', 'avg_utility', 'avg_cost', 'avg_success', 'cum_regret')
PLOT_COLUMNS = ('algorithm', 'step', 'mean', 'stderr')
TRADEOFF_COLUMNS = ('algorithm', 'tau_max', 'avg_cost', 'avg_success', 'avg_utility', 'stderr_cost', 'stderr_success')

PLOT_PREFIX = 'plot_avg_'  # Settings.files['plot_prefix']


def fmt(value: Any) -> str:
    """Número en representación exacta; None como celda vacía"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _writer(handle):
    return csv.writer(handle, lineterminator='\n')


def trial_path(results_dir: Union[str, Path], label: str, trial_index: int) -> Path:
    return Path(results_dir) / label / f"trial_{trial_index}.csv"


def write_trial_csv(path: Union[str, Path], trial_index: int, trial: 'TrialResult') -> Path:
    """Escribir los pulls de un trial"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = _writer(f)
        writer.writerow(TRIAL_COLUMNS)
        for record in trial.steps:
            reason = record.terminated_by.value
            utility = fmt(record.utility)
            if not record.pulls:
                writer.writerow([trial_index, record.step_index, 0, "", "", "", fmt(0.0), reason, utility])
                continue

            paid = []
            for round_index, pull in enumerate(record.pulls, start=1):
                paid.append(pull.cost)
                writer.writerow([trial_index, record.step_index, round_index, pull.arm, pull.reward,
                                 fmt(pull.cost), fmt(math.fsum(paid)), reason, utility])
    return path


def read_trial_csv(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """
    Releer un CSV de trial como series por paso

    Returns:
        Dict con 'utility', 'cost' y 'success', una entrada por paso

    Raises:
        DataError: Cabecera distinta o pasos no consecutivos
    """
    path = Path(path)
    steps: Dict[int, Dict[str, float]] = {}
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if tuple(header or ()) != TRIAL_COLUMNS:
            raise DataError(f"{path}: cabecera inesperada {header}")
        for line_number, row in enumerate(reader, start=2):
            try:
                step = int(row[1])
                steps[step] = {
                    'utility': float(row[8]),
                    'cost': float(row[6]),
                    'success': float(row[7] == TerminationReason.SUCCESS.value),
                }
            except (IndexError, ValueError):
                raise DataError(f"{path}: fila {line_number} mal formada")

    if sorted(steps) != list(range(1, len(steps) + 1)):
        raise DataError(f"{path}: los pasos no son consecutivos desde 1")
    ordered = [steps[t] for t in range(1, len(steps) + 1)]
    return {metric: np.array([row[metric] for row in ordered]) for metric in METRICS}


def write_summary(path: Union[str, Path], summary: MetricsSummary, config_digest: str,
                  extra: Mapping[str, Any] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = summary.to_dict()
    payload['config_digest'] = config_digest
    payload.update(extra or {})
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def write_curves(path: Union[str, Path], summaries: Sequence[MetricsSummary]) -> Path:
    """curves.csv con las series promediadas de cada algoritmo"""
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = _writer(f)
        writer.writerow(CURVE_COLUMNS)
        for summary in summaries:
            for i in range(summary.horizon):
                regret = summary.regret_curve[i] if summary.regret_curve is not None else None
                writer.writerow([summary.algorithm, i + 1, fmt(summary.utility_curve[i]),
                                 fmt(summary.cost_curve[i]), fmt(summary.success_curve[i]), fmt(regret)])
    return path


def _algorithm_dirs(results_dir: Path) -> List[Path]:
    if not results_dir.is_dir():
        return []
    return sorted(d for d in results_dir.iterdir() if d.is_dir() and any(d.glob('trial_*.csv')))


def _trial_index(path: Path) -> int:
    return int(path.stem.split('_', 1)[1])


def load_results(results_dir: Union[str, Path]) -> Dict[str, Dict[str, np.ndarray]]:
    """
    Matrices trials x pasos por algoritmo, leídas desde disco

    Raises:
        StateError: Si el directorio no tiene resultados
        DataError: Trials con horizontes distintos
    """
    results_dir = Path(results_dir)
    dirs = _algorithm_dirs(results_dir)
    if not dirs:
        raise StateError(f"No hay resultados en {results_dir}")

    loaded = {}
    for directory in dirs:
        files = sorted(directory.glob('trial_*.csv'), key=_trial_index)
        series = [read_trial_csv(p) for p in files]
        horizons = {len(s['utility']) for s in series}
        if len(horizons) != 1:
            raise DataError(f"{directory}: trials con horizontes distintos {sorted(horizons)}")
        loaded[directory.name] = {metric: np.vstack([s[metric] for s in series]) for metric in METRICS}
    return loaded


def emit_plot_data(results_dir: Union[str, Path], prefix: str = PLOT_PREFIX) -> List[Path]:
    """
    Un CSV por métrica (algorithm, step, mean, stderr) a partir de los trials

    Las tres tablas comparten el mismo índice (algoritmo, paso).
    """
    results_dir = Path(results_dir)
    loaded = load_results(results_dir)

    written = []
    for metric in METRICS:
        path = results_dir / f"{prefix}{metric}.csv"
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = _writer(f)
            writer.writerow(PLOT_COLUMNS)
            for algorithm, matrices in loaded.items():
                matrix = matrices[metric]
                means = matrix.mean(axis=0)
                errors = standard_error(matrix)
                for i in range(matrix.shape[1]):
                    writer.writerow([algorithm, i + 1, fmt(means[i]), fmt(errors[i])])
        written.append(path)

    logger.info(f"Datos de gráficos: {len(loaded)} algoritmos en {results_dir}")
    return written


def write_tradeoff(path: Union[str, Path], rows: Sequence[Mapping[str, Any]]) -> Path:
    """tradeoff.csv del barrido de tau_max"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = _writer(f)
        writer.writerow(TRADEOFF_COLUMNS)
        for row in rows:
            writer.writerow([row['algorithm'], row['tau_max']] + [fmt(row[c]) for c in TRADEOFF_COLUMNS[2:]])
    return path
