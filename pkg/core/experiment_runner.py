"""
Ejecución de experimentos

Corre cada (algoritmo, semilla) del experimento, escribe un CSV por trial y
reduce los resultados en summary.json y curves.csv.
"""

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from analysis.metrics import MetricsSummary, per_step_matrix, standard_error, summarize
from config.settings import AlgorithmConfig, EnvConfig, ExperimentConfig, Settings, sweep_configs
from core.errors import ConfigError, CostBanditError, TrialFailure
from core.results_io import trial_path, write_curves, write_summary, write_tradeoff, write_trial_csv
from core.rng import Purpose, RngStreams, trial_seed
from core.types import HyperParams
from environments.base import Environment
from environments.engine import TrialResult, run_trial
from environments.sampling import ContextSampler, SamplerKind
from environments.synthetic import SyntheticExpertEnv, SyntheticLogisticEnv
from environments.trace import TraceEnv, load_trace
from monitoring.metrics import MetricsCollector, get_metrics_collector

logger = logging.getLogger('costbandit.runner')

Progress = Callable[[str], None]


def config_digest(config: ExperimentConfig) -> str:
    """sha256 de la forma canónica de la configuración"""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def build_environment(env_config: EnvConfig, hyper: HyperParams, seed: int) -> Environment:
    """
    Construir el entorno de un trial

    Sin theta_star explícito, cada trial saca su propio theta* del flujo THETA.

    Raises:
        ConfigError: Especificación inconsistente
        DataError: Traza ilegible o incompleta para tau_max
    """
    if env_config.kind == 'logistic':
        sampler = ContextSampler(SamplerKind(env_config.sampler), env_config.d, env_config.contexts)
        if env_config.theta_star is not None:
            return SyntheticLogisticEnv(env_config.arms, env_config.theta_star, sampler, env_config.q_floor)
        rng = RngStreams(seed).stream(Purpose.THETA)
        return SyntheticLogisticEnv.generate(env_config.arms, sampler, rng, env_config.theta_norm,
                                             env_config.q_floor)

    if env_config.kind == 'expert_t2i':
        return SyntheticExpertEnv(env_config.arms or None, env_config.num_types)

    if env_config.kind == 'trace':
        rows = load_trace(env_config.trace_path)
        return TraceEnv(env_config.arms, rows, hyper.tau_max, env_config.order)

    raise ConfigError(f"tipo desconocido '{env_config.kind}'", key="env.kind")


def _run_one(env_config: EnvConfig, algorithm: AlgorithmConfig, horizon: int, seed: int,
             digest: str) -> Tuple:
    """Trabajador del pool: nunca lanza, devuelve ('ok', resultado) o ('error', código, mensaje)"""
    try:
        env = build_environment(env_config, algorithm.hyper, seed)
        result = run_trial(env, algorithm.name, algorithm.hyper, horizon, seed, digest)
        result.algorithm = algorithm.label
        return ('ok', result)
    except CostBanditError as e:
        failure = TrialFailure.from_error(e, algorithm=algorithm.label, seed=seed)
        return ('error', failure.exit_code, str(failure))


@dataclass
class ExperimentOutcome:
    """Resúmenes por algoritmo y rutas escritas"""
    output_dir: Path
    config_digest: str
    summaries: Dict[str, MetricsSummary] = field(default_factory=dict)
    trials: Dict[str, List[TrialResult]] = field(default_factory=dict)
    files: List[Path] = field(default_factory=list)


def run_trials(config: ExperimentConfig, algorithm: AlgorithmConfig, digest: str,
               jobs: int = 1) -> List[TrialResult]:
    """
    Correr los trials de un algoritmo, en paralelo si jobs > 1

    Raises:
        TrialFailure: El primer trial fallido (en orden de semilla)
    """
    seeds = [trial_seed(config.root_seed, k) for k in range(config.num_trials)]
    args = [(config.env, algorithm, config.horizon, seed, digest) for seed in seeds]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, *zip(*args)))
    else:
        outcomes = [_run_one(*a) for a in args]

    results = []
    for outcome in outcomes:
        if outcome[0] == 'error':
            _, exit_code, message = outcome
            raise TrialFailure(message, exit_code)
        results.append(outcome[1])
    return results


def run_experiment(config: ExperimentConfig, jobs: int = 1, settings: Optional[Settings] = None,
                   progress: Optional[Progress] = None) -> ExperimentOutcome:
    """
    Ejecutar el experimento completo y escribir los resultados

    Raises:
        TrialFailure: Con algoritmo, semilla y paso del fallo
    """
    settings = settings or Settings()
    if jobs < 1:
        raise ConfigError(f"debe ser >= 1 (recibido {jobs})", key="jobs")

    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    digest = config_digest(config)
    metrics = get_metrics_collector(output_dir / settings.files['monitoring_dir'])
    outcome = ExperimentOutcome(output_dir, digest)

    try:
        _run_algorithms(config, jobs, settings, progress, digest, metrics, outcome)
    finally:
        metrics.close()
    return outcome


def _run_algorithms(config: ExperimentConfig, jobs: int, settings: Settings, progress: Optional[Progress],
                    digest: str, metrics: MetricsCollector, outcome: ExperimentOutcome):
    output_dir = outcome.output_dir
    for algorithm in config.algorithms:
        if progress:
            progress(f"{algorithm.label}: {config.num_trials} trials x {config.horizon} pasos")
        started = time.time()
        try:
            trials = run_trials(config, algorithm, digest, jobs)
        except TrialFailure as e:
            metrics.log_error('trial', str(e), {'algorithm': algorithm.label})
            raise

        elapsed = time.time() - started
        for k, trial in enumerate(trials):
            path = write_trial_csv(trial_path(output_dir, algorithm.label, k), k, trial)
            outcome.files.append(path)
            metrics.log_trial(trial, elapsed / len(trials), algorithm.label)

        summary = summarize(trials)
        extra = {'name': algorithm.name, 'hyper': algorithm.hyper.to_dict(), 'root_seed': config.root_seed}
        path = output_dir / algorithm.label / settings.files['summary']
        outcome.files.append(write_summary(path, summary, digest, extra))
        outcome.summaries[algorithm.label] = summary
        outcome.trials[algorithm.label] = trials
        logger.info(f"{algorithm.label}: utilidad media {summary.avg_utility:.6f} en {elapsed:.2f}s")

    outcome.files.append(write_curves(output_dir / settings.files['curves'], list(outcome.summaries.values())))
    metrics.save_current_state()


def tradeoff_rows(tau_max: int, outcome: ExperimentOutcome) -> List[Dict]:
    rows = []
    for label, summary in outcome.summaries.items():
        trials = outcome.trials[label]
        cost = per_step_matrix(trials, 'cost').mean(axis=1)
        success = per_step_matrix(trials, 'success').mean(axis=1)
        rows.append({
            'algorithm': label,
            'tau_max': tau_max,
            'avg_cost': summary.avg_cost,
            'avg_success': summary.avg_success,
            'avg_utility': summary.avg_utility,
            'stderr_cost': float(standard_error(cost[:, None])[0]),
            'stderr_success': float(standard_error(success[:, None])[0]),
        })
    return rows


def run_sweep(config: ExperimentConfig, values: Optional[Sequence[int]] = None, jobs: int = 1,
              settings: Optional[Settings] = None, progress: Optional[Progress] = None) -> Path:
    """
    Barrido de tau_max: un experimento por valor y tradeoff.csv en output_dir

    Los errores estándar se calculan sobre los promedios por trial.
    """
    settings = settings or Settings()
    rows = []
    for tau, variant in sweep_configs(config, values).items():
        if progress:
            progress(f"tau_max={tau}")
        rows.extend(tradeoff_rows(tau, run_experiment(variant, jobs, settings, progress)))

    path = write_tradeoff(Path(config.output_dir) / settings.files['tradeoff'], rows)
    logger.info(f"Barrido terminado: {len(rows)} filas en {path}")
    return path
