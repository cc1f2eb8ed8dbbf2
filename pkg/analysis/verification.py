"""
Suite de verificación cruzada

Compara el oráculo en forma cerrada con la iteración de valor, las
utilidades cerradas con Monte Carlo y revisa la numérica de MLE y KLR.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from analysis.oracle_mdp import mdp_value_iteration
from analysis.theory import theory_params
from analysis.utility import expected_cost, optimal_utility, simulate_keep_pulling, truncated_utility
from core.types import ObservationSet, make_context
from estimators.glm import RIDGE, fit_mle, score
from estimators.kernel import KernelSpec, KlrState, exploration_bonus
from policies.oracle import oracle_action

logger = logging.getLogger('costbandit.verification')

LAMBDAS = (0.001, 0.01, 0.1)
STANDARD_ERRORS = 4.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0


def random_instance(rng: np.random.Generator):
    """Instancia (probs, costs, lambda) al azar"""
    num_arms = int(rng.integers(1, 6))
    probs = rng.uniform(0.05, 0.95, num_arms)
    costs = rng.uniform(0.1, 100.0, num_arms)
    lam = float(LAMBDAS[int(rng.integers(len(LAMBDAS)))])
    return probs, costs, lam


def has_ratio_tie(probs, costs, rel_tol: float = 1e-9) -> bool:
    ratios = np.sort(np.asarray(costs) / np.asarray(probs))
    return len(ratios) > 1 and bool(np.any(np.diff(ratios) <= rel_tol * ratios[1:]))


def check_oracle_equivalence(rng: np.random.Generator, instances: int = 1000) -> CheckResult:
    mismatches = 0
    worst = 0.0
    checked = 0
    for _ in range(instances):
        probs, costs, lam = random_instance(rng)
        if has_ratio_tie(probs, costs):
            continue
        checked += 1
        closed = oracle_action(probs, costs, lam)
        mdp = mdp_value_iteration(probs, costs, lam)
        gap = abs(optimal_utility(probs, costs, lam) - mdp.value_at_zero)
        worst = max(worst, gap)
        if closed != mdp.best_action or gap > 1e-9:
            mismatches += 1
    return CheckResult("oráculo vs iteración de valor", mismatches == 0,
                       f"{checked} instancias, {mismatches} discrepancias, |dU| máx {worst:.2e}")


def check_truncated_utility(rng: np.random.Generator, tuples: int = 20,
                            episodes: int = 1_000_000) -> CheckResult:
    cases = [(0.5, 1.0, 0.01, 5)]
    while len(cases) < tuples:
        cases.append((float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.1, 50.0)),
                      float(LAMBDAS[int(rng.integers(len(LAMBDAS)))]), int(rng.integers(1, 11))))

    failures = []
    for q, c, lam, tau in cases:
        estimate = simulate_keep_pulling(q, c, lam, tau, episodes, rng)
        closed = truncated_utility(q, c, lam, tau)
        if abs(estimate.mean_utility - closed) > STANDARD_ERRORS * max(estimate.stderr_utility, 1e-12):
            failures.append((q, c, lam, tau))
    worked = truncated_utility(0.5, 1.0, 0.01, 5)
    passed = not failures and abs(worked - 0.949375) < 1e-12
    return CheckResult("utilidad truncada vs Monte Carlo", passed,
                       f"{len(cases)} casos, {len(failures)} fuera de 4 EE, u(0.5,1,0.01,5)={worked:.6f}")


def check_expected_cost(rng: np.random.Generator, instances: int = 10,
                        episodes: int = 1_000_000) -> CheckResult:
    failures = 0
    done = 0
    while done < instances:
        probs, costs, lam = random_instance(rng)
        action = oracle_action(probs, costs, lam)
        if action.is_null:
            continue
        done += 1
        q, c = float(probs[action.arm]), float(costs[action.arm])
        estimate = simulate_keep_pulling(q, c, lam, None, episodes, rng)
        if abs(estimate.mean_cost - expected_cost(q, c)) > STANDARD_ERRORS * estimate.stderr_cost:
            failures += 1
    return CheckResult("costo esperado c/q", failures == 0, f"{instances} instancias, {failures} fuera de 4 EE")


def check_mle(rng: np.random.Generator, datasets: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(datasets):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(1, 21))
        pairs = []
        for _ in range(n):
            x = rng.standard_normal(d)
            x *= rng.uniform(0.0, 1.0) / max(np.linalg.norm(x), 1e-12)
            pairs.append((make_context(x), int(rng.integers(2))))
        dataset = ObservationSet.from_pairs(pairs)
        theta = fit_mle(dataset)
        worst = max(worst, float(np.linalg.norm(score(theta, dataset.X, dataset.y, RIDGE))))

    scalar = ObservationSet.from_pairs([([1.0], 1)] * 3 + [([1.0], 0)])
    theta = fit_mle(scalar, ridge=0.0)
    passed = worst <= 1e-6 and abs(theta[0] - math.log(3.0)) < 1e-4
    return CheckResult("MLE logística", passed, f"residuo máx {worst:.2e}, caso 3:1 theta={theta[0]:.6f}")


def check_klr_bonus() -> CheckResult:
    spec = KernelSpec(sigma=3.0)
    x = np.array([0.6, 0.8])
    empty = KlrState(spec, 2, beta=1.0)
    one = KlrState.from_points(spec, [x], [1], beta=1.0)
    two = KlrState.from_points(spec, [x, x], [1, 0], beta=1.0)
    values = [exploration_bonus(state, x) for state in (empty, one, two)]
    expected = [1.0, math.sqrt(0.5), math.sqrt(1.0 / 3.0)]
    passed = all(abs(v - e) < 1e-6 for v, e in zip(values, expected))
    return CheckResult("bono KLR", passed, ", ".join(f"{v:.6f}" for v in values))


def check_theory() -> CheckResult:
    params = theory_params(d=5, num_arms=5, T=10_000, delta=0.05, q0=0.5, kappa=1.0, tau_max=5)
    passed = abs(params.alpha_practical - 3.25525) < 1e-4 and params.tau_max_bound == 6
    return CheckResult("parámetros teóricos", passed,
                       f"alpha={params.alpha_practical:.5f}, cota tau_max={params.tau_max_bound}")


def run_verification(seed: int = 0, quick: bool = False) -> List[CheckResult]:
    """
    Ejecutar la suite completa

    Args:
        seed: Semilla de las instancias aleatorias
        quick: Menos episodios Monte Carlo (para pruebas rápidas)
    """
    rng = np.random.default_rng(seed)
    episodes = 20_000 if quick else 1_000_000
    checks: List[Callable[[], CheckResult]] = [
        lambda: check_oracle_equivalence(rng, 200 if quick else 1000),
        lambda: check_truncated_utility(rng, 5 if quick else 20, episodes),
        lambda: check_expected_cost(rng, 3 if quick else 10, episodes),
        lambda: check_mle(rng, 20 if quick else 100),
        check_klr_bonus,
        check_theory,
    ]

    results = []
    for check in checks:
        started = time.time()
        result = check()
        result.elapsed = time.time() - started
        logger.info(f"{result.name}: {'OK' if result.passed else 'FALLO'} ({result.detail})")
        results.append(result)
    return results
