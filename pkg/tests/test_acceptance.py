"""
Chequeos de punta a punta en entornos sintéticos (lentos)

Correr con: pytest -m slow
"""

import os

import numpy as np
import pytest

from analysis.metrics import optimism_frequency, summarize, trailing_averages
from analysis.regret import mean_regret_curve
from config.settings import parse_config
from core.experiment_runner import run_trials

T2I_ORACLE_COST = 1.295875
T2I_ORACLE_SUCCESS = 0.98125

NUM_TRIALS = 10
LOGISTIC_HORIZON = 2000
T2I_HORIZON = 1500
JOBS = min(4, os.cpu_count() or 1)


def logistic_experiment(algorithms, horizon=LOGISTIC_HORIZON):
    return parse_config({
        'env': {'kind': 'logistic', 'd': 5, 'arms': [{'cost': 1.0}, {'cost': 2.0}, {'cost': 4.0}]},
        'algorithms': algorithms,
        'horizon': horizon,
        'num_trials': NUM_TRIALS,
        'root_seed': 0,
        'hyper': {'lambda': 0.01, 'tau_max': 5, 'delta': 0.05},
    })


def t2i_experiment(algorithms, horizon=T2I_HORIZON):
    return parse_config({
        'env': {'kind': 'expert_t2i'},
        'algorithms': algorithms,
        'horizon': horizon,
        'num_trials': NUM_TRIALS,
        'root_seed': 0,
        'hyper': {'lambda': 0.01, 'tau_max': 5},
    })


EXPERIMENTS = {
    'logistic': lambda: logistic_experiment(['promptwise', 'promptwise_perstep']),
    't2i': lambda: t2i_experiment(['oracle', 'promptwise', 'greedy', 'random']),
    't2i_short': lambda: t2i_experiment(['lowest_cost', 'highest_cost', 'ca_pak_ucb_ts', 'promptwise_perstep'],
                                        horizon=300),
}


@pytest.fixture(scope="module")
def trials():
    """Trials por (experimento, algoritmo), calculados una sola vez por módulo"""
    configs = {}
    cache = {}

    def get(experiment, label):
        if (experiment, label) not in cache:
            if experiment not in configs:
                configs[experiment] = EXPERIMENTS[experiment]()
            config = configs[experiment]
            algorithm = next(a for a in config.algorithms if a.label == label)
            cache[experiment, label] = run_trials(config, algorithm, "", JOBS)
        return cache[experiment, label]

    return get


@pytest.mark.slow
class TestLearningGuarantees:
    """Optimismo y regret sublineal en el entorno logístico"""

    def test_optimism_frequency(self, trials):
        assert optimism_frequency(trials('logistic', 'promptwise')) >= 0.85

    @pytest.mark.parametrize('label', ['promptwise', 'promptwise_perstep'])
    def test_regret_second_half_smaller(self, trials, label):
        mean_curve = mean_regret_curve(trials('logistic', label))
        middle = LOGISTIC_HORIZON // 2 - 1
        first_half = mean_curve[middle]
        second_half = mean_curve[-1] - mean_curve[middle]
        assert second_half < first_half


@pytest.mark.slow
class TestExpertGrid:
    """Grilla de expertos texto-imagen"""

    def test_oracle_reference_values(self, trials):
        averages = trailing_averages(trials('t2i', 'oracle'), T2I_HORIZON)
        assert averages['cost'] == pytest.approx(T2I_ORACLE_COST, rel=0.02)
        assert averages['success'] == pytest.approx(T2I_ORACLE_SUCCESS, abs=0.01)

    def test_promptwise_close_to_oracle(self, trials):
        promptwise = trials('t2i', 'promptwise')
        averages = trailing_averages(promptwise, 1000)
        assert abs(averages['cost'] - T2I_ORACLE_COST) <= 0.2 * T2I_ORACLE_COST
        assert abs(averages['success'] - T2I_ORACLE_SUCCESS) <= 0.03

        utility = summarize(promptwise).avg_utility
        assert utility > summarize(trials('t2i', 'greedy')).avg_utility
        assert utility > summarize(trials('t2i', 'random')).avg_utility

    def test_cost_baselines(self, trials):
        assert summarize(trials('t2i_short', 'lowest_cost')).avg_cost == pytest.approx(0.75)
        assert summarize(trials('t2i_short', 'highest_cost')).avg_cost >= 90.0

    def test_ca_pak_never_switches_within_step(self, trials):
        for trial in trials('t2i_short', 'ca_pak_ucb_ts'):
            for record in trial.steps:
                assert len({pull.arm for pull in record.pulls}) <= 1
                record.validate(5, 0.01)

    def test_perstep_never_switches_within_step(self, trials):
        for trial in trials('t2i_short', 'promptwise_perstep'):
            assert all(len({pull.arm for pull in record.pulls}) <= 1 for record in trial.steps)
