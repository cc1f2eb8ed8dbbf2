"""
Tests del oráculo, la familia PromptWise y los baselines
"""

from fractions import Fraction

import numpy as np
import pytest

from core.errors import ArgumentError, ConfigError, StateError
from core.rng import RngStreams
from core.types import Action, Arm, HyperParams, make_context
from environments.engine import run_step
from environments.sampling import ContextSampler, SamplerKind
from environments.synthetic import SyntheticLogisticEnv
from policies import ALGORITHMS, build_policy, uses_exploration
from policies.base import PolicyDecision, exploration_phase, should_stop
from policies.baselines import BaselineKind, BaselineView, baseline_decide
from policies.oracle import oracle_action
from policies.promptwise import PromptWisePerStep, promptwise_decide


def make_arms(costs):
    return [Arm(i, c) for i, c in enumerate(costs)]


class TestOracleAction:
    """Decisión cerrada del oráculo"""

    def test_null_when_no_arm_profitable(self):
        assert oracle_action([0.1, 0.2], [20.0, 30.0], 0.01).is_null

    def test_null_at_zero_gain(self):
        assert oracle_action([0.5], [50.0], 0.01).is_null

    def test_min_cost_per_success(self):
        # ratios 2.0, 1.37, 1.5
        assert oracle_action([0.5, 1.0, 0.5], [1.0, 1.37, 0.75], 0.01) == Action.pull(1)

    def test_ties_broken_by_cost_then_id(self):
        assert oracle_action([0.5, 1.0], [1.0, 2.0], 0.01) == Action.pull(0)
        assert oracle_action([0.5, 0.5], [1.0, 1.0], 0.01) == Action.pull(0)

    def test_zero_probability_arm_never_chosen(self):
        assert oracle_action([0.0, 0.5], [0.1, 10.0], 0.01) == Action.pull(1)

    def test_free_arm_with_zero_success_is_error(self):
        with pytest.raises(ArgumentError):
            oracle_action([0.0, 0.5], [0.0, 1.0], 0.01)

    def test_invalid_probabilities(self):
        with pytest.raises(ArgumentError):
            oracle_action([1.2], [1.0], 0.01)


class TestExplorationPhase:
    """Calendario de exploración"""

    def test_schedule_is_arm_major(self):
        assert exploration_phase([0, 1, 2], 2) == [0, 0, 1, 1, 2, 2]

    def test_horizon_too_short(self):
        with pytest.raises(ConfigError) as info:
            exploration_phase([0, 1, 2], 2, horizon=5)
        assert info.value.key == "horizon"

    def test_tau_exp_must_be_positive(self):
        with pytest.raises(ConfigError):
            exploration_phase([0], 0)


class TestPromptWiseDecide:
    """Regla de decisión por ronda"""

    def setup_method(self):
        self.params = HyperParams(lam=0.01, tau_max=3)

    def test_stops_after_success(self):
        decision = promptwise_decide([0.9], [1.0], self.params, 2, [1])
        assert decision.action.is_null

    def test_stops_when_budget_spent(self):
        decision = promptwise_decide([0.9], [1.0], self.params, 4, [0, 0, 0])
        assert decision.action.is_null

    def test_picks_lowest_ratio_and_reports_estimate(self):
        decision = promptwise_decide([0.5, 0.9], [1.0, 1.0], self.params, 1, [], arm_ids=[3, 7])
        assert decision.action == Action.pull(7)
        assert decision.predicted_success == 0.9

    def test_null_when_estimates_unprofitable(self):
        decision = promptwise_decide([0.05], [10.0], self.params, 1, [])
        assert decision == PolicyDecision.stop()

    def test_decision_consistency(self):
        with pytest.raises(ArgumentError):
            PolicyDecision(Action.pull(0))
        with pytest.raises(ArgumentError):
            PolicyDecision(Action.null(), 0.5)

    def test_should_stop(self):
        assert should_stop(2, [1], 5)
        assert should_stop(6, [0] * 5, 5)
        assert not should_stop(2, [0], 5)


class TestBaselineDecide:
    """Reglas de los baselines"""

    def setup_method(self):
        self.view = BaselineView(costs=[1.0, 5.0, 3.0], means=[0.4, 0.8, 0.8], tau_max=5,
                                 rng=np.random.default_rng(0))

    def test_greedy_prefers_mean_then_cost(self):
        decision = baseline_decide(BaselineKind.GREEDY, self.view, 1, [])
        assert decision.action == Action.pull(2)
        assert decision.predicted_success == 0.8

    def test_one_pull_rules_stop_after_first_round(self):
        for kind in (BaselineKind.GREEDY, BaselineKind.RANDOM, BaselineKind.LOWEST_COST,
                     BaselineKind.HIGHEST_COST):
            assert baseline_decide(kind, self.view, 2, [0]).action.is_null

    def test_retrying_rules_continue(self):
        assert not baseline_decide(BaselineKind.GTS, self.view, 2, [0]).action.is_null
        assert not baseline_decide(BaselineKind.RTS, self.view, 2, [0]).action.is_null

    def test_cost_rules(self):
        assert baseline_decide(BaselineKind.LOWEST_COST, self.view, 1, []).action == Action.pull(0)
        assert baseline_decide(BaselineKind.HIGHEST_COST, self.view, 1, []).action == Action.pull(1)

    def test_random_needs_generator(self):
        view = BaselineView(costs=[1.0], means=[0.5], tau_max=1)
        with pytest.raises(ArgumentError):
            baseline_decide(BaselineKind.RANDOM, view, 1, [])

    def test_ca_pak_uses_net_gain(self):
        view = BaselineView(costs=[1.0, 50.0], means=[1.0, 1.0], tau_max=5, lam=0.01, estimates=[0.5, 0.9])
        decision = baseline_decide(BaselineKind.CA_PAK_UCB_TS, view, 1, [])
        assert decision.action == Action.pull(0)
        assert decision.predicted_success == 0.5

    def test_ca_pak_never_chooses_null(self):
        view = BaselineView(costs=[100.0], means=[1.0], tau_max=5, lam=0.01, estimates=[0.1])
        assert baseline_decide(BaselineKind.CA_PAK_UCB_TS, view, 1, []).action == Action.pull(0)


class TestPolicyLifecycle:
    """Políticas conducidas a mano por el protocolo de pasos"""

    def setup_method(self):
        self.arms = make_arms([1.0, 2.0])
        self.params = HyperParams(tau_max=3, tau_exp=2)
        self.streams = RngStreams(0)
        self.context = make_context([0.6, 0.8])

    def test_registry(self):
        assert len(ALGORITHMS) == 11
        assert uses_exploration('promptwise')
        assert uses_exploration('ca_pak_ucb_ts')
        assert not uses_exploration('greedy')

    def test_unknown_policy(self):
        with pytest.raises(ConfigError):
            build_policy('ucb1', self.arms, 2, self.params, self.streams)

    def test_oracle_requires_truth(self):
        with pytest.raises(ConfigError):
            build_policy('oracle', self.arms, 2, self.params, self.streams)

    def test_exploration_steps_pull_once(self):
        policy = build_policy('promptwise', self.arms, 2, self.params, self.streams)
        policy.activate_arms([0, 1], 1, horizon=10)

        pulled = []
        for t in range(1, 5):
            policy.begin_step(t, self.context)
            decision = policy.decide_round(1, [])
            pulled.append(decision.action.arm)
            policy.observe(decision.action.arm, self.context, 0)
            assert policy.decide_round(2, [0]).action.is_null
            policy.end_step()

        assert pulled == [0, 0, 1, 1]
        assert policy.dataset_size(0) == 2
        assert policy.step_estimates() is None

    def test_perstep_repeats_frozen_arm(self):
        policy = build_policy('promptwise_perstep', self.arms, 2, self.params.with_overrides(tau_exp=1),
                              self.streams)
        assert isinstance(policy, PromptWisePerStep)
        policy.activate_arms([0, 1], 1)
        for t in (1, 2):
            policy.begin_step(t, self.context)
            arm = policy.decide_round(1, []).action.arm
            policy.observe(arm, self.context, 1)
            policy.end_step()

        policy.begin_step(3, self.context)
        first = policy.decide_round(1, [])
        policy.observe(first.action.arm, self.context, 0)
        second = policy.decide_round(2, [0])
        assert second == first
        assert policy.dataset_size(first.action.arm) == 1
        policy.end_step()
        assert policy.dataset_size(first.action.arm) == 2

    def test_step_protocol_enforced(self):
        policy = build_policy('greedy', self.arms, 2, self.params, self.streams)
        policy.activate_arms([0, 1], 1)
        with pytest.raises(StateError):
            policy.decide_round(1, [])
        policy.begin_step(1, self.context)
        with pytest.raises(StateError):
            policy.begin_step(2, self.context)

    def test_inactive_arm_observation(self):
        policy = build_policy('greedy', self.arms, 2, self.params, self.streams)
        policy.activate_arms([0], 1)
        policy.begin_step(1, self.context)
        with pytest.raises(StateError):
            policy.observe(1, self.context, 1)

    def test_oracle_policy_uses_truth(self):
        truth = lambda x: np.array([0.5, 1.0])
        policy = build_policy('oracle', self.arms, 2, self.params, self.streams, truth)
        policy.activate_arms([0, 1], 1)
        policy.begin_step(1, self.context)
        decision = policy.decide_round(1, [])
        assert decision.action == Action.pull(0)
        assert decision.predicted_success == 0.5
        assert list(policy.step_estimates()) == [0.5, 1.0]

    def test_promptwise_refits_pulled_arm_within_step(self):
        arms = make_arms([1.0, 1.05])
        policy = build_policy('promptwise', arms, 2, self.params.with_overrides(tau_exp=1), self.streams)
        policy.activate_arms([0, 1], 1)
        for t in (1, 2):
            policy.begin_step(t, self.context)
            arm = policy.decide_round(1, []).action.arm
            policy.observe(arm, self.context, 1)
            policy.end_step()

        policy.begin_step(3, self.context)
        start = policy.step_estimates()
        first = policy.decide_round(1, [])
        assert first.action == Action.pull(0)
        assert first.predicted_success == start[0]

        policy.observe(0, self.context, 0)
        assert policy.dataset_size(0) == 2
        refit = policy.estimators[0].ucb(self.context, policy.alpha)
        assert refit < start[0] - 0.05

        second = policy.decide_round(2, [0])
        assert second.action == Action.pull(1)
        assert second.predicted_success == start[1]
        assert np.array_equal(policy.step_estimates(), start)
        policy.end_step()

    def test_perstep_first_decision_matches_promptwise(self):
        rng = np.random.default_rng(3)
        arms = make_arms([1.0, 1.5, 3.0])
        params = self.params.with_overrides(tau_exp=2)
        policies = [build_policy(kind, arms, 2, params, self.streams)
                    for kind in ('promptwise', 'promptwise_perstep')]
        for policy in policies:
            policy.activate_arms([0, 1, 2], 1)

        history = [(make_context(rng.standard_normal(2)), int(rng.integers(2))) for _ in range(6)]
        for t, (context, reward) in enumerate(history, 1):
            for policy in policies:
                policy.begin_step(t, context)
                arm = policy.decide_round(1, []).action.arm
                policy.observe(arm, context, reward)
                policy.end_step()

        for t in range(7, 12):
            context = make_context(rng.standard_normal(2))
            decisions = []
            for policy in policies:
                policy.begin_step(t, context)
                decisions.append(policy.decide_round(1, []))
            assert decisions[0] == decisions[1]
            for policy, decision in zip(policies, decisions):
                policy.observe(decision.action.arm, context, 1)
                policy.end_step()

    def test_greedy_means_match_logged_records(self):
        params = HyperParams(lam=0.01, tau_max=3)
        sampler = ContextSampler(SamplerKind.UNIT_SPHERE, 2)
        env = SyntheticLogisticEnv(make_arms([1.0, 2.0, 4.0]), [[1.0, 0.0], [0.0, 1.0], [-0.6, 0.8]], sampler)
        policy = build_policy('greedy', env.arms, 2, params, self.streams)
        policy.activate_arms([0, 1, 2], 1)
        records = [run_step(env, policy, t, params, self.streams) for t in range(1, 61)]

        for arm in range(3):
            pulls = [p for record in records for p in record.pulls if p.arm == arm]
            assert len(pulls) == policy.pulls[arm]
            if pulls:
                expected = Fraction(sum(p.reward for p in pulls), len(pulls))
                assert Fraction(int(policy.successes[arm]), int(policy.pulls[arm])) == expected
                assert policy.empirical_mean(arm) == float(expected)


class TestOracleInvariances:
    """Propiedades del oráculo en instancias aleatorias"""

    def setup_method(self):
        self.rng = np.random.default_rng(11)

    def test_scaling_costs_and_lambda_keeps_choice(self):
        for _ in range(200):
            k = int(self.rng.integers(1, 6))
            probs = self.rng.uniform(0.05, 1.0, k)
            costs = self.rng.uniform(0.1, 20.0, k)
            lam = float(self.rng.uniform(0.001, 0.2))
            scale = float(self.rng.uniform(0.1, 10.0))
            assert oracle_action(probs, costs * scale, lam / scale) == oracle_action(probs, costs, lam)
