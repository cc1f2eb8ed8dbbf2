"""
Tests de tipos del dominio, errores y subflujos aleatorios
"""

import math

import numpy as np
import pytest

from core.errors import ArgumentError, ConfigError, DataError, NumericalError, TrialFailure
from core.rng import Purpose, RngStreams, trial_seed
from core.types import (Action, Arm, HyperParams, ObservationSet, Pull, StepRecord, TerminationReason,
                        make_context, normalize_context, one_hot_context, practical_alpha, step_utility,
                        validate_arm_set)


class TestContexts:
    """Construcción y validación de contextos"""

    def test_make_context_is_read_only(self):
        context = make_context([0.6, 0.8])
        assert context.shape == (2,)
        with pytest.raises(ValueError):
            context[0] = 1.0

    def test_make_context_rejects_outside_unit_ball(self):
        with pytest.raises(ArgumentError):
            make_context([1.0, 1.0])

    def test_make_context_tolerates_rounding(self):
        make_context([1.0 + 1e-10])

    def test_non_finite_context_is_data_error(self):
        with pytest.raises(DataError):
            make_context([float('nan'), 0.0])

    def test_normalize_projects_long_vectors(self):
        context = normalize_context([3.0, 4.0])
        assert np.allclose(context, [0.6, 0.8])

    def test_normalize_keeps_zero_vector(self):
        assert np.all(normalize_context([0.0, 0.0]) == 0.0)

    def test_normalize_rejects_infinite(self):
        with pytest.raises(DataError):
            normalize_context([float('inf')])

    def test_one_hot(self):
        assert list(one_hot_context(2, 4)) == [0.0, 0.0, 1.0, 0.0]
        with pytest.raises(ArgumentError):
            one_hot_context(4, 4)


class TestArmsAndActions:
    """Brazos, conjuntos de brazos y acciones"""

    def test_negative_cost_rejected(self):
        with pytest.raises(ArgumentError):
            Arm(0, -1.0)

    def test_arm_ids_must_be_contiguous(self):
        validate_arm_set([Arm(0, 1.0), Arm(1, 2.0)])
        with pytest.raises(ArgumentError):
            validate_arm_set([Arm(0, 1.0), Arm(2, 2.0)])
        with pytest.raises(ArgumentError):
            validate_arm_set([])

    def test_action_tags(self):
        assert Action.null().is_null
        assert str(Action.null()) == "Null"
        assert str(Action.pull(3)) == "Pull(3)"
        assert Action.pull(1) == Action.pull(1)
        assert Action.pull(1) != Action.null()


class TestObservationSet:
    """Buffers de regresión crecientes"""

    def test_add_grows_past_capacity(self):
        dataset = ObservationSet(2, capacity=1)
        for i in range(5):
            dataset.add([0.1 * i, 0.0], i % 2)
        assert len(dataset) == 5
        assert dataset.X.shape == (5, 2)
        assert list(dataset.y) == [0, 1, 0, 1, 0]

    def test_reward_must_be_binary(self):
        dataset = ObservationSet(1)
        with pytest.raises(DataError):
            dataset.add([0.5], 2)

    def test_dimension_mismatch(self):
        dataset = ObservationSet(2)
        with pytest.raises(ArgumentError):
            dataset.add([0.5], 1)


class TestStepRecord:
    """Registros de paso y utilidad"""

    def setup_method(self):
        self.context = make_context([1.0, 0.0])

    def _record(self, pulls, reason, lam=0.1):
        record = StepRecord(1, self.context, tuple(pulls), reason, 0.0)
        return StepRecord(1, self.context, tuple(pulls), reason, step_utility(record, lam))

    def test_utility_is_max_reward_minus_cost(self):
        record = self._record([Pull(0, 0, 1.0), Pull(1, 1, 2.0)], TerminationReason.SUCCESS)
        assert record.utility == pytest.approx(1.0 - 0.1 * 3.0)
        assert record.succeeded
        record.validate(tau_max=5, lam=0.1)

    def test_empty_step_has_zero_utility(self):
        record = self._record([], TerminationReason.NULL_CHOSEN)
        assert record.utility == 0.0
        assert record.total_cost == 0.0
        record.validate(tau_max=1, lam=0.1)

    def test_pull_after_success_is_invalid(self):
        record = self._record([Pull(0, 1, 1.0), Pull(0, 0, 1.0)], TerminationReason.SUCCESS)
        with pytest.raises(DataError):
            record.validate(tau_max=5, lam=0.1)

    def test_budget_exceeded_is_invalid(self):
        record = self._record([Pull(0, 0, 1.0)] * 3, TerminationReason.BUDGET_HIT)
        with pytest.raises(DataError):
            record.validate(tau_max=2, lam=0.1)

    def test_wrong_utility_is_invalid(self):
        record = StepRecord(1, self.context, (Pull(0, 1, 1.0),), TerminationReason.SUCCESS, 1.0)
        with pytest.raises(DataError):
            record.validate(tau_max=5, lam=0.1)


class TestHyperParams:
    """Hiperparámetros por defecto y validación"""

    def test_defaults(self):
        params = HyperParams()
        assert params.lam == 0.01
        assert params.tau_max == 5
        assert params.tau_exp == 1
        assert params.delta == 0.05
        assert params.kernel_sigma == 3.0

    def test_alpha_derived_from_delta(self):
        assert HyperParams().resolved_alpha(5) == pytest.approx(3.25525, abs=1e-4)
        assert HyperParams(alpha=2.0).resolved_alpha(5) == 2.0

    def test_practical_alpha_formula(self):
        assert practical_alpha(3, 0.1) == pytest.approx(math.sqrt(2 * math.log(60)))

    def test_invalid_value_names_key(self):
        with pytest.raises(ConfigError) as info:
            HyperParams(tau_max=0)
        assert info.value.key == "hyper.tau_max"
        assert info.value.exit_code == 2

    def test_overrides_keep_other_fields(self):
        params = HyperParams(lam=0.1).with_overrides(tau_max=8)
        assert params.lam == 0.1
        assert params.tau_max == 8

    def test_to_dict_uses_config_names(self):
        assert HyperParams().to_dict()['lambda'] == 0.01


class TestErrors:
    """Jerarquía de errores y contexto del trial"""

    def test_exit_codes(self):
        assert ConfigError("x").exit_code == 2
        assert DataError("x").exit_code == 3
        assert NumericalError("x").exit_code == 4
        assert isinstance(ArgumentError("x"), ValueError)

    def test_config_error_prefixes_key(self):
        error = ConfigError("clave desconocida", key="env.foo")
        assert str(error) == "env.foo: clave desconocida"
        assert error.reason == "clave desconocida"

    def test_numerical_error_reports_residual(self):
        assert "residuo=" in str(NumericalError("sin convergencia", residual=1e-3))

    def test_trial_failure_keeps_exit_code(self):
        failure = TrialFailure.from_error(DataError("traza agotada"), algorithm="greedy", seed=3, step=9)
        assert failure.exit_code == 3
        assert str(failure) == "[algoritmo=greedy, semilla=3, paso=9] traza agotada"

    def test_trial_failure_merges_context(self):
        inner = TrialFailure("fallo", 4, algorithm="promptwise", step=2)
        outer = TrialFailure.from_error(inner, seed=5)
        assert (outer.algorithm, outer.seed, outer.step, outer.exit_code) == ("promptwise", 5, 2, 4)


class TestRngStreams:
    """Subflujos aleatorios con contador"""

    def test_same_coordinates_same_draws(self):
        a = RngStreams(11).stream(Purpose.REWARD, 4, 2).random(3)
        b = RngStreams(11).stream(Purpose.REWARD, 4, 2).random(3)
        assert np.array_equal(a, b)

    def test_different_coordinates_differ(self):
        streams = RngStreams(11)
        a = streams.stream(Purpose.REWARD, 4, 2).random(3)
        b = streams.stream(Purpose.REWARD, 4, 3).random(3)
        c = streams.stream(Purpose.CONTEXT, 4, 2).random(3)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_negative_seed_rejected(self):
        with pytest.raises(ArgumentError):
            RngStreams(-1)

    def test_trial_seed(self):
        assert trial_seed(100, 3) == 103
