"""
Tests de regresión logística con kernel
"""

import math

import numpy as np
import pytest
from scipy.special import expit

from core.errors import ArgumentError, StateError
from estimators.kernel import (KernelLogisticEstimator, KernelSpec, KlrState, exploration_bonus, fit_klr,
                               gram_matrix, kernel_eval, klr_gradient, klr_objective, klr_predict)


class TestKernel:
    """Evaluación del kernel RBF"""

    def setup_method(self):
        self.spec = KernelSpec(sigma=3.0)

    def test_self_similarity_is_one(self):
        assert kernel_eval(self.spec, [0.3, 0.4], [0.3, 0.4]) == 1.0

    def test_value(self):
        expected = math.exp(-2.0 / 18.0)
        assert kernel_eval(self.spec, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(expected)

    def test_gram_matches_pointwise(self):
        points = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
        gram = gram_matrix(self.spec, points)
        for i in range(3):
            for j in range(3):
                assert gram[i, j] == pytest.approx(kernel_eval(self.spec, points[i], points[j]))

    def test_invalid_sigma(self):
        with pytest.raises(ArgumentError):
            KernelSpec(sigma=0.0)


class TestExplorationBonus:
    """Bono de varianza posterior"""

    def setup_method(self):
        self.spec = KernelSpec(sigma=3.0)
        self.x = np.array([0.6, 0.8])

    def test_worked_values(self):
        empty = KlrState(self.spec, 2, beta=1.0)
        one = KlrState.from_points(self.spec, [self.x], [1], beta=1.0)
        two = KlrState.from_points(self.spec, [self.x, self.x], [1, 0], beta=1.0)
        assert exploration_bonus(empty, self.x) == pytest.approx(1.0, abs=1e-6)
        assert exploration_bonus(one, self.x) == pytest.approx(0.707107, abs=1e-6)
        assert exploration_bonus(two, self.x) == pytest.approx(0.577350, abs=1e-6)

    def test_monotone_under_support_growth(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            d = int(rng.integers(1, 4))
            state = KlrState(self.spec, d, beta=float(rng.uniform(0.1, 2.0)))
            query = rng.uniform(-0.5, 0.5, d)
            previous = exploration_bonus(state, query)
            for _ in range(int(rng.integers(1, 6))):
                state.append(rng.uniform(-0.5, 0.5, d), int(rng.integers(2)))
                current = exploration_bonus(state, query)
                assert current <= previous + 1e-12
                previous = current


class TestKlrState:
    """Mantenimiento incremental de Cholesky"""

    def test_append_matches_full_factorization(self):
        spec = KernelSpec(sigma=1.5)
        rng = np.random.default_rng(4)
        points = rng.uniform(-0.5, 0.5, (6, 3))
        rewards = [1, 0, 1, 1, 0, 0]

        state = KlrState(spec, 3, beta=0.5)
        for point, reward in zip(points, rewards):
            state.append(point, reward)
        full = KlrState.from_points(spec, points, rewards, beta=0.5)

        assert np.allclose(state.gram, full.gram)
        assert np.allclose(state.chol, full.chol)
        assert len(state) == 6

    def test_append_dimension_checked(self):
        state = KlrState(KernelSpec(), 2)
        with pytest.raises(ArgumentError):
            state.append([0.1], 1)


class TestFitKlr:
    """Ajuste KLR regularizado"""

    def setup_method(self):
        self.spec = KernelSpec(sigma=3.0)

    def test_single_point_root(self):
        state = KlrState.from_points(self.spec, [[0.6, 0.8]], [1], beta=1.0)
        w = fit_klr(state)[0]
        assert -(1.0 - expit(w)) + 2.0 * w == pytest.approx(0.0, abs=1e-8)
        assert w == pytest.approx(0.2223, abs=1e-3)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        points = rng.uniform(-0.5, 0.5, (5, 2))
        state = KlrState.from_points(self.spec, points, [1, 0, 1, 0, 1], beta=0.7)
        w = rng.standard_normal(5)
        analytic = klr_gradient(state, w)
        h = 1e-6
        numeric = np.array([
            (klr_objective(state, w + h * e) - klr_objective(state, w - h * e)) / (2 * h)
            for e in np.eye(5)
        ])
        assert np.linalg.norm(numeric - analytic) <= 1e-4 * max(1.0, np.linalg.norm(analytic))

    def test_fit_reaches_stationary_point(self):
        rng = np.random.default_rng(6)
        state = KlrState.from_points(self.spec, rng.uniform(-0.5, 0.5, (8, 2)), [1, 1, 0, 1, 0, 0, 1, 1])
        weights = fit_klr(state)
        assert np.linalg.norm(klr_gradient(state, weights)) <= 1e-6
        assert np.array_equal(state.weights, weights)

    def test_empty_support_is_state_error(self):
        with pytest.raises(StateError):
            fit_klr(KlrState(self.spec, 2))

    def test_predict_rejects_negative_bonus(self):
        state = KlrState(self.spec, 2)
        with pytest.raises(ArgumentError):
            klr_predict(state, [0.0, 0.0], 1.0, -0.1)


class TestKernelLogisticEstimator:
    """Estimador KLR por brazo"""

    def test_support_cap_subsamples(self):
        estimator = KernelLogisticEstimator(2, KernelSpec(), max_support=4, rng=np.random.default_rng(0))
        rng = np.random.default_rng(1)
        for _ in range(10):
            estimator.add(rng.uniform(-0.5, 0.5, 2), int(rng.integers(2)))
        assert estimator.num_obs == 4

    def test_support_cap_requires_rng(self):
        with pytest.raises(ArgumentError):
            KernelLogisticEstimator(2, KernelSpec(), max_support=4)

    def test_ucb_above_prediction(self):
        estimator = KernelLogisticEstimator(2, KernelSpec())
        estimator.add(np.array([0.6, 0.8]), 1)
        x = np.array([0.0, 0.5])
        assert estimator.ucb(x, 1.0) > estimator.predict(x)
