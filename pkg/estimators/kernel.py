"""
Regresión logística con kernel (KLR)

Kernel RBF, estado de la matriz de Gram con Cholesky incremental,
ajuste regularizado y bono de exploración.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.special import expit

from core.errors import ArgumentError, NumericalError, StateError
from core.types import check_binary_reward
from estimators.glm import sigmoid
from estimators.newton import newton_minimize

logger = logging.getLogger('costbandit.kernel')

NEGATIVE_VARIANCE_TOLERANCE = 1e-10


class KernelKind(Enum):
    RBF = "rbf"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel y su ancho de banda"""
    kind: KernelKind = KernelKind.RBF
    sigma: float = 3.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ArgumentError(f"sigma debe ser > 0 (recibido {self.sigma})")


def kernel_eval(spec: KernelSpec, x: Sequence[float], y: Sequence[float]) -> float:
    """k(x, y) = exp(-|x - y|^2 / (2 sigma^2))"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ArgumentError(f"Dimensiones distintas en kernel_eval: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.exp(-(diff @ diff) / (2.0 * spec.sigma ** 2)))


def kernel_vector(spec: KernelSpec, points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vector (k(X_i, x))_i sobre los puntos del soporte"""
    if len(points) == 0:
        return np.zeros(0)
    diff = points - x[None, :]
    return np.exp(-np.einsum('ij,ij->i', diff, diff) / (2.0 * spec.sigma ** 2))


def gram_matrix(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    sq_norms = np.einsum('ij,ij->i', points, points)
    distances = np.maximum(sq_norms[:, None] + sq_norms[None, :] - 2.0 * points @ points.T, 0.0)
    gram = np.exp(-distances / (2.0 * spec.sigma ** 2))
    np.fill_diagonal(gram, 1.0)
    return gram


class KlrState:
    """
    Soporte, pesos y factor de Cholesky de (K + beta I) de un brazo

    append() extiende el factor con una actualización orlada en O(n^2).
    """

    def __init__(self, spec: KernelSpec, dimension: int, beta: float = 1.0):
        if beta <= 0:
            raise ArgumentError(f"beta debe ser > 0 (recibido {beta})")
        self.spec = spec
        self.dimension = dimension
        self.beta = beta
        self.points = np.zeros((0, dimension))
        self.rewards = np.zeros(0)
        self.weights = np.zeros(0)
        self.gram = np.zeros((0, 0))
        self.chol = np.zeros((0, 0))

    @classmethod
    def from_points(cls, spec: KernelSpec, points: np.ndarray, rewards: Sequence[int],
                    beta: float = 1.0, weights: Optional[np.ndarray] = None) -> 'KlrState':
        """Construir el estado factorizando (K + beta I) desde cero"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rewards = np.asarray([check_binary_reward(r) for r in rewards], dtype=float)
        if len(points) != len(rewards):
            raise ArgumentError("points y rewards deben tener la misma longitud")

        state = cls(spec, points.shape[1], beta)
        state.points = points.copy()
        state.rewards = rewards
        state.weights = np.zeros(len(points)) if weights is None else np.asarray(weights, dtype=float)
        if len(points):
            state.gram = gram_matrix(spec, points)
            state.chol = cholesky(state.gram + beta * np.eye(len(points)), lower=True)
        return state

    def __len__(self) -> int:
        return len(self.rewards)

    def append(self, x: Sequence[float], reward: int):
        """Agregar un punto al soporte; el peso nuevo arranca en cero"""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ArgumentError(f"Dimensión de contexto {x.shape} distinta de ({self.dimension},)")
        reward = check_binary_reward(reward)

        k = kernel_vector(self.spec, self.points, x)
        kxx = kernel_eval(self.spec, x, x)
        n = len(self)

        if n == 0:
            corner = np.sqrt(kxx + self.beta)
            self.chol = np.array([[corner]])
        else:
            border = solve_triangular(self.chol, k, lower=True)
            pivot = kxx + self.beta - border @ border
            if pivot <= 0:
                raise NumericalError("Pivote no positivo en la actualización de Cholesky", residual=pivot)
            chol = np.zeros((n + 1, n + 1))
            chol[:n, :n] = self.chol
            chol[n, :n] = border
            chol[n, n] = np.sqrt(pivot)
            self.chol = chol

        gram = np.empty((n + 1, n + 1))
        gram[:n, :n] = self.gram
        gram[n, :n] = k
        gram[:n, n] = k
        gram[n, n] = kxx
        self.gram = gram

        self.points = np.vstack([self.points, x[None, :]])
        self.rewards = np.append(self.rewards, float(reward))
        self.weights = np.append(self.weights, 0.0)

    def score(self, x: np.ndarray) -> float:
        """sum_X w_X k(X, x)"""
        return float(self.weights @ kernel_vector(self.spec, self.points, np.asarray(x, dtype=float)))


def klr_objective(state: KlrState, weights: np.ndarray) -> float:
    """Log-verosimilitud negativa más beta w'Kw"""
    f = state.gram @ weights
    return float(np.sum(np.logaddexp(0.0, f) - state.rewards * f) + state.beta * weights @ f)


def klr_gradient(state: KlrState, weights: np.ndarray) -> np.ndarray:
    """Gradiente exacto K (mu(Kw) - R + 2 beta w)"""
    f = state.gram @ weights
    return state.gram @ (expit(f) - state.rewards + 2.0 * state.beta * weights)


def fit_klr(state: KlrState, tol: float = 1e-8, max_iter: int = 100) -> np.ndarray:
    """
    Minimizar el objetivo KLR con Newton amortiguado

    Arranca desde state.weights (los pesos anteriores extendidos con ceros).
    Guarda el resultado en state.weights y lo devuelve.
    """
    if len(state) == 0:
        raise StateError("fit_klr necesita al menos un punto en el soporte")

    n = len(state)
    eye = np.eye(n)

    def objective(w):
        return klr_objective(state, w)

    def gradient(w):
        return klr_gradient(state, w)

    def direction(w, _grad):
        # H = K (W K + 2 beta I); resolver el factor derecho evita invertir K
        f = state.gram @ w
        mu = expit(f)
        inner = mu - state.rewards + 2.0 * state.beta * w
        system = (mu * (1.0 - mu))[:, None] * state.gram + 2.0 * state.beta * eye
        return np.linalg.solve(system, inner)

    result = newton_minimize(objective, gradient, direction, state.weights, tol=tol,
                             max_iter=max_iter, label="fit_klr")
    state.weights = result.solution
    return state.weights


def exploration_bonus(state: KlrState, x: Sequence[float]) -> float:
    """
    Bono beta^-1/2 (k(x,x) - k_x'(K + beta I)^-1 k_x)^1/2

    Con soporte vacío devuelve beta^-1/2 sqrt(k(x,x)).

    Raises:
        NumericalError: Si el radicando es menor que -1e-10
    """
    x = np.asarray(x, dtype=float)
    kxx = kernel_eval(state.spec, x, x)
    if len(state) == 0:
        return float(np.sqrt(kxx / state.beta))

    projected = solve_triangular(state.chol, kernel_vector(state.spec, state.points, x), lower=True)
    variance = kxx - projected @ projected
    if variance < -NEGATIVE_VARIANCE_TOLERANCE:
        raise NumericalError("Radicando negativo en el bono de exploración", residual=variance)
    return float(np.sqrt(max(variance, 0.0) / state.beta))


def klr_predict(state: KlrState, x: Sequence[float], alpha: float, bonus: float) -> float:
    """mu(sum_X w_X k(X, x) + alpha * bonus)"""
    if alpha < 0 or bonus < 0:
        raise ArgumentError("alpha y bonus deben ser >= 0")
    return sigmoid(state.score(x) + alpha * bonus)


class KernelLogisticEstimator:
    """Soporte KLR de un brazo con tope opcional de tamaño"""

    def __init__(self, dimension: int, spec: KernelSpec, beta: float = 1.0,
                 max_support: Optional[int] = None, rng: Optional[np.random.Generator] = None):
        if max_support is not None and rng is None:
            raise ArgumentError("max_support requiere un generador para submuestrear")
        self.state = KlrState(spec, dimension, beta)
        self.max_support = max_support
        self.rng = rng

    def add(self, x: np.ndarray, reward: int, refit: bool = True):
        self.state.append(x, reward)
        if self.max_support is not None and len(self.state) > self.max_support:
            self._subsample()
        if refit:
            self.refit()

    def _subsample(self):
        keep = np.sort(self.rng.choice(len(self.state), size=self.max_support, replace=False))
        old = self.state
        self.state = KlrState.from_points(old.spec, old.points[keep], old.rewards[keep].astype(int),
                                          old.beta, weights=old.weights[keep])
        logger.debug(f"Soporte KLR submuestreado a {self.max_support} puntos")

    def refit(self):
        if len(self.state):
            fit_klr(self.state)

    def ucb(self, x: np.ndarray, alpha: float) -> float:
        return klr_predict(self.state, x, alpha, exploration_bonus(self.state, x))

    def predict(self, x: np.ndarray) -> float:
        return klr_predict(self.state, x, 0.0, 0.0)

    @property
    def num_obs(self) -> int:
        return len(self.state)
