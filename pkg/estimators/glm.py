"""
Modelo lineal-logístico por brazo

MLE regularizada, mantenimiento de la matriz de diseño y estimación UCB
de la probabilidad de éxito.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from core.errors import ArgumentError, StateError
from core.types import Observation, ObservationSet
from estimators.newton import newton_minimize

logger = logging.getLogger('costbandit.glm')

PROB_CLAMP = 1e-12
RIDGE = 1e-6           # Guarda contra datos separables
DESIGN_REG = 1e-6      # Regularizador de V en el bono
REFRESH_EVERY = 64     # Cada cuántas actualizaciones rank-1 se recalcula la inversa


def sigmoid(z: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Función logística recortada a [1e-12, 1 - 1e-12]"""
    value = np.clip(expit(z), PROB_CLAMP, 1.0 - PROB_CLAMP)
    if np.ndim(value) == 0:
        return float(value)
    return value


def log_likelihood(theta: np.ndarray, X: np.ndarray, y: np.ndarray, ridge: float = 0.0) -> float:
    """Log-verosimilitud Bernoulli menos la penalización ridge * |theta|^2"""
    z = X @ theta
    return float(np.sum(y * z - np.logaddexp(0.0, z)) - ridge * theta @ theta)


def score(theta: np.ndarray, X: np.ndarray, y: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Ecuación de score: sum (R - mu(x'theta)) x - 2 ridge theta"""
    return X.T @ (y - expit(X @ theta)) - 2.0 * ridge * theta


def fit_mle(dataset: ObservationSet, ridge: float = RIDGE,
            theta0: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Estimar theta por máxima verosimilitud

    Args:
        dataset: Observaciones del brazo
        ridge: Penalización contra separabilidad
        theta0: Punto inicial (estimación anterior)

    Returns:
        theta_hat con residuo de score <= 1e-6

    Raises:
        StateError: Si el dataset está vacío
        NumericalError: Si Newton no converge
    """
    if len(dataset) == 0:
        raise StateError("fit_mle necesita al menos una observación")

    X, y = dataset.X, dataset.y
    start = np.zeros(dataset.dimension) if theta0 is None else np.asarray(theta0, dtype=float)
    if start.shape != (dataset.dimension,):
        raise ArgumentError(f"theta0 con forma {start.shape}, se esperaba ({dataset.dimension},)")

    def objective(theta):
        return -log_likelihood(theta, X, y, ridge)

    def gradient(theta):
        return -score(theta, X, y, ridge)

    def direction(theta, grad):
        mu = expit(X @ theta)
        weights = mu * (1.0 - mu)
        hessian = (X * weights[:, None]).T @ X + 2.0 * ridge * np.eye(X.shape[1])
        if ridge > 0:
            return np.linalg.solve(hessian, grad)
        # Sin ridge el hessiano puede ser singular
        return np.linalg.lstsq(hessian, grad, rcond=None)[0]

    result = newton_minimize(objective, gradient, direction, start, label="fit_mle")
    return result.solution


class LogisticModel:
    """
    Estado del modelo lineal-logístico de un brazo

    design_matrix es V = sum x x' y design_inverse es (V + reg I)^-1,
    mantenida con actualizaciones de Sherman-Morrison.
    """

    def __init__(self, dimension: int, reg: float = DESIGN_REG):
        if dimension < 1:
            raise ArgumentError(f"La dimensión debe ser >= 1 (recibido {dimension})")
        if reg <= 0:
            raise ArgumentError("reg debe ser > 0; usar from_design para V invertible sin regularizar")
        self.dimension = dimension
        self.reg = reg
        self.theta_hat = np.zeros(dimension)
        self.design_matrix = np.zeros((dimension, dimension))
        self.design_inverse = np.eye(dimension) / reg
        self.num_obs = 0
        self._updates_since_refresh = 0

    @classmethod
    def from_design(cls, design_matrix: np.ndarray, theta_hat: Optional[np.ndarray] = None,
                    num_obs: int = 0, reg: float = DESIGN_REG) -> 'LogisticModel':
        """Construir un modelo a partir de V, invirtiendo (V + reg I) directamente"""
        design_matrix = np.atleast_2d(np.asarray(design_matrix, dtype=float))
        dimension = design_matrix.shape[0]
        if design_matrix.shape != (dimension, dimension):
            raise ArgumentError(f"La matriz de diseño debe ser cuadrada: {design_matrix.shape}")

        model = cls.__new__(cls)
        model.dimension = dimension
        model.reg = reg
        model.design_matrix = design_matrix.copy()
        model.design_inverse = np.linalg.inv(design_matrix + reg * np.eye(dimension))
        model.theta_hat = np.zeros(dimension) if theta_hat is None else np.asarray(theta_hat, dtype=float)
        model.num_obs = num_obs
        model._updates_since_refresh = 0
        return model

    def add_observation(self, obs: Observation) -> 'LogisticModel':
        """V <- V + x x' y actualización rank-1 de la inversa; theta_hat lo reajusta el llamador"""
        x = np.asarray(obs.context, dtype=float)
        if x.shape != (self.dimension,):
            raise ArgumentError(f"Dimensión de contexto {x.shape} distinta de ({self.dimension},)")

        self.design_matrix += np.outer(x, x)

        self._updates_since_refresh += 1
        if self._updates_since_refresh >= REFRESH_EVERY:
            self.design_inverse = np.linalg.inv(self.design_matrix + self.reg * np.eye(self.dimension))
            self._updates_since_refresh = 0
        else:
            projected = self.design_inverse @ x
            self.design_inverse -= np.outer(projected, projected) / (1.0 + x @ projected)

        self.design_inverse = 0.5 * (self.design_inverse + self.design_inverse.T)
        self.num_obs += 1
        return self

    def confidence_width(self, x: np.ndarray) -> float:
        """Norma ||x||_{V^-1} con la inversa regularizada"""
        return float(np.sqrt(max(x @ self.design_inverse @ x, 0.0)))


def ucb_estimate(model: LogisticModel, x: Sequence[float], alpha: float) -> float:
    """
    Estimación optimista mu(x'theta + alpha ||x||_{V^-1})

    Raises:
        ArgumentError: Si la dimensión de x no coincide o alpha < 0
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dimension,):
        raise ArgumentError(f"Dimensión de contexto {x.shape} distinta de ({model.dimension},)")
    if alpha < 0:
        raise ArgumentError(f"alpha debe ser >= 0 (recibido {alpha})")

    return sigmoid(float(x @ model.theta_hat) + alpha * model.confidence_width(x))


class LinearLogisticEstimator:
    """Datos y modelo de un brazo para PromptWise"""

    def __init__(self, dimension: int, ridge: float = RIDGE, reg: float = DESIGN_REG):
        self.dataset = ObservationSet(dimension)
        self.model = LogisticModel(dimension, reg)
        self.ridge = ridge

    def add(self, x: np.ndarray, reward: int, refit: bool = True):
        """Agregar una observación y, si se pide, reajustar theta"""
        obs = Observation(x, reward)
        self.dataset.add(obs.context, obs.reward)
        self.model.add_observation(obs)
        if refit:
            self.refit()

    def refit(self):
        if len(self.dataset) == 0:
            return
        self.model.theta_hat = fit_mle(self.dataset, self.ridge, theta0=self.model.theta_hat)

    def ucb(self, x: np.ndarray, alpha: float) -> float:
        return ucb_estimate(self.model, x, alpha)

    def predict(self, x: np.ndarray) -> float:
        return ucb_estimate(self.model, x, 0.0)

    @property
    def num_obs(self) -> int:
        return self.model.num_obs
