"""
Newton amortiguado con búsqueda lineal de Armijo

Usado por la MLE logística y por la regresión logística con kernel.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core.errors import NumericalError

logger = logging.getLogger('costbandit.newton')

ARMIJO_SLOPE = 1e-4
MIN_STEP = 1e-10


@dataclass
class NewtonResult:
    """Solución de una minimización"""
    solution: np.ndarray
    gradient_norm: float
    iterations: int


def newton_minimize(objective: Callable[[np.ndarray], float],
                    gradient: Callable[[np.ndarray], np.ndarray],
                    direction: Callable[[np.ndarray, np.ndarray], np.ndarray],
                    start: np.ndarray,
                    tol: float = 1e-8,
                    max_iter: int = 100,
                    accept_tol: float = 1e-6,
                    label: str = "newton") -> NewtonResult:
    """
    Minimizar una función convexa con pasos de Newton amortiguados

    Args:
        objective: Función a minimizar
        gradient: Gradiente exacto de objective
        direction: Dirección d con H·d = gradiente (se avanza hacia x - t·d)
        start: Punto inicial (warm start)
        tol: Norma de gradiente objetivo
        max_iter: Máximo de iteraciones
        accept_tol: Norma de gradiente aceptable si la búsqueda lineal se estanca
        label: Nombre para los mensajes de error

    Returns:
        NewtonResult con la solución y la norma final del gradiente
    """
    x = np.array(start, dtype=float)
    value = objective(x)
    grad = gradient(x)
    norm = float(np.linalg.norm(grad))
    iterations = 0

    while iterations < max_iter and norm > tol:
        iterations += 1
        step = direction(x, grad)
        slope = float(grad @ step)

        t = 1.0
        candidate = None
        while t >= MIN_STEP:
            trial = x - t * step
            trial_value = objective(trial)
            if trial_value <= value - ARMIJO_SLOPE * t * slope:
                candidate = trial
                break
            t *= 0.5

        if candidate is None:
            # Búsqueda lineal estancada por redondeo: paso completo si reduce el gradiente
            trial = x - step
            trial_grad = gradient(trial)
            trial_norm = float(np.linalg.norm(trial_grad))
            if trial_norm >= norm:
                break
            x, grad, norm = trial, trial_grad, trial_norm
            value = objective(x)
            continue

        x, value = candidate, trial_value
        grad = gradient(x)
        norm = float(np.linalg.norm(grad))

    # Pulido final
    if norm > tol:
        trial = x - direction(x, grad)
        trial_grad = gradient(trial)
        trial_norm = float(np.linalg.norm(trial_grad))
        if np.all(np.isfinite(trial)) and trial_norm < norm:
            x, norm = trial, trial_norm

    if not np.all(np.isfinite(x)):
        raise NumericalError(f"{label}: la solución contiene valores no finitos")
    if norm > accept_tol:
        raise NumericalError(
            f"{label}: sin convergencia tras {iterations} iteraciones", residual=norm
        )

    logger.debug(f"{label}: {iterations} iteraciones, |grad|={norm:.2e}")
    return NewtonResult(solution=x, gradient_norm=norm, iterations=iterations)
