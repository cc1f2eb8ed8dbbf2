"""
Calculadora de parámetros teóricos: alpha, cota de tau_max y largo de exploración
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

from core.errors import ArgumentError
from core.types import practical_alpha


@dataclass(frozen=True)
class TheoryParams:
    alpha_theorem: float
    alpha_practical: float
    tau_max_bound: int
    vacuous: bool  # d q0 / sqrt(T) >= 1: la cota no restringe tau_max
    tau_exp: Optional[int] = None
    inputs: Dict[str, float] = field(default_factory=dict)


def theory_params(d: int, num_arms: int, T: int, delta: float, q0: float, kappa: float,
                  tau_max: int, sigma0: Optional[float] = None, c_exp: float = 1.0) -> TheoryParams:
    """
    Parámetros de la garantía de regret

    alpha_theorem = kappa^-1 sqrt((d/2) ln(1 + 2 tau_max T / d) + ln(|A|/delta))
    tau_max_bound = ceil(ln(d q0 T^-1/2) / ln(1 - q0))
    tau_exp = ceil(C sigma0^-2 (d + ln(|A|/delta))), solo si se da sigma0
    """
    for name, value in (('d', d), ('num_arms', num_arms), ('T', T), ('kappa', kappa), ('tau_max', tau_max)):
        if not value > 0:
            raise ArgumentError(f"{name} debe ser > 0 (recibido {value})")
    if not 0 < delta < 1:
        raise ArgumentError(f"delta debe estar en (0, 1) (recibido {delta})")
    if not 0 < q0 < 1:
        raise ArgumentError(f"q0 debe estar en (0, 1) (recibido {q0})")
    if sigma0 is not None and sigma0 <= 0:
        raise ArgumentError(f"sigma0 debe ser > 0 (recibido {sigma0})")

    alpha_theorem = math.sqrt(
        (d / 2.0) * math.log(1.0 + 2.0 * tau_max * T / d) + math.log(num_arms / delta)
    ) / kappa

    ratio = d * q0 / math.sqrt(T)
    vacuous = ratio >= 1.0
    if vacuous:
        bound = 1
    else:
        bound = max(1, math.ceil(math.log(ratio) / math.log(1.0 - q0)))

    tau_exp = None
    if sigma0 is not None:
        tau_exp = math.ceil(c_exp * (d + math.log(num_arms / delta)) / sigma0 ** 2)

    return TheoryParams(
        alpha_theorem=alpha_theorem,
        alpha_practical=practical_alpha(num_arms, delta),
        tau_max_bound=bound,
        vacuous=vacuous,
        tau_exp=tau_exp,
        inputs={'d': d, 'num_arms': num_arms, 'T': T, 'delta': delta, 'q0': q0, 'kappa': kappa,
                'tau_max': tau_max},
    )
