"""
Muestreo de contextos
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from core.errors import ConfigError
from core.types import Context, make_context, one_hot_context


class SamplerKind(Enum):
    UNIT_SPHERE = "unit_sphere"
    ONE_HOT = "one_hot"
    CUSTOM = "custom"


@dataclass
class ContextSampler:
    """Distribución de contextos p0"""
    kind: SamplerKind
    dimension: int
    contexts: Optional[Sequence[Context]] = None  # Lista fija para CUSTOM

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigError(f"la dimensión debe ser >= 1 (recibido {self.dimension})", key="env.d")
        if self.kind is SamplerKind.CUSTOM:
            if not self.contexts:
                raise ConfigError("la lista de contextos está vacía", key="env.contexts")
            self.contexts = [make_context(c) for c in self.contexts]
            for context in self.contexts:
                if context.shape != (self.dimension,):
                    raise ConfigError(
                        f"contexto de dimensión {context.shape[0]}, se esperaba {self.dimension}",
                        key="env.contexts",
                    )


def sample_context(sampler: ContextSampler, rng: np.random.Generator, step: int = 1) -> Context:
    """
    Sacar un contexto

    UNIT_SPHERE: vector unitario uniforme; ONE_HOT: categoría uniforme;
    CUSTOM: recorre la lista en orden según el paso.
    """
    if sampler.kind is SamplerKind.UNIT_SPHERE:
        direction = rng.standard_normal(sampler.dimension)
        norm = np.linalg.norm(direction)
        while norm == 0:
            direction = rng.standard_normal(sampler.dimension)
            norm = np.linalg.norm(direction)
        return make_context(direction / norm)

    if sampler.kind is SamplerKind.ONE_HOT:
        return one_hot_context(int(rng.integers(sampler.dimension)), sampler.dimension)

    return sampler.contexts[(step - 1) % len(sampler.contexts)]
