"""
Subflujos aleatorios con contador

Cada (semilla de trial, propósito, paso, ronda) deriva su propio generador,
así la repetición es idéntica sin importar el orden de ejecución.
"""

from enum import IntEnum

import numpy as np

from core.errors import ArgumentError


class Purpose(IntEnum):
    """Uso del subflujo"""
    CONTEXT = 1
    REWARD = 2
    POLICY = 3
    THETA = 4
    SUPPORT = 5


class RngStreams:
    """Fábrica de generadores para un trial"""

    def __init__(self, seed: int):
        if seed < 0:
            raise ArgumentError(f"La semilla debe ser >= 0 (recibido {seed})")
        self.seed = int(seed)

    def stream(self, purpose: Purpose, step: int = 0, round_index: int = 0) -> np.random.Generator:
        entropy = [self.seed, int(purpose), int(step), int(round_index)]
        return np.random.default_rng(np.random.SeedSequence(entropy))


def trial_seed(root_seed: int, trial_index: int) -> int:
    """Semilla del trial k: root_seed + k"""
    return root_seed + trial_index
