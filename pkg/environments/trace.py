"""
Repetición de trazas grabadas

Formato JSONL, una fila por tarea:
    {"context": [...], "outcomes": {"<arm_id>": [0, 1, ...]}, "label": "..."}

El n-ésimo pull del brazo a en la fila k devuelve siempre el bit (k, a, n).
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.errors import ConfigError, DataError
from core.rng import Purpose
from core.types import Arm, Context, check_binary_reward, normalize_context
from environments.base import Environment

logger = logging.getLogger('costbandit.trace')

TRACE_ORDERS = ('random', 'sequential')


@dataclass(frozen=True)
class TraceRow:
    context: Context
    outcomes: Dict[int, Tuple[int, ...]]
    label: str = ""


def _parse_row(line: str, line_number: int) -> TraceRow:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as e:
        raise DataError(f"línea {line_number}: JSON inválido ({e.msg})")

    if not isinstance(raw, dict) or 'context' not in raw or 'outcomes' not in raw:
        raise DataError(f"línea {line_number}: se esperan las claves 'context' y 'outcomes'")
    unknown = set(raw) - {'context', 'outcomes', 'label'}
    if unknown:
        raise DataError(f"línea {line_number}: claves desconocidas {sorted(unknown)}")

    try:
        context = normalize_context(raw['context'])
    except (TypeError, ValueError) as e:
        raise DataError(f"línea {line_number}: contexto inválido ({e})")
    except DataError as e:
        raise DataError(f"línea {line_number}: {e.message}")

    if not isinstance(raw['outcomes'], dict):
        raise DataError(f"línea {line_number}: 'outcomes' debe ser un objeto")

    outcomes = {}
    for key, bits in raw['outcomes'].items():
        try:
            arm_id = int(key)
            outcomes[arm_id] = tuple(check_binary_reward(b) for b in bits)
        except (TypeError, ValueError):
            raise DataError(f"línea {line_number}: resultados inválidos para el brazo '{key}'")
        except DataError as e:
            raise DataError(f"línea {line_number}, brazo {key}: {e.message}")

    return TraceRow(context, outcomes, str(raw.get('label', "")))


def load_trace(path: Union[str, Path]) -> List[TraceRow]:
    """
    Leer un archivo de traza JSONL

    Raises:
        DataError: Archivo ilegible o fila mal formada (indica la línea)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise DataError(f"No se pudo leer la traza {path}: {e.strerror}")

    rows = []
    for number, line in enumerate(text.splitlines(), 1):
        if line.strip():
            rows.append(_parse_row(line, number))

    if not rows:
        raise DataError(f"La traza {path} no tiene filas")

    logger.info(f"Traza cargada: {path} ({len(rows)} filas)")
    return rows


def check_trace(rows: Sequence[TraceRow], num_arms: int, tau_max: int) -> List[str]:
    """Problemas que impiden repetir la traza con tau_max rondas (lista vacía si es válida)"""
    problems = []
    if not rows:
        return ["la traza no tiene filas"]

    dimension = rows[0].context.shape[0]
    for k, row in enumerate(rows):
        if row.context.shape[0] != dimension:
            problems.append(f"fila {k}: dimensión {row.context.shape[0]}, se esperaba {dimension}")
        for arm in range(num_arms):
            bits = row.outcomes.get(arm)
            if bits is None:
                problems.append(f"fila {k}: faltan resultados del brazo {arm}")
            elif len(bits) < tau_max:
                problems.append(f"fila {k}: brazo {arm} tiene {len(bits)} resultados, se necesitan {tau_max}")
        extra = sorted(set(row.outcomes) - set(range(num_arms)))
        if extra:
            problems.append(f"fila {k}: brazos desconocidos {extra}")

    return problems


class TraceEnv(Environment):
    """Entorno sin verdad conocida que repite resultados pregrabados"""

    kind = "trace"
    has_ground_truth = False

    def __init__(self, arms: Sequence[Arm], rows: Sequence[TraceRow], tau_max: int, order: str = "random"):
        if order not in TRACE_ORDERS:
            raise ConfigError(f"orden desconocido '{order}'", key="env.order")
        if not rows:
            raise DataError("La traza no tiene filas")
        super().__init__(arms, rows[0].context.shape[0])

        problems = check_trace(rows, len(arms), tau_max)
        if problems:
            raise DataError(f"Traza inválida: {problems[0]} ({len(problems)} problemas)")

        self.rows = list(rows)
        self.order = order
        self.row_index: Optional[int] = None
        self._pull_counts: Dict[int, int] = {}

    def draw_context(self, step, streams):
        if self.order == 'sequential':
            if step > len(self.rows):
                raise DataError(f"Traza agotada: paso {step} con {len(self.rows)} filas")
            self.row_index = step - 1
        else:
            self.row_index = int(streams.stream(Purpose.CONTEXT, step).integers(len(self.rows)))

        self._pull_counts = {}
        return self.rows[self.row_index].context

    def pull(self, arm, context, step, round_index, streams):
        if self.row_index is None:
            raise DataError("pull antes de sacar un contexto de la traza")
        n = self._pull_counts.get(arm, 0)
        bits = self.rows[self.row_index].outcomes[arm]
        if n >= len(bits):
            raise DataError(f"Resultados agotados: fila {self.row_index}, brazo {arm}, pull {n + 1}")
        self._pull_counts[arm] = n + 1
        return bits[n]
