"""
Registro silencioso de la ejecución de experimentos

Cada directorio de salida tiene su propio collector: un log de texto
(monitoring.log), una base SQLite (metrics.db) con una fila por trial y
una por evento (comando o error), y un resumen de sesión en
metrics_current.json. Nada de esto entra en los archivos de resultados.
"""

import json
import logging
import sqlite3
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

LOG_FILE = "monitoring.log"
DB_FILE = "metrics.db"
SESSION_FILE = "metrics_current.json"

_SCHEMA = (
    '''
    CREATE TABLE IF NOT EXISTS trials (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        recorded_at DATETIME DEFAULT CURRENT_TIMESTAMP,
        algorithm TEXT NOT NULL,
        seed INTEGER NOT NULL,
        horizon INTEGER,
        duration REAL,
        avg_utility REAL,
        avg_cost REAL,
        success_rate REAL
    )
    ''',
    '''
    CREATE TABLE IF NOT EXISTS events (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        recorded_at DATETIME DEFAULT CURRENT_TIMESTAMP,
        kind TEXT NOT NULL,
        name TEXT NOT NULL,
        duration REAL,
        ok INTEGER,
        detail TEXT
    )
    ''',
)


class MetricsCollector:
    """Recolector de trials y eventos de un directorio de salida"""

    def __init__(self, data_dir: Union[str, Path] = "monitoring"):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.db_path = self.data_dir / DB_FILE

        self.started_at = datetime.now()
        self._trials_by_algorithm: Dict[str, int] = {}
        self._trial_seconds = 0.0
        self._commands = 0
        self._failures = 0

        self._lock = threading.Lock()
        self.logger = self._file_logger()
        with sqlite3.connect(self.db_path) as conn:
            for statement in _SCHEMA:
                conn.execute(statement)

    def _file_logger(self) -> logging.Logger:
        logger = logging.getLogger(f'costbandit.metrics.{self.data_dir.resolve()}')
        logger.setLevel(logging.INFO)
        if not logger.handlers:
            handler = logging.FileHandler(self.data_dir / LOG_FILE)
            handler.setFormatter(logging.Formatter('%(asctime)s | %(levelname)s | %(message)s'))
            logger.addHandler(handler)
        # Solo al archivo
        logger.propagate = False
        return logger

    def _insert(self, sql: str, values: tuple):
        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.execute(sql, values)
        except sqlite3.Error as e:
            self.logger.warning(f"DB:{e}")

    def log_trial(self, trial, duration: float, label: Optional[str] = None):
        """Registrar un TrialResult terminado bajo su etiqueta de algoritmo"""
        name = label or trial.algorithm
        utility = float(trial.utilities.mean())
        cost = float(trial.costs.mean())
        success = float(trial.successes.mean())
        with self._lock:
            counts = self._trials_by_algorithm
            counts[name] = counts.get(name, 0) + 1
            self._trial_seconds += duration
            self.logger.info(f"TRIAL:{name}|SEED:{trial.seed}|T:{trial.horizon}"
                             f"|TIME:{duration:.3f}|UTILITY:{utility:.6f}|COST:{cost:.6f}")
            self._insert(
                'INSERT INTO trials (algorithm, seed, horizon, duration, avg_utility, avg_cost, success_rate) '
                'VALUES (?, ?, ?, ?, ?, ?, ?)',
                (name, trial.seed, trial.horizon, duration, utility, cost, success),
            )

    def log_command(self, command: str, execution_time: float, success: bool = True):
        """Registrar un subcomando de la CLI"""
        with self._lock:
            self._commands += 1
            if not success:
                self._failures += 1
            self.logger.info(f"CMD:{command}|TIME:{execution_time:.3f}|OK:{success}")
            self._insert('INSERT INTO events (kind, name, duration, ok, detail) VALUES (?, ?, ?, ?, ?)',
                         ('command', command, execution_time, int(success), None))

    def log_error(self, error_type: str, error_message: str, context: Optional[Dict] = None):
        """Registrar un fallo (trial, configuración, datos)"""
        detail = json.dumps({'message': error_message, **(context or {})}, default=str)
        with self._lock:
            self._failures += 1
            self.logger.error(f"ERROR:{error_type}|MSG:{error_message}")
            self._insert('INSERT INTO events (kind, name, duration, ok, detail) VALUES (?, ?, ?, ?, ?)',
                         ('error', error_type, None, 0, detail))

    def get_session_summary(self) -> Dict[str, Any]:
        """Resumen en memoria de la sesión"""
        with self._lock:
            trials = sum(self._trials_by_algorithm.values())
            return {
                'started_at': self.started_at.isoformat(timespec='seconds'),
                'elapsed': (datetime.now() - self.started_at).total_seconds(),
                'commands': self._commands,
                'failures': self._failures,
                'trials': trials,
                'trials_by_algorithm': dict(self._trials_by_algorithm),
                'avg_trial_seconds': self._trial_seconds / trials if trials else 0.0,
            }

    def save_current_state(self):
        """Volcar el resumen de sesión a JSON"""
        try:
            with open(self.data_dir / SESSION_FILE, 'w') as f:
                json.dump(self.get_session_summary(), f, indent=2)
        except OSError as e:
            self.logger.warning(f"SESSION:{e}")

    def close(self):
        """Cerrar el log de texto y soltar el collector del registro del proceso"""
        with self._lock:
            for handler in list(self.logger.handlers):
                self.logger.removeHandler(handler)
                handler.close()
        with _collectors_lock:
            key = self.data_dir.resolve()
            if _collectors.get(key) is self:
                del _collectors[key]


_collectors: Dict[Path, MetricsCollector] = {}
_collectors_lock = threading.Lock()


def get_metrics_collector(data_dir: Union[str, Path] = "monitoring") -> MetricsCollector:
    """Collector único del proceso para un directorio"""
    key = Path(data_dir).resolve()
    with _collectors_lock:
        if key not in _collectors:
            _collectors[key] = MetricsCollector(key)
        return _collectors[key]


def close_metrics_collector(data_dir: Union[str, Path] = "monitoring"):
    """Cerrar el collector del directorio si está abierto"""
    with _collectors_lock:
        collector = _collectors.get(Path(data_dir).resolve())
    if collector is not None:
        collector.close()
