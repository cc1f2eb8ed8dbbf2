#!/usr/bin/env python3
"""
Configuración de pytest y fixtures de los tests de CostBandit
"""

import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

import pytest

# Raíz del repositorio en sys.path para los imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import Settings
from core.cli_engine import CLIEngine

# Traza determinista de tres filas y dos brazos (dos resultados por brazo)
GOLDEN_TRACE = [
    {"context": [1.0, 0.0], "outcomes": {"0": [1, 0], "1": [0, 0]}, "label": "a"},
    {"context": [0.0, 1.0], "outcomes": {"0": [0, 1], "1": [1, 0]}, "label": "b"},
    {"context": [0.6, 0.8], "outcomes": {"0": [1, 1], "1": [0, 1]}, "label": "c"},
]


@pytest.fixture
def temp_workspace():
    """Directorio temporal de trabajo para los tests"""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    # Limpieza
    if os.path.exists(temp_dir):
        shutil.rmtree(temp_dir)


@pytest.fixture
def test_settings(temp_workspace):
    """Settings de prueba sobre el directorio temporal"""
    settings = Settings()
    settings.workspace_dir = temp_workspace
    settings.cli['colors'] = False
    return settings


@pytest.fixture
def test_cli(test_settings):
    """Instancia de CLIEngine para los tests"""
    return CLIEngine(test_settings)


@pytest.fixture
def trace_file(temp_workspace):
    """Escribir la traza de referencia en JSONL"""
    path = Path(temp_workspace) / "trace.jsonl"
    path.write_text("\n".join(json.dumps(row) for row in GOLDEN_TRACE) + "\n")
    return path


@pytest.fixture
def trace_config_file(temp_workspace, trace_file):
    """Configuración que repite la traza en orden con dos baselines deterministas"""
    path = Path(temp_workspace) / "trace.yaml"
    path.write_text(
        "env:\n"
        "  kind: trace\n"
        "  trace_path: trace.jsonl\n"
        "  order: sequential\n"
        "  arms:\n"
        "    - {cost: 1.0, label: barato}\n"
        "    - {cost: 2.5, label: caro}\n"
        "algorithms: [lowest_cost, gts]\n"
        "horizon: 3\n"
        "num_trials: 1\n"
        f"output_dir: {Path(temp_workspace) / 'out'}\n"
        "hyper:\n"
        "  lambda: 0.25\n"
        "  tau_max: 2\n"
    )
    return path


@pytest.fixture
def logistic_config():
    """Experimento logístico sintético pequeño como dict"""
    return {
        'env': {
            'kind': 'logistic',
            'd': 3,
            'arms': [{'cost': 1.0}, {'cost': 2.0}, {'cost': 4.0}],
        },
        'algorithms': ['oracle', 'promptwise', 'promptwise_perstep', 'greedy'],
        'horizon': 30,
        'num_trials': 2,
        'root_seed': 7,
    }
