"""
Configuración del sistema CostBandit

Settings guarda los valores por defecto de ejecución; parse_config lee el
archivo YAML de un experimento y lo valida de forma estricta.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml

from config.models import ModelCatalog
from core.errors import ConfigError
from core.types import Arm, HyperParams


class Settings:
    """Configuración global del sistema"""

    def __init__(self):
        self.base_dir = Path(__file__).parent.parent
        self.workspace_dir = Path.cwd()

        # Valores por defecto de un experimento
        self.experiment = {
            'num_trials': 20,
            'root_seed': 0,
            'output_dir': 'results',
            'jobs': 1,
        }

        # Configuración de la CLI
        self.cli = {
            'colors': True,
            'debug': False,
        }

        # Nombres de archivos de resultados
        self.files = {
            'monitoring_dir': 'monitoring',
            'summary': 'summary.json',
            'curves': 'curves.csv',
            'tradeoff': 'tradeoff.csv',
            'plot_prefix': 'plot_avg_',
        }


TOP_LEVEL_KEYS = {'env', 'algorithms', 'horizon', 'num_trials', 'root_seed', 'output_dir', 'hyper', 'sweep'}
ENV_KEYS = {'kind', 'd', 'arms', 'sampler', 'num_categories', 'contexts', 'theta_norm', 'theta_star',
            'q_floor', 'num_types', 'trace_path', 'order'}
ENV_KINDS = ('logistic', 'expert_t2i', 'trace')
SAMPLERS = ('unit_sphere', 'one_hot', 'custom')
ARM_KEYS = {'cost', 'model', 'label', 'available_from'}
ALGORITHM_KEYS = {'name', 'hyper', 'label'}
INT_HYPER = {'tau_max', 'tau_exp', 'max_support'}
NULLABLE_HYPER = {'alpha', 'max_support'}


@dataclass
class EnvConfig:
    """Especificación del entorno"""
    kind: str
    arms: List[Arm] = field(default_factory=list)
    d: Optional[int] = None
    sampler: str = 'unit_sphere'
    contexts: Optional[List[List[float]]] = None
    theta_norm: float = 1.0
    theta_star: Optional[List[List[float]]] = None
    q_floor: Optional[float] = None
    num_types: int = 5
    trace_path: Optional[str] = None
    order: str = 'random'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'arms': [{'id': a.id, 'cost': a.cost, 'label': a.label, 'available_from': a.available_from}
                     for a in self.arms],
            'd': self.d,
            'sampler': self.sampler,
            'contexts': self.contexts,
            'theta_norm': self.theta_norm,
            'theta_star': self.theta_star,
            'q_floor': self.q_floor,
            'num_types': self.num_types,
            'trace_path': self.trace_path,
            'order': self.order,
        }


@dataclass
class AlgorithmConfig:
    name: str
    hyper: HyperParams
    label: str

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'label': self.label, 'hyper': self.hyper.to_dict()}


@dataclass
class ExperimentConfig:
    """Experimento completo ya validado"""
    env: EnvConfig
    algorithms: List[AlgorithmConfig]
    horizon: int
    num_trials: int = 20
    root_seed: int = 0
    output_dir: str = 'results'
    hyper: HyperParams = field(default_factory=HyperParams)
    sweep_tau_max: Optional[List[int]] = None

    def to_dict(self) -> Dict[str, Any]:
        """Forma canónica usada para el digest (sin output_dir)"""
        return {
            'env': self.env.to_dict(),
            'algorithms': [algorithm.to_dict() for algorithm in self.algorithms],
            'horizon': self.horizon,
            'num_trials': self.num_trials,
            'root_seed': self.root_seed,
            'hyper': self.hyper.to_dict(),
            'sweep': {'tau_max': self.sweep_tau_max} if self.sweep_tau_max else None,
        }


# --- validadores -------------------------------------------------------

def _check_mapping(value: Any, key: str, allowed: set) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError("debe ser un mapeo", key=key)
    for name in value:
        if name not in allowed:
            raise ConfigError("clave desconocida", key=f"{key}.{name}" if key else str(name))
    return value


def _int(value: Any, key: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"se esperaba un entero (recibido {value!r})", key=key)
    if minimum is not None and value < minimum:
        raise ConfigError(f"debe ser >= {minimum} (recibido {value})", key=key)
    return value


def _float(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"se esperaba un número (recibido {value!r})", key=key)
    return float(value)


def _vectors(value: Any, key: str) -> List[List[float]]:
    if not isinstance(value, list) or not value:
        raise ConfigError("se esperaba una lista no vacía de vectores", key=key)
    vectors = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            raise ConfigError("se esperaba un vector", key=f"{key}[{i}]")
        vectors.append([_float(v, f"{key}[{i}]") for v in row])
    if len({len(v) for v in vectors}) != 1:
        raise ConfigError("los vectores deben tener la misma dimensión", key=key)
    return vectors


def parse_hyper(raw: Any, key: str, base: Optional[HyperParams] = None) -> HyperParams:
    """Aplicar sobrecargas de hiperparámetros sobre base"""
    base = base or HyperParams()
    if raw is None:
        return base
    raw = _check_mapping(raw, key, set(HyperParams.CONFIG_KEYS))

    overrides = {}
    for name, value in raw.items():
        attr = HyperParams.CONFIG_KEYS[name]
        if value is None:
            if name not in NULLABLE_HYPER:
                raise ConfigError("no puede ser nulo", key=f"{key}.{name}")
            overrides[attr] = None
        elif name in INT_HYPER:
            overrides[attr] = _int(value, f"{key}.{name}")
        else:
            overrides[attr] = _float(value, f"{key}.{name}")

    try:
        return base.with_overrides(**overrides)
    except ConfigError as e:
        field_name = e.key.split('.')[-1] if e.key else ""
        raise ConfigError(e.reason, key=f"{key}.{field_name}")


def _parse_arms(raw: Any, catalog: ModelCatalog) -> List[Arm]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("se esperaba una lista no vacía de brazos", key="env.arms")

    arms = []
    for i, entry in enumerate(raw):
        key = f"env.arms[{i}]"
        entry = _check_mapping(entry, key, ARM_KEYS)
        if ('cost' in entry) == ('model' in entry):
            raise ConfigError("cada brazo necesita exactamente uno de 'cost' o 'model'", key=key)

        if 'model' in entry:
            model = str(entry['model'])
            cost = catalog.get_price(model, key=f"{key}.model")
            label = str(entry.get('label', model))
        else:
            cost = _float(entry['cost'], f"{key}.cost")
            if cost < 0:
                raise ConfigError("debe ser >= 0", key=f"{key}.cost")
            label = str(entry.get('label', f"brazo-{i}"))

        available_from = _int(entry.get('available_from', 1), f"{key}.available_from", minimum=1)
        arms.append(Arm(i, cost, label, available_from))
    return arms


def parse_env(raw: Any, catalog: Optional[ModelCatalog] = None) -> EnvConfig:
    """Validar la sección env"""
    catalog = catalog or ModelCatalog()
    raw = _check_mapping(raw, "env", ENV_KEYS)
    if 'kind' not in raw:
        raise ConfigError("clave requerida", key="env.kind")
    kind = raw['kind']
    if kind not in ENV_KINDS:
        raise ConfigError(f"tipo desconocido '{kind}' (válidos: {', '.join(ENV_KINDS)})", key="env.kind")

    env = EnvConfig(kind=kind)
    if 'arms' in raw:
        env.arms = _parse_arms(raw['arms'], catalog)
    if 'd' in raw:
        env.d = _int(raw['d'], "env.d", minimum=1)
    if 'num_categories' in raw:
        num_categories = _int(raw['num_categories'], "env.num_categories", minimum=1)
        if env.d is not None and env.d != num_categories:
            raise ConfigError("debe coincidir con env.d", key="env.num_categories")
        env.d = num_categories
    if 'theta_norm' in raw:
        env.theta_norm = _float(raw['theta_norm'], "env.theta_norm")
        if env.theta_norm <= 0:
            raise ConfigError("debe ser > 0", key="env.theta_norm")
    if raw.get('q_floor') is not None:
        env.q_floor = _float(raw['q_floor'], "env.q_floor")
        if not 0 < env.q_floor < 1:
            raise ConfigError("debe estar en (0, 1)", key="env.q_floor")

    if kind == 'logistic':
        _parse_logistic(raw, env)
    elif kind == 'expert_t2i':
        env.num_types = _int(raw.get('num_types', 5), "env.num_types", minimum=1)
        if not env.arms and env.num_types > 5:
            raise ConfigError("más de 5 tipos requiere declarar env.arms", key="env.num_types")
        if env.arms and len(env.arms) != env.num_types:
            raise ConfigError(f"se esperaban {env.num_types} expertos", key="env.arms")
        env.d = env.num_types
    else:
        if 'trace_path' not in raw:
            raise ConfigError("clave requerida para kind=trace", key="env.trace_path")
        env.trace_path = str(raw['trace_path'])
        env.order = raw.get('order', 'random')
        if env.order not in ('random', 'sequential'):
            raise ConfigError(f"orden desconocido '{env.order}'", key="env.order")
        if not env.arms:
            raise ConfigError("clave requerida para kind=trace", key="env.arms")

    return env


def _parse_logistic(raw: Dict[str, Any], env: EnvConfig):
    if not env.arms:
        raise ConfigError("clave requerida para kind=logistic", key="env.arms")

    env.sampler = raw.get('sampler', 'unit_sphere')
    if env.sampler not in SAMPLERS:
        raise ConfigError(f"muestreador desconocido '{env.sampler}'", key="env.sampler")

    if 'theta_star' in raw:
        env.theta_star = _vectors(raw['theta_star'], "env.theta_star")
        if len(env.theta_star) != len(env.arms):
            raise ConfigError(f"se esperaban {len(env.arms)} vectores", key="env.theta_star")
        if env.d is not None and env.d != len(env.theta_star[0]):
            raise ConfigError("la dimensión no coincide con env.d", key="env.theta_star")
        env.d = len(env.theta_star[0])

    if env.sampler == 'custom':
        if 'contexts' not in raw:
            raise ConfigError("clave requerida para sampler=custom", key="env.contexts")
        env.contexts = _vectors(raw['contexts'], "env.contexts")
        if env.d is not None and env.d != len(env.contexts[0]):
            raise ConfigError("la dimensión no coincide con env.d", key="env.contexts")
        env.d = len(env.contexts[0])

    if env.d is None:
        raise ConfigError("clave requerida para kind=logistic", key="env.d")


def _parse_algorithms(raw: Any, global_hyper: HyperParams, env: EnvConfig) -> List[AlgorithmConfig]:
    from policies import ALGORITHMS

    if not isinstance(raw, list):
        raise ConfigError("se esperaba una lista", key="algorithms")
    if not raw:
        raise ConfigError("la lista está vacía: no hay nada que ejecutar", key="algorithms")

    algorithms = []
    for i, entry in enumerate(raw):
        key = f"algorithms[{i}]"
        if isinstance(entry, str):
            entry = {'name': entry}
        entry = _check_mapping(entry, key, ALGORITHM_KEYS)
        if 'name' not in entry:
            raise ConfigError("clave requerida", key=f"{key}.name")
        name = entry['name']
        if name not in ALGORITHMS:
            raise ConfigError(f"algoritmo desconocido '{name}' (válidos: {', '.join(ALGORITHMS)})",
                              key=f"{key}.name")
        if name == 'oracle' and env.kind == 'trace':
            raise ConfigError("el oráculo necesita un entorno con verdad conocida", key=f"{key}.name")

        hyper = parse_hyper(entry.get('hyper'), f"{key}.hyper", global_hyper)
        algorithms.append(AlgorithmConfig(name, hyper, str(entry.get('label', name))))

    labels = [a.label for a in algorithms]
    duplicated = sorted({label for label in labels if labels.count(label) > 1})
    if duplicated:
        raise ConfigError(f"etiquetas repetidas {duplicated}; usar 'label' para distinguirlas", key="algorithms")
    return algorithms


def _check_horizons(config: ExperimentConfig):
    from environments.engine import check_schedule
    from policies import uses_exploration

    arms = config.env.arms
    if not arms and config.env.kind == 'expert_t2i':
        arms = [Arm(i, 0.0) for i in range(config.env.num_types)]
    for algorithm in config.algorithms:
        check_schedule(arms, algorithm.hyper.tau_exp, config.horizon, uses_exploration(algorithm.name))


def _is_path(source: Any) -> bool:
    """Texto de una línea sin ':' no puede ser un mapeo YAML, así que se lee como ruta"""
    if isinstance(source, Path):
        return True
    if not isinstance(source, str) or "\n" in source:
        return False
    if source.endswith((".yaml", ".yml")) or ":" not in source:
        return True
    try:
        return Path(source).is_file()
    except OSError:
        return False


def load_yaml(source: Union[str, Path]) -> Dict[str, Any]:
    """Leer YAML desde una ruta o desde texto"""
    if _is_path(source):
        path = Path(source)
        try:
            source = path.read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigError(f"no se pudo leer el archivo: {e.strerror}", key=str(path))

    try:
        raw = yaml.safe_load(source)
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML inválido: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("la configuración debe ser un mapeo YAML")
    return raw


def parse_config(source: Union[str, Path, Dict[str, Any]], settings: Optional[Settings] = None) -> ExperimentConfig:
    """
    Leer y validar la configuración de un experimento

    Args:
        source: Ruta a un archivo YAML, texto YAML o un dict ya cargado
        settings: Valores por defecto (num_trials, root_seed, output_dir)

    Returns:
        ExperimentConfig con los valores por defecto aplicados

    Raises:
        ConfigError: Clave faltante, desconocida o con tipo/valor inválido
    """
    settings = settings or Settings()
    raw = source if isinstance(source, dict) else load_yaml(source)
    _check_mapping(raw, "", TOP_LEVEL_KEYS)

    for required in ('env', 'algorithms', 'horizon'):
        if required not in raw:
            raise ConfigError("clave requerida", key=required)

    defaults = settings.experiment
    global_hyper = parse_hyper(raw.get('hyper'), "hyper")
    env = parse_env(raw["env"])
    if env.trace_path and _is_path(source) and not Path(env.trace_path).is_absolute():
        # Rutas de traza relativas al archivo de configuración
        env.trace_path = str(Path(source).parent / env.trace_path)

    sweep = None
    if raw.get('sweep') is not None:
        sweep_raw = _check_mapping(raw['sweep'], "sweep", {'tau_max'})
        values = sweep_raw.get('tau_max')
        if not isinstance(values, list) or not values:
            raise ConfigError("se esperaba una lista no vacía", key="sweep.tau_max")
        sweep = [_int(v, "sweep.tau_max", minimum=1) for v in values]

    config = ExperimentConfig(
        env=env,
        algorithms=_parse_algorithms(raw['algorithms'], global_hyper, env),
        horizon=_int(raw['horizon'], "horizon", minimum=1),
        num_trials=_int(raw.get('num_trials', defaults['num_trials']), "num_trials", minimum=1),
        root_seed=_int(raw.get('root_seed', defaults['root_seed']), "root_seed", minimum=0),
        output_dir=str(raw.get('output_dir', defaults['output_dir'])),
        hyper=global_hyper,
        sweep_tau_max=sweep,
    )
    _check_horizons(config)
    return config


def sweep_configs(config: ExperimentConfig, values: Optional[Sequence[int]] = None) -> Dict[int, ExperimentConfig]:
    """Una copia del experimento por valor de tau_max"""
    values = values or config.sweep_tau_max
    if not values:
        raise ConfigError("no hay valores de tau_max para barrer", key="sweep.tau_max")

    variants = {}
    for tau in values:
        algorithms = [AlgorithmConfig(a.name, a.hyper.with_overrides(tau_max=tau), a.label)
                      for a in config.algorithms]
        variants[tau] = ExperimentConfig(
            env=config.env,
            algorithms=algorithms,
            horizon=config.horizon,
            num_trials=config.num_trials,
            root_seed=config.root_seed,
            output_dir=str(Path(config.output_dir) / f"tau_max_{tau}"),
            hyper=config.hyper.with_overrides(tau_max=tau),
            sweep_tau_max=None,
        )
    return variants
