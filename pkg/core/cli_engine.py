"""
Motor principal de la CLI CostBandit

Subcomandos: run, sweep, plot-data, verify, trace-check. Cada error de la
librería se traduce a su código de salida.
"""

import argparse
import logging
import traceback
from pathlib import Path
from typing import List, Optional

from analysis.verification import run_verification
from config.settings import ExperimentConfig, Settings, parse_config
from core.command_processor import CommandProcessor
from core.errors import ConfigError, CostBanditError
from core.experiment_runner import run_experiment, run_sweep
from core.results_io import emit_plot_data
from environments.trace import check_trace, load_trace
from monitoring.metrics import MetricsCollector, close_metrics_collector, get_metrics_collector
from ui.formatting import ReportFormatter
from ui.interface import UserInterface

EXIT_INTERRUPTED = 130


def build_parser() -> argparse.ArgumentParser:
    """Parser de argumentos con un subparser por comando"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--debug', action='store_true', help="mostrar trazas completas de errores")
    common.add_argument('--no-color', action='store_true', help="desactivar colores ANSI")

    parser = argparse.ArgumentParser(prog='costbandit', description="Bandidos contextuales con costo")
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', parents=[common], help="ejecutar un experimento")
    run.add_argument('--config', required=True, help="archivo YAML del experimento")
    run.add_argument('--seed', type=int, help="semilla raíz (sobrescribe root_seed)")
    run.add_argument('--out', help="directorio de resultados (sobrescribe output_dir)")
    run.add_argument('--jobs', type=int, default=None, help="procesos en paralelo")

    sweep = sub.add_parser('sweep', parents=[common], help="barrido de tau_max")
    sweep.add_argument('--config', required=True)
    sweep.add_argument('--seed', type=int)
    sweep.add_argument('--out')
    sweep.add_argument('--jobs', type=int, default=None)
    sweep.add_argument('--tau-max', type=int, nargs='+', dest='tau_max', help="valores a barrer")

    plot = sub.add_parser('plot-data', parents=[common], help="CSV por métrica para graficar")
    plot.add_argument('--out', help="directorio de resultados")
    plot.add_argument('--config', help="tomar output_dir de la configuración")

    verify = sub.add_parser('verify', parents=[common], help="suite de verificación cruzada")
    verify.add_argument('--seed', type=int, default=0)
    verify.add_argument('--quick', action='store_true', help="menos episodios Monte Carlo")

    trace = sub.add_parser('trace-check', parents=[common], help="validar una traza")
    trace.add_argument('--config', help="tomar traza, brazos y tau_max de la configuración")
    trace.add_argument('--trace', help="archivo JSONL")
    trace.add_argument('--arms', type=int, help="número de brazos")
    trace.add_argument('--tau-max', type=int, dest='tau_max')

    return parser


class CLIEngine:
    """Motor principal de la CLI"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.ui = UserInterface(self.settings)
        self.formatter = ReportFormatter(self.settings)
        self.output_dir: Optional[Path] = None

        self.command_processor = CommandProcessor(self.settings)
        self._setup_command_processor()

    def _setup_command_processor(self):
        """Registrar subcomandos"""
        self.command_processor.register_command('run', self._cmd_run)
        self.command_processor.register_command('sweep', self._cmd_sweep)
        self.command_processor.register_command('plot-data', self._cmd_plot_data)
        self.command_processor.register_command('verify', self._cmd_verify)
        self.command_processor.register_command('trace-check', self._cmd_trace_check)

    def _apply_flags(self, args):
        self.settings.cli['debug'] = bool(getattr(args, 'debug', False))
        self.settings.cli['colors'] = self.settings.cli['colors'] and not getattr(args, 'no_color', False)
        self.ui.use_color = self.settings.cli['colors']
        self.formatter.use_color = self.settings.cli['colors']
        if self.settings.cli['debug']:
            logging.basicConfig(level=logging.DEBUG, format='%(asctime)s | %(name)s | %(message)s')

    def _metrics(self) -> Optional[MetricsCollector]:
        if self.output_dir is None:
            return None
        return get_metrics_collector(self.output_dir / self.settings.files['monitoring_dir'])

    def _load_config(self, args) -> ExperimentConfig:
        config = parse_config(Path(args.config), self.settings)
        if getattr(args, 'seed', None) is not None:
            if args.seed < 0:
                raise ConfigError(f"debe ser >= 0 (recibido {args.seed})", key="--seed")
            config.root_seed = args.seed
        if getattr(args, 'out', None):
            config.output_dir = args.out
        return config

    def _jobs(self, args) -> int:
        jobs = args.jobs if args.jobs is not None else self.settings.experiment['jobs']
        if jobs < 1:
            raise ConfigError(f"debe ser >= 1 (recibido {jobs})", key="--jobs")
        return jobs

    def run(self, argv: Optional[List[str]] = None) -> int:
        """
        Ejecutar la CLI

        Returns:
            0 éxito, 2 configuración, 3 datos, 4 numérico, 1 otros fallos
        """
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)

        self._apply_flags(args)
        try:
            return self.command_processor.process_command(args.command, args, self._metrics)
        except CostBanditError as e:
            self.ui.show_error(str(e))
            if self.settings.cli['debug']:
                traceback.print_exc()
            collector = self._metrics()
            if collector is not None:
                collector.log_error(type(e).__name__, str(e), {'command': args.command})
            return e.exit_code
        finally:
            if self.output_dir is not None:
                close_metrics_collector(self.output_dir / self.settings.files['monitoring_dir'])

    def _cmd_run(self, args) -> int:
        config = self._load_config(args)
        self.output_dir = Path(config.output_dir)
        self.ui.show_welcome('run', args.config)

        outcome = run_experiment(config, self._jobs(args), self.settings, self.ui.show_progress)
        self.ui.show_message(self.formatter.format_summary_table(list(outcome.summaries.values())))
        self.ui.show_success(f"Resultados en {outcome.output_dir} (digest {outcome.config_digest[:12]})")
        return 0

    def _cmd_sweep(self, args) -> int:
        config = self._load_config(args)
        self.output_dir = Path(config.output_dir)
        self.ui.show_welcome('sweep', args.config)

        path = run_sweep(config, args.tau_max, self._jobs(args), self.settings, self.ui.show_progress)
        self.ui.show_success(f"Curva costo/éxito en {path}")
        return 0

    def _cmd_plot_data(self, args) -> int:
        if args.out:
            results_dir = Path(args.out)
        elif args.config:
            results_dir = Path(parse_config(Path(args.config), self.settings).output_dir)
        else:
            raise ConfigError("indicar --out o --config", key="plot-data")

        self.output_dir = results_dir
        for path in emit_plot_data(results_dir, self.settings.files['plot_prefix']):
            self.ui.show_message(f"  • {path}")
        self.ui.show_success("Datos de gráficos generados")
        return 0

    def _cmd_verify(self, args) -> int:
        self.ui.show_welcome('verify')
        results = run_verification(seed=args.seed, quick=args.quick)
        self.ui.show_message(self.formatter.format_verification(results))
        return 0 if all(r.passed for r in results) else 1

    def _cmd_trace_check(self, args) -> int:
        if args.config:
            config = parse_config(Path(args.config), self.settings)
            if config.env.kind != 'trace':
                raise ConfigError("la configuración no usa una traza", key="env.kind")
            path = config.env.trace_path
            num_arms = len(config.env.arms)
            tau_max = args.tau_max or max(a.hyper.tau_max for a in config.algorithms)
        else:
            if not (args.trace and args.arms and args.tau_max):
                raise ConfigError("indicar --config o bien --trace, --arms y --tau-max", key="trace-check")
            path, num_arms, tau_max = args.trace, args.arms, args.tau_max

        rows = load_trace(path)
        problems = check_trace(rows, num_arms, tau_max)
        if problems:
            self.ui.show_error(f"Traza inválida: {len(problems)} problemas")
            self.ui.show_message(self.formatter.format_problems(problems))
            return 3

        self.ui.show_success(f"Traza válida: {len(rows)} filas, {num_arms} brazos, tau_max={tau_max}")
        return 0
