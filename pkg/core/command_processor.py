"""
Procesador de subcomandos
"""

import time
from typing import Callable, Dict, Optional

from monitoring.metrics import MetricsCollector

Handler = Callable[..., int]
MetricsProvider = Callable[[], Optional[MetricsCollector]]


class CommandProcessor:
    """Registro y despacho de subcomandos de la CLI"""

    def __init__(self, settings):
        self.settings = settings
        self.commands: Dict[str, Handler] = {}

    def register_command(self, command_name: str, handler: Handler):
        """Registrar un nuevo subcomando"""
        self.commands[command_name] = handler

    def process_command(self, command_name: str, args, metrics: Optional[MetricsProvider] = None) -> int:
        """
        Ejecutar un subcomando

        Args:
            command_name: Nombre registrado
            args: Namespace de argparse
            metrics: Devuelve el collector donde registrar el tiempo, o None

        Returns:
            Código de salida del handler

        Raises:
            KeyError: Si el subcomando no está registrado
        """
        if command_name not in self.commands:
            raise KeyError(f"Comando desconocido: '{command_name}'")

        started = time.time()
        success = False
        try:
            code = self.commands[command_name](args)
            success = code == 0
            return code
        finally:
            collector = metrics() if metrics is not None else None
            if collector is not None:
                collector.log_command(command_name, time.time() - started, success)
