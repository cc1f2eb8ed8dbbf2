"""
Salida de consola de la CLI
"""

import sys
from typing import Optional

ANSI = {
    'reset': '\033[0m',
    'red': '\033[31m',
    'green': '\033[32m',
    'yellow': '\033[33m',
    'blue': '\033[34m',
    'cyan': '\033[36m',
    'gray': '\033[90m',
}


class UserInterface:
    """Mensajes con color y emoji hacia stdout (o el stream dado)"""

    def __init__(self, settings, stream=None):
        self.settings = settings
        self.use_color = settings.cli['colors']
        self._stream = stream

    @property
    def stream(self):
        return self._stream or sys.stdout

    def _paint(self, text: str, color: Optional[str]) -> str:
        if not self.use_color or color is None:
            return text
        return f"{ANSI[color]}{text}{ANSI['reset']}"

    def _emit(self, text: str = "", color: Optional[str] = None):
        print(self._paint(text, color), file=self.stream, flush=True)

    def show_welcome(self, command: str, config_path: Optional[str] = None):
        """Banner de inicio de un subcomando"""
        self._emit(f"{self._paint('🚀 CostBandit', 'cyan')} {self._paint(command, 'yellow')}")
        if config_path:
            self._emit(f"{self._paint('Config:', 'blue')} {config_path}")
        self._emit('─' * 60, 'gray')

    def show_message(self, message: str):
        self._emit(message)

    def show_progress(self, message: str):
        """Una línea por algoritmo o valor del barrido"""
        self._emit(f"{self._paint('▶', 'cyan')} {message}")

    def show_success(self, message: str):
        self._emit(f"✅ {message}", 'green')

    def show_error(self, message: str):
        self._emit(f"❌ {message}", 'red')
