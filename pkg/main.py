#!/usr/bin/env python3
"""
CostBandit - Bandidos contextuales con costo
Selección de modelos generativos que equilibra éxito y precio por consulta
"""

import sys
from pathlib import Path

# Agregar el directorio del proyecto al path
sys.path.insert(0, str(Path(__file__).parent))

from config.settings import Settings
from core.cli_engine import EXIT_INTERRUPTED, CLIEngine


def main(argv=None) -> int:
    """Punto de entrada principal"""
    try:
        return CLIEngine(Settings()).run(argv)
    except KeyboardInterrupt:
        print("\n👋 ¡Hasta luego!")
        return EXIT_INTERRUPTED
    except Exception as e:
        print(f"❌ Error fatal: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
