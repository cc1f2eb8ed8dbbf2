"""
Núcleo: tipos, errores, semillas, ejecución de experimentos y CLI
"""
