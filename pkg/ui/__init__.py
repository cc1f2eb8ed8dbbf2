"""
Salida de consola
"""
