"""
Utilidades cerradas, oráculo MDP, parámetros teóricos, métricas y verificación
"""
