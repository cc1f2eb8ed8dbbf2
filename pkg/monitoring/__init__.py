"""
Módulo de monitoreo y métricas de CostBandit
"""
