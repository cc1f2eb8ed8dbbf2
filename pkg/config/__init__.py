"""
Configuración de experimentos y catálogo de precios
"""
