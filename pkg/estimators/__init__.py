"""
Estimadores de probabilidad de éxito: GLM logístico y regresión logística con kernel
"""
