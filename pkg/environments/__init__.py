"""
Entornos de interacción y motor de trials
"""
