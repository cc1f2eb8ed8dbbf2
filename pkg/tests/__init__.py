"""
Tests de CostBandit
"""
