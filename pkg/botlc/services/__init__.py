"""
Simulation, analysis and batch services
"""
