"""
Bearing-only target localization and circumnavigation simulator
"""
__version__ = "1.0.0"
