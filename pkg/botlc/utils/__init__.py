"""
Geometry, integration and file helpers
"""
