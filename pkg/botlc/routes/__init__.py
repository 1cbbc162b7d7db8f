"""
API route handlers
"""
from botlc.routes import download, runs, scenarios

__all__ = ['scenarios', 'runs', 'download']
