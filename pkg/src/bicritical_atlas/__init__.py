"""Numerical laboratory and tile atlas for two real bicritical rational-map families."""

__version__ = "0.1.0"
