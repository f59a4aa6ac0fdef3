"""
Hyperwell - bound states of the hyperbolic double-well potential
"""

__version__ = "1.0.0"
