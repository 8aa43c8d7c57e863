"""Numerical laboratory for blow-up and lifespan scaling of semilinear
waves on an exponentially expanding background."""

__version__ = "0.1.0"
