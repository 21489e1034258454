"""Numerics for eigenvalue concentration of arrowhead matrices, concave
symmetric functions on Garding cones, and a continuity-method solver for
complex Hessian Dirichlet problems on a flat model with Levi-flat boundary.
"""

__version__ = "0.1.0"
