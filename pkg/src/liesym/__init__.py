"""Symbolic toolkit for the preliminary group classification of
``u_t = f(x,u) u_x^2 + g(x,u) u_xx``."""

__version__ = "0.1.0"
