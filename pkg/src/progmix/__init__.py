"""Desk-scale progression mixing experiments on SL_d(F_p)."""

__version__ = "0.1.0"
