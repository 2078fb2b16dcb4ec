"""Surfaces immersed in su(N) built from CP^(N-1) sigma-model solutions."""

__version__ = "0.1.0"
