"""Small numeric helpers shared across modules: deterministic summation,
grid construction, Gauss-Legendre nodes."""

from __future__ import annotations

import numpy as np

__all__ = ["pairwise_sum", "square_grid", "gauss_legendre", "frobenius"]


def pairwise_sum(values):
    """Sum with a fixed pairwise reduction order, for reproducible totals."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def square_grid(center: complex, half_width: float, resolution: int) -> list:
    """Row-major complex grid over the square |xi1 - c1|, |xi2 - c2| <= h."""
    c = complex(center)
    xs = np.linspace(c.real - half_width, c.real + half_width, resolution)
    ys = np.linspace(c.imag - half_width, c.imag + half_width, resolution)
    return [complex(x, y) for y in ys for x in xs]


_GL_CACHE: dict = {}


def gauss_legendre(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def frobenius(m) -> float:
    return float(np.linalg.norm(m))
