"""Truncated derivative-tower algebra over the Wirtinger pair (d, dbar).

A JetScalar holds a complex value and the partials d^a dbar^b up to a fixed
total order; a MatrixJet holds the same tower for a dense square complex
matrix.  Sums, products, quotients, ln/exp/sqrt and powers propagate towers
by the Leibniz rule, so second and third derivatives of derived fields (the
projector, K-matrices, metric coefficients) come out of first-order data via
plain chained arithmetic rather than giant symbolic trees.

Conjugation is structural: the conjugate of the (a, b) entry is the (b, a)
entry of the conjugate field, because conjugating swaps d and dbar.
"""

from __future__ import annotations

import math

import numpy as np

from .expr import Jet, jet_orders

__all__ = ["JetScalar", "MatrixJet", "jet_from_expr", "matrix_jet_from_scalars", "outer_jet"]

_BINOM = [[math.comb(n, k) for k in range(n + 1)] for n in range(8)]


def _pairs_below(a: int, b: int):
    for i in range(a + 1):
        for j in range(b + 1):
            yield i, j


class JetScalar:
    __slots__ = ("order", "e")

    def __init__(self, order: int, entries: dict):
        self.order = order
        self.e = entries

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: complex, order: int) -> "JetScalar":
        e = {k: 0j for k in jet_orders(order)}
        e[(0, 0)] = complex(value)
        return cls(order, e)

    @classmethod
    def from_jet(cls, jet: Jet) -> "JetScalar":
        return cls(jet.order, dict(jet.entries))

    @property
    def value(self) -> complex:
        return self.e[(0, 0)]

    def d(self, a: int, b: int) -> complex:
        return self.e[(a, b)]

    def truncate(self, order: int) -> "JetScalar":
        return JetScalar(order, {k: self.e[k] for k in jet_orders(order)})

    def shift_d(self) -> "JetScalar":
        """The jet of the d-derivative, one order lower."""
        n = self.order - 1
        return JetScalar(n, {(a, b): self.e[(a + 1, b)] for a, b in jet_orders(n)})

    def shift_dbar(self) -> "JetScalar":
        n = self.order - 1
        return JetScalar(n, {(a, b): self.e[(a, b + 1)] for a, b in jet_orders(n)})

    def conj(self) -> "JetScalar":
        return JetScalar(self.order, {(a, b): self.e[(b, a)].conjugate() for a, b in jet_orders(self.order)})

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "JetScalar":
        if isinstance(other, JetScalar):
            if other.order != self.order:
                n = min(self.order, other.order)
                return other.truncate(n)
            return other
        return JetScalar.constant(other, self.order)

    def _match(self, other):
        other = self._coerce(other)
        if other.order < self.order:
            return self.truncate(other.order), other
        return self, other

    def __add__(self, other):
        a, b = self._match(other)
        return JetScalar(a.order, {k: a.e[k] + b.e[k] for k in jet_orders(a.order)})

    __radd__ = __add__

    def __neg__(self):
        return JetScalar(self.order, {k: -v for k, v in self.e.items()})

    def __sub__(self, other):
        a, b = self._match(other)
        return JetScalar(a.order, {k: a.e[k] - b.e[k] for k in jet_orders(a.order)})

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        f, g = self._match(other)
        out = {}
        for a, b in jet_orders(f.order):
            s = 0j
            for i, j in _pairs_below(a, b):
                s += _BINOM[a][i] * _BINOM[b][j] * f.e[(i, j)] * g.e[(a - i, b - j)]
            out[(a, b)] = s
        return JetScalar(f.order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        f, g = self._match(other)
        if g.value == 0:
            raise ZeroDivisionError("jet division by zero value")
        out = {}
        for a, b in jet_orders(f.order):
            s = f.e[(a, b)]
            for i, j in _pairs_below(a, b):
                if (i, j) == (a, b):
                    continue
                s -= _BINOM[a][i] * _BINOM[b][j] * out[(i, j)] * g.e[(a - i, b - j)]
            out[(a, b)] = s / g.value
        return JetScalar(f.order, out)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    # -- elementary functions ---------------------------------------------

    def log(self) -> "JetScalar":
        """Principal-branch ln; derivative entries need no branch."""
        import cmath

        if self.value == 0:
            raise ZeroDivisionError("jet log of zero value")
        out = {(0, 0): cmath.log(self.value)}
        n = self.order
        if n >= 1:
            u = self.shift_d() / self.truncate(n - 1)     # d ln f = df / f
            v = self.shift_dbar() / self.truncate(n - 1)  # dbar ln f
            for a, b in jet_orders(n):
                if a >= 1:
                    out[(a, b)] = u.e[(a - 1, b)]
                elif b >= 1:
                    out[(a, b)] = v.e[(a, b - 1)]
        return JetScalar(n, out)

    def exp(self) -> "JetScalar":
        import cmath

        n = self.order
        out = {(0, 0): cmath.exp(self.value)}
        # recursion d^a dbar^b e = Leibniz(e, df) one derivative down
        for a, b in jet_orders(n):
            if (a, b) == (0, 0):
                continue
            if a >= 1:
                s = 0j
                for i, j in _pairs_below(a - 1, b):
                    s += _BINOM[a - 1][i] * _BINOM[b][j] * out[(i, j)] * self.e[(a - i, b - j)]
            else:
                s = 0j
                for i, j in _pairs_below(a, b - 1):
                    s += _BINOM[a][i] * _BINOM[b - 1][j] * out[(i, j)] * self.e[(a - i, b - j + 1)]
            out[(a, b)] = s
        return JetScalar(n, out)

    def sqrt(self, branch_value: complex | None = None) -> "JetScalar":
        """Square-root jet.  ``branch_value`` picks the root at the point
        (defaults to the principal one); the tower follows that branch."""
        import cmath

        s0 = cmath.sqrt(self.value) if branch_value is None else complex(branch_value)
        if s0 == 0:
            raise ZeroDivisionError("jet sqrt at a zero value")
        out = {(0, 0): s0}
        for a, b in jet_orders(self.order):
            if (a, b) == (0, 0):
                continue
            s = self.e[(a, b)]
            for i, j in _pairs_below(a, b):
                if (i, j) in ((0, 0), (a, b)):
                    continue
                s -= _BINOM[a][i] * _BINOM[b][j] * out[(i, j)] * out[(a - i, b - j)]
            out[(a, b)] = s / (2 * s0)
        return JetScalar(self.order, out)

    def cpow(self, c: complex) -> "JetScalar":
        """Principal-branch power with constant exponent."""
        return (self.log() * c).exp()

    @property
    def real(self) -> float:
        return self.value.real


def jet_from_expr(jet: Jet) -> JetScalar:
    return JetScalar.from_jet(jet)


class MatrixJet:
    """Derivative tower of a dense square complex matrix field."""

    __slots__ = ("order", "n", "e")

    def __init__(self, order: int, n: int, entries: dict):
        self.order = order
        self.n = n
        self.e = entries

    @classmethod
    def identity(cls, n: int, order: int) -> "MatrixJet":
        e = {k: np.zeros((n, n), dtype=complex) for k in jet_orders(order)}
        e[(0, 0)] = np.eye(n, dtype=complex)
        return cls(order, n, e)

    @classmethod
    def constant(cls, mat: np.ndarray, order: int) -> "MatrixJet":
        n = mat.shape[0]
        e = {k: np.zeros((n, n), dtype=complex) for k in jet_orders(order)}
        e[(0, 0)] = np.array(mat, dtype=complex)
        return cls(order, n, e)

    @property
    def value(self) -> np.ndarray:
        return self.e[(0, 0)]

    def d(self, a: int, b: int) -> np.ndarray:
        return self.e[(a, b)]

    def truncate(self, order: int) -> "MatrixJet":
        return MatrixJet(order, self.n, {k: self.e[k] for k in jet_orders(order)})

    def shift_d(self) -> "MatrixJet":
        n = self.order - 1
        return MatrixJet(n, self.n, {(a, b): self.e[(a + 1, b)] for a, b in jet_orders(n)})

    def shift_dbar(self) -> "MatrixJet":
        n = self.order - 1
        return MatrixJet(n, self.n, {(a, b): self.e[(a, b + 1)] for a, b in jet_orders(n)})

    def dagger(self) -> "MatrixJet":
        """Pointwise conjugate transpose (swaps d and dbar in the tower)."""
        return MatrixJet(
            self.order, self.n,
            {(a, b): self.e[(b, a)].conj().T for a, b in jet_orders(self.order)},
        )

    def _match(self, other: "MatrixJet"):
        if other.order < self.order:
            return self.truncate(other.order), other
        if other.order > self.order:
            return self, other.truncate(self.order)
        return self, other

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        a, b = self._match(other)
        return MatrixJet(a.order, a.n, {k: a.e[k] + b.e[k] for k in jet_orders(a.order)})

    def __sub__(self, other: "MatrixJet") -> "MatrixJet":
        a, b = self._match(other)
        return MatrixJet(a.order, a.n, {k: a.e[k] - b.e[k] for k in jet_orders(a.order)})

    def __neg__(self) -> "MatrixJet":
        return MatrixJet(self.order, self.n, {k: -v for k, v in self.e.items()})

    def __matmul__(self, other: "MatrixJet") -> "MatrixJet":
        f, g = self._match(other)
        out = {}
        for a, b in jet_orders(f.order):
            s = np.zeros((f.n, f.n), dtype=complex)
            for i, j in _pairs_below(a, b):
                s += (_BINOM[a][i] * _BINOM[b][j]) * (f.e[(i, j)] @ g.e[(a - i, b - j)])
            out[(a, b)] = s
        return MatrixJet(f.order, f.n, out)

    def scale(self, s: JetScalar) -> "MatrixJet":
        if s.order < self.order:
            me = self.truncate(s.order)
        else:
            me, s = self, s.truncate(self.order)
        out = {}
        for a, b in jet_orders(me.order):
            acc = np.zeros((me.n, me.n), dtype=complex)
            for i, j in _pairs_below(a, b):
                acc += (_BINOM[a][i] * _BINOM[b][j] * s.e[(i, j)]) * me.e[(a - i, b - j)]
            out[(a, b)] = acc
        return MatrixJet(me.order, me.n, out)

    def commutator(self, other: "MatrixJet") -> "MatrixJet":
        return (self @ other) - (other @ self)

    def trace(self) -> JetScalar:
        return JetScalar(self.order, {k: complex(np.trace(v)) for k, v in self.e.items()})


def matrix_jet_from_scalars(entries, order: int) -> MatrixJet:
    """Build a MatrixJet from an NxN nested list of JetScalars."""
    n = len(entries)
    out = {}
    for key in jet_orders(order):
        m = np.empty((n, n), dtype=complex)
        for r in range(n):
            for c in range(n):
                m[r, c] = entries[r][c].e[key]
        out[key] = m
    return MatrixJet(order, n, out)


def outer_jet(u: list, v: list, order: int) -> MatrixJet:
    """Dyad D with D_ij = u_i * v_j from component JetScalars (no implicit
    conjugation; callers pass the conjugate field where one is meant)."""
    n = len(u)
    out = {}
    for a, b in jet_orders(order):
        m = np.zeros((n, n), dtype=complex)
        for i, j in _pairs_below(a, b):
            coef = _BINOM[a][i] * _BINOM[b][j]
            uvec = np.array([x.e[(i, j)] for x in u])
            vvec = np.array([x.e[(a - i, b - j)] for x in v])
            m += coef * np.outer(uvec, vvec)
        out[(a, b)] = m
    return MatrixJet(order, n, out)
