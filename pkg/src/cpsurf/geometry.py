"""Induced geometry of the immersed surface: metric, Gaussian and mean
curvature, Christoffel symbols, second fundamental form, Willmore functional
and topological charge.

The metric components are g_xixi = -J, g_xibar,xibar = -Jbar,
g_xi,xibar = q with det g = |J|^2 - q^2.  The scalar curvature has two
branches:

    J = 0:   K = -(1/q) d dbar ln q
    J != 0:  K = (1/(2 sqrt(g))) dbar [ (q/sqrt(g)) d ln(-q^2/J) ]

The second branch is evaluated in a sqrt-free rearrangement

    K = (1/(2g)) [ (dbar q - q dbar g / (2g)) s + q dbar s ],
    s = 2 dq/q - dJ/J,

which is algebraically identical and avoids picking a root of the (negative)
determinant.  All derivative towers come from the jet algebra, with an
optional five-point finite-difference Laplacian as an independent oracle.

Area integrals use the measure convention d(xi) d(xibar) = c dxi1 dxi2 with a
single global constant c (default 2.0) shared by the Willmore functional and
the topological charge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import model as md
from .jets import JetScalar
from .numutil import gauss_legendre, pairwise_sum

__all__ = [
    "GeometryError",
    "DegenerateMetricError",
    "MetricSample",
    "CurvatureSample",
    "Region",
    "MEASURE_CONSTANT",
    "metric_at",
    "christoffel_at",
    "gaussian_curvature_at",
    "gaussian_curvature_fd",
    "mean_curvature_at",
    "mean_curvature_norm",
    "second_fundamental_form_at",
    "SecondFundamentalForm",
    "willmore_integrand",
    "willmore",
    "QuadratureResult",
    "topological_charge",
]

MEASURE_CONSTANT = 2.0  # d(xi) d(xibar) = c * dxi1 dxi2

BRANCH_THRESHOLD = 1e-12  # |J| < thr*(1+q) selects the conformal branch
Q_MIN = 1e-10


class GeometryError(Exception):
    pass


class DegenerateMetricError(GeometryError):
    pass


@dataclass
class MetricSample:
    g_xixi: complex
    g_xibarxibar: complex
    g_xixibar: float

    @property
    def j(self) -> complex:
        return -self.g_xixi

    @property
    def q(self) -> float:
        return self.g_xixibar

    @property
    def det(self) -> float:
        return abs(self.j) ** 2 - self.q**2


@dataclass
class CurvatureSample:
    gaussian: float
    mean: np.ndarray
    gamma_111: complex
    gamma_222: complex


@dataclass
class Region:
    center: complex
    half_width: float


def metric_at(s: md.AffineSolution, p) -> MetricSample:
    inv = md.scalar_invariants_at(s, p)
    return MetricSample(-inv.j, -inv.jbar, inv.q)


def christoffel_at(s: md.AffineSolution, p) -> tuple[complex, complex]:
    """Nonzero Christoffel symbols of a conformal sample:
    Gamma^1_11 = dq/q and Gamma^2_22 = dbar q / q."""
    jets = md.invariant_jets(s, p, order=1)
    q = jets.q.value.real
    if q < Q_MIN:
        raise DegenerateMetricError(f"q = {q:.3e} below threshold")
    return jets.q.d(1, 0) / q, jets.q.d(0, 1) / q


def gaussian_curvature_at(
    s: md.AffineSolution,
    p,
    branch_threshold: float = BRANCH_THRESHOLD,
    q_min: float = Q_MIN,
) -> float:
    jets = md.invariant_jets(s, p, order=2)
    q0 = jets.q.value.real
    if q0 < q_min:
        raise DegenerateMetricError(f"q = {q0:.3e} below threshold")
    j0 = jets.j.value
    if abs(j0) < branch_threshold * (1.0 + q0):
        # conformal branch: K = -(1/q) d dbar ln q
        lap = jets.q.d(1, 1) / q0 - jets.q.d(1, 0) * jets.q.d(0, 1) / q0**2
        k = -lap / q0
    else:
        qj = jets.q.truncate(1)
        jj = jets.j.truncate(1)
        g = jj * jets.jbar.truncate(1) - qj * qj
        g0 = g.value.real
        if abs(g0) < 1e-300 or abs(abs(j0) - q0) < 1e-15 * (1 + q0):
            raise DegenerateMetricError("metric determinant vanishes in the J != 0 branch")
        sj = (jets.q.shift_d() * 2.0) / jets.q.truncate(1) - jets.j.shift_d() / jets.j.truncate(1)
        dbq = jets.q.d(0, 1)
        dbg = g.d(0, 1)
        k = (1.0 / (2.0 * g.value)) * ((dbq - jets.q.value * dbg / (2.0 * g.value)) * sj.value
                                       + jets.q.value * sj.d(0, 1))
    if abs(k.imag) > 1e-7 * (1.0 + abs(k)):
        raise GeometryError(f"curvature came out non-real: {k}")
    return float(k.real)


def gaussian_curvature_fd(s: md.AffineSolution, p, step: float | None = None) -> float:
    """Finite-difference oracle for the conformal branch: d dbar ln q is a
    quarter of the 2D Laplacian, taken with a five-point stencil."""
    xi = p.xi if hasattr(p, "xi") else complex(p)
    h = step if step is not None else 1e-4 * (1.0 + abs(xi))

    def lnq(z):
        return math.log(md.scalar_invariants_at(s, z).q)

    lap = (lnq(xi + h) + lnq(xi - h) + lnq(xi + 1j * h) + lnq(xi - 1j * h) - 4.0 * lnq(xi)) / h**2
    q0 = md.scalar_invariants_at(s, xi).q
    return -0.25 * lap / q0


def mean_curvature_at(s: md.AffineSolution, p, conformal_tol: float = 1e-8) -> np.ndarray:
    """Mean curvature vector H = (2/q) d dbar X with d dbar X = i dK."""
    jets = md.invariant_jets(s, p, order=1)
    q0 = jets.q.value.real
    if q0 < Q_MIN:
        raise DegenerateMetricError(f"q = {q0:.3e} below threshold")
    if abs(jets.j.value) > conformal_tol * (1.0 + q0):
        raise GeometryError(f"mean curvature requires a conformal sample, |J| = {abs(jets.j.value):.3e}")
    ddbar_x = 1j * jets.k.d(1, 0)
    return (2.0 / q0) * ddbar_x


def mean_curvature_norm(h: np.ndarray) -> float:
    return math.sqrt(max(md.su_pairing(h, h).real, 0.0))


@dataclass
class SecondFundamentalForm:
    coeff_xixi: np.ndarray    # d^2 X - (dq/q) dX
    coeff_mixed: np.ndarray   # d dbar X (the form carries it with weight 2)
    coeff_xibarxibar: np.ndarray


def second_fundamental_form_at(s: md.AffineSolution, p) -> SecondFundamentalForm:
    jets = md.invariant_jets(s, p, order=1)
    q0 = jets.q.value.real
    if q0 < Q_MIN:
        raise DegenerateMetricError(f"q = {q0:.3e} below threshold")
    dx = 1j * jets.kdag.value
    dbx = 1j * jets.k.value
    d2x = 1j * jets.kdag.d(1, 0)
    db2x = 1j * jets.k.d(0, 1)
    ddbx = 1j * jets.k.d(1, 0)
    dq = jets.q.d(1, 0)
    dbq = jets.q.d(0, 1)
    return SecondFundamentalForm(
        d2x - (dq / q0) * dx,
        ddbx,
        db2x - (dbq / q0) * dbx,
    )


# --------------------------------------------------------------------------
# Willmore functional
# --------------------------------------------------------------------------

def willmore_integrand(s: md.AffineSolution, xi: complex) -> complex:
    """Pointwise -4i <[dP, dbarP]^2> / q with <.> the -tr/2 pairing."""
    fields = md.field_jets(s, s.point(xi), 1)
    pj = md.projector_jet(fields)
    c = pj.d(1, 0) @ pj.d(0, 1) - pj.d(0, 1) @ pj.d(1, 0)
    scal = -0.5 * complex(np.trace(c @ c))
    inv = md.scalar_invariants_at(s, xi)
    if inv.q < Q_MIN:
        raise DegenerateMetricError(f"q = {inv.q:.3e} below threshold")
    return -4j * scal / inv.q


@dataclass
class QuadratureResult:
    value: complex
    levels: list
    converged: bool

    @property
    def convergence(self) -> float:
        if len(self.levels) < 2:
            return math.inf
        a, b = self.levels[-2], self.levels[-1]
        return abs(b - a) / max(abs(b), 1e-300)


def _square_quadrature(f, region: Region, cells: int, order: int = 4) -> complex:
    nodes, weights = gauss_legendre(order)
    c = complex(region.center)
    h = region.half_width
    side = 2.0 * h / cells
    parts = []
    for iy in range(cells):
        y0 = c.imag - h + iy * side
        for ix in range(cells):
            x0 = c.real - h + ix * side
            acc = 0j
            for a, wa in zip(nodes, weights):
                x = x0 + 0.5 * side * (a + 1.0)
                for b, wb in zip(nodes, weights):
                    y = y0 + 0.5 * side * (b + 1.0)
                    acc += wa * wb * f(complex(x, y))
            parts.append(acc * (side / 2.0) ** 2)
    return pairwise_sum(parts)


def willmore(
    s: md.AffineSolution,
    region: Region,
    resolution: int = 4,
    levels: int = 3,
    rel_tol: float = 1e-6,
    measure: float = MEASURE_CONSTANT,
) -> QuadratureResult:
    """Willmore functional over a square region by composite Gauss quadrature
    under cell refinement; ``resolution`` is the coarsest cell count per side."""
    vals = []
    cells = resolution
    for _ in range(levels):
        vals.append(measure * _square_quadrature(lambda z: willmore_integrand(s, z), region, cells))
        cells *= 2
    res = QuadratureResult(vals[-1], vals, False)
    res.converged = res.convergence < rel_tol
    return res


# --------------------------------------------------------------------------
# Topological charge
# --------------------------------------------------------------------------

def _disk_integral(f, n_r: int, n_theta: int) -> float:
    """Integral over the unit disk: Gauss-Legendre radially, trapezoid in the
    periodic angle."""
    nodes, weights = gauss_legendre(n_r)
    dtheta = 2.0 * math.pi / n_theta
    parts = []
    for rv, rw in zip(nodes, weights):
        r = 0.5 * (rv + 1.0)
        for k in range(n_theta):
            theta = k * dtheta
            z = r * complex(math.cos(theta), math.sin(theta))
            parts.append(0.5 * rw * dtheta * r * f(z))
    return pairwise_sum(parts)


def topological_charge(
    s: md.AffineSolution,
    resolution: int = 24,
    levels: int = 3,
    measure: float = MEASURE_CONSTANT,
) -> QuadratureResult:
    """Q = -(1/8pi) int q over the sphere, split into the unit disk and the
    inverted chart xi -> 1/zeta (Jacobian 1/|zeta|^4).

    Defined for rational holomorphic solutions; for anything else the sphere
    integral need not exist and a warning is issued.
    """
    if not s.defined_on_sphere:
        warnings.warn("solution not marked as rational/defined on the sphere; "
                      "the charge integral may not converge", stacklevel=2)

    def q_direct(z):
        return md.scalar_invariants_at(s, z).q

    def q_inverted(z):
        return md.scalar_invariants_at(s, 1.0 / z).q / abs(z) ** 4

    vals = []
    n = resolution
    for _ in range(levels):
        total = _disk_integral(q_direct, n, 2 * n) + _disk_integral(q_inverted, n, 2 * n)
        vals.append(-measure * total / (8.0 * math.pi))
        n *= 2
    res = QuadratureResult(vals[-1], vals, False)
    res.converged = res.convergence < 1e-5
    return res
