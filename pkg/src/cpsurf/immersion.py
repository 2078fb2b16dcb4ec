"""Weierstrass immersion X(xi, xibar) in su(N) and its real coordinates.

The surface element is the closed 1-form dX = i(Kdag dxi + K dxibar); X is
recovered either by adaptive Gauss quadrature along a polyline (any solution)
or in closed form for (anti-)holomorphic solutions:

    X = -i (P - P0)   holomorphic,      X = +i (P - P0)   anti-holomorphic,

with P0 = diag(0, 1, ..., 1) the projector at w = 0.  The -i P form of the
immersion is conventionally quoted without the constant; subtracting P0 is
exactly the choice of integration constants that makes the closed-form real
coordinates below vanish at w = 0, and it keeps X traceless.

Real coordinates: su(2) uses the Pauli basis, X = i sum_k X_k sigma_k; su(3)
uses the anti-Hermitian Gell-Mann-type basis s_1..s_8 with the sign pattern

    X = sum_{k in 2,5,6} X_k s_k  -  sum_{k in 1,3,4,7,8} X_k s_k

which is what the split of dX into real symmetric/skew-symmetric 1-forms
produces.  Both decompositions round-trip exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import model as md
from .numutil import gauss_legendre

__all__ = [
    "ImmersionError",
    "PathError",
    "ImmersionField",
    "PathSpec",
    "PAULI",
    "GELLMANN",
    "GELLMANN_SIGNS",
    "immerse_holomorphic",
    "immerse_by_path",
    "immerse_dc_simplified",
    "DCImmersion",
    "real_coordinates",
    "assemble_su2",
    "assemble_su3",
    "base_projector",
    "sphere_relation_cp1",
    "affine_sphere_relation_cp2",
    "soliton_sphere_relation",
    "nonsplitting_relations",
]


class ImmersionError(Exception):
    pass


class PathError(ImmersionError):
    pass


PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]

# anti-Hermitian su(3) basis with tr(s_i s_j) = -2 delta_ij
GELLMANN = [
    np.array([[0, 0, 0], [0, 0, -1j], [0, -1j, 0]]),
    np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=complex),
    np.array([[0, 0, 0], [0, -1j, 0], [0, 0, 1j]]),
    np.array([[-2j, 0, 0], [0, 1j, 0], [0, 0, 1j]]) / math.sqrt(3),
    np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex),
    np.array([[0, 0, -1], [0, 0, 0], [1, 0, 0]], dtype=complex),
    np.array([[0, 1j, 0], [1j, 0, 0], [0, 0, 0]]),
    np.array([[0, 0, 1j], [0, 0, 0], [1j, 0, 0]]),
]

Y_MINUS = np.array([[0, 0, 0], [0, 0, 0], [0, 1, 0]], dtype=complex)
Y_PLUS = np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)

# sign carried by each coordinate in the su(3) reassembly (see module docstring)
GELLMANN_SIGNS = np.array([-1, 1, -1, -1, 1, 1, -1, -1], dtype=float)


@dataclass
class ImmersionField:
    xi: complex
    matrix: np.ndarray
    base_point: complex | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def anti_hermiticity(self) -> float:
        return float(np.linalg.norm(self.matrix + self.matrix.conj().T))


@dataclass
class PathSpec:
    waypoints: list
    order: int = 15
    max_depth: int = 12
    tol: float = 1e-10
    exclusion_radius: float = 1e-6

    def validate(self, singularities=()) -> None:
        if len(self.waypoints) < 2:
            raise PathError("a path needs at least two waypoints")
        for w in self.waypoints:
            for sing in singularities:
                if abs(complex(w) - complex(sing)) <= self.exclusion_radius:
                    raise PathError(f"waypoint {w} hits declared singularity {sing}")


def base_projector(n: int) -> np.ndarray:
    """P at w = 0: diag(0, 1, ..., 1)."""
    p0 = np.eye(n, dtype=complex)
    p0[0, 0] = 0.0
    return p0


def immerse_holomorphic(s: md.AffineSolution, xi: complex, classification: str | None = None,
                        check_points=None) -> ImmersionField:
    """Closed-form immersion X = -iP + const for holomorphic solutions
    (+iP - const for anti-holomorphic); rejects mixed solutions."""
    if classification is None:
        pts = check_points if check_points is not None else _probe_points(xi)
        classification = md.holomorphy_check(s, pts).classification
    p = md.projector_at(s, xi).matrix - base_projector(s.n)
    if classification == "holomorphic":
        return ImmersionField(xi, -1j * p)
    if classification == "anti-holomorphic":
        return ImmersionField(xi, 1j * p)
    raise ImmersionError(f"closed-form immersion needs (anti-)holomorphic input, got {classification}")


def _probe_points(xi: complex):
    base = complex(xi)
    return [base + 0.13 + 0.07j, base - 0.21 + 0.11j, base + 0.05 - 0.17j]


def _segment_form(s: md.AffineSolution, z: complex, dz: complex) -> np.ndarray:
    kp = md.k_matrices_at(s, z)
    return 1j * (kp.kdag * dz + kp.k * dz.conjugate())


def _gauss_segment(s, z0, z1, order):
    nodes, weights = gauss_legendre(order)
    dz = z1 - z0
    acc = None
    for t, w in zip(nodes, weights):
        z = z0 + 0.5 * (t + 1.0) * dz
        val = _segment_form(s, z, dz) * (0.5 * w)
        acc = val if acc is None else acc + val
    return acc


def _adaptive_segment(s, z0, z1, order, tol, depth):
    whole = _gauss_segment(s, z0, z1, order)
    mid = 0.5 * (z0 + z1)
    left = _gauss_segment(s, z0, mid, order)
    right = _gauss_segment(s, mid, z1, order)
    refined = left + right
    err = np.linalg.norm(refined - whole)
    if err < tol * (1.0 + np.linalg.norm(refined)):
        return refined
    if depth <= 0:
        raise PathError(f"segment quadrature failed to converge near {mid} (error {err:.3e})")
    half_tol = tol / 1.4
    return (_adaptive_segment(s, z0, mid, order, half_tol, depth - 1)
            + _adaptive_segment(s, mid, z1, order, half_tol, depth - 1))


def immerse_by_path(
    s: md.AffineSolution,
    path: PathSpec,
    base_value: np.ndarray | None = None,
    residual_warn: float = 1e-6,
) -> ImmersionField:
    """X at the path end from i int (Kdag dxi + K dxibar), anchored at
    ``base_value`` (zero matrix by default) at the first waypoint.

    Anti-Hermiticity of the result is asserted, not enforced, so quadrature
    or solution errors surface."""
    path.validate(s.singularities)
    samples = [0.5 * (path.waypoints[i] + path.waypoints[i + 1]) for i in range(len(path.waypoints) - 1)]
    worst = max(md.el_residual_at(s, z).max for z in samples)
    if worst > residual_warn:
        warnings.warn(f"equations-of-motion residual {worst:.2e} along path; "
                      "the 1-form may not be closed", stacklevel=2)
    total = np.zeros((s.n, s.n), dtype=complex) if base_value is None else np.array(base_value, dtype=complex)
    for z0, z1 in zip(path.waypoints[:-1], path.waypoints[1:]):
        z0, z1 = complex(z0), complex(z1)
        if z0 == z1:
            continue
        total = total + _adaptive_segment(s, z0, z1, path.order, path.tol, path.max_depth)
    out = ImmersionField(complex(path.waypoints[-1]), total, base_point=complex(path.waypoints[0]))
    if base_value is None and out.anti_hermiticity > 1e-8 * (1.0 + np.linalg.norm(total)):
        raise ImmersionError(f"quadrature result is not anti-Hermitian: {out.anti_hermiticity:.3e}")
    return out


# -- differential-constraint (Proposition-style) immersion -------------------

@dataclass
class DCImmersion:
    x_l: np.ndarray            # L-data integral
    x_m: np.ndarray            # M-data integral
    divergence: np.ndarray     # i (P(xi) - P(xi0)), the M - L difference
    divergence_residual: float


def _ml_forms(s: md.AffineSolution, z: complex, gauge) -> tuple[np.ndarray, np.ndarray]:
    """Values of (L, M) = (-dbarP (I-P), (I-P) dbarP); representative-free."""
    fields = md.field_jets(s, s.point(z), 1)
    pj = md.projector_jet(fields)
    eye = np.eye(s.n)
    p = pj.value
    dbp = pj.d(0, 1)
    l_mat = -dbp @ (eye - p)
    m_mat = (eye - p) @ dbp
    return l_mat, m_mat


def immerse_dc_simplified(
    s: md.AffineSolution,
    path: PathSpec,
    gauge=None,
    dc_tol: float = 1e-8,
) -> DCImmersion:
    """Split immersion for solutions satisfying the differential constraints
    (after the ``gauge`` rescaling of the homogeneous field, see
    model.dc_residual_at): integrates the L- and M-data separately.

    The two integrals parametrize the same surface and differ by the
    integrated total divergence:  X_M - X_L = i (P - P0); their sum is the
    full Weierstrass integral i int (Kdag dxi + K dxibar).
    """
    path.validate(s.singularities)
    samples = [0.5 * (path.waypoints[i] + path.waypoints[i + 1]) for i in range(len(path.waypoints) - 1)]
    worst = max(md.dc_residual_at(s, z, gauge=gauge) for z in samples)
    if worst > dc_tol:
        raise ImmersionError(f"differential-constraint residual {worst:.2e} exceeds {dc_tol:.1e}")

    def seg(kind, z, dz):
        l_mat, m_mat = _ml_forms(s, z, gauge)
        mat = l_mat if kind == "l" else m_mat
        return 1j * (mat.conj().T * dz + mat * dz.conjugate())

    def integrate(kind):
        nodes, weights = gauss_legendre(path.order)
        total = np.zeros((s.n, s.n), dtype=complex)
        for z0, z1 in zip(path.waypoints[:-1], path.waypoints[1:]):
            z0, z1 = complex(z0), complex(z1)
            dz = z1 - z0
            if dz == 0:
                continue
            pieces = 64  # fixed fine splitting; the adaptive driver is the K route
            for k in range(pieces):
                a = z0 + dz * k / pieces
                step = dz / pieces
                for t, w in zip(nodes, weights):
                    total = total + (0.5 * w) * seg(kind, a + 0.5 * (t + 1) * step, step)
        return total

    x_l = integrate("l")
    x_m = integrate("m")
    p_now = md.projector_at(s, complex(path.waypoints[-1])).matrix
    p_base = md.projector_at(s, complex(path.waypoints[0])).matrix
    divergence = 1j * (p_now - p_base)
    resid = float(np.linalg.norm((x_m - x_l) - divergence))
    return DCImmersion(x_l, x_m, divergence, resid)


# --------------------------------------------------------------------------
# Real coordinates
# --------------------------------------------------------------------------

def real_coordinates(x: ImmersionField | np.ndarray, basis: str) -> np.ndarray:
    mat = x.matrix if isinstance(x, ImmersionField) else np.asarray(x, dtype=complex)
    if basis == "pauli":
        if mat.shape != (2, 2):
            raise ImmersionError("pauli basis needs N = 2")
        coords = np.array([np.trace(mat @ sig) / 2j for sig in PAULI])
    elif basis == "gellmann":
        if mat.shape != (3, 3):
            raise ImmersionError("gellmann basis needs N = 3")
        coords = np.array([
            eps * (-0.5) * np.trace(mat @ sj) for eps, sj in zip(GELLMANN_SIGNS, GELLMANN)
        ])
    else:
        raise ImmersionError(f"unknown basis '{basis}'")
    if np.max(np.abs(coords.imag)) > 1e-9 * (1.0 + np.max(np.abs(coords))):
        raise ImmersionError("coordinates came out non-real; input is not in su(N)")
    return coords.real


def assemble_su2(coords) -> np.ndarray:
    return 1j * sum(c * sig for c, sig in zip(coords, PAULI))


def assemble_su3(coords) -> np.ndarray:
    return sum(eps * c * sj for eps, c, sj in zip(GELLMANN_SIGNS, coords, GELLMANN))


# --------------------------------------------------------------------------
# Surface relations
# --------------------------------------------------------------------------

def sphere_relation_cp1(coords) -> float:
    """Sphere of radius 1/2 centered at (0, 0, -1/2)."""
    x1, x2, x3 = coords
    return abs(x1**2 + x2**2 + (x3 + 0.5) ** 2 - 0.25)


def affine_sphere_relation_cp2(coords) -> float:
    x = coords
    return abs(4 * x[0] ** 2 + 4 * x[1] ** 2 + 4 * x[2] ** 2 + (2 / math.sqrt(3)) * x[3]
               + x[4] ** 2 + x[5] ** 2 + x[6] ** 2 + x[7] ** 2)


def soliton_sphere_relation(coords) -> float:
    """Unit sphere in the (X1, X6, X7) subspace."""
    x = coords
    return abs(x[0] ** 2 + x[5] ** 2 + x[6] ** 2 - 1.0)


def nonsplitting_relations(coords) -> float:
    x = coords
    return max(
        abs(x[0] ** 2 + x[1] ** 2 - 1.0 / 27.0),
        abs(x[4] ** 2 + x[6] ** 2 - 1.0 / 27.0),
        abs(x[5] ** 2 + x[7] ** 2 - 1.0 / 27.0),
    )
