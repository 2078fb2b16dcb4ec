"""Moving frame on conformally parametrized surfaces in su(3) built from
holomorphic CP^2 solutions.

The tangent pair is eta_1 = dX, eta_2 = dbarX; the six normals are
eta_j = phi^dag s_j phi for an SU(3)-valued phi decomposed into three SU(2)
factors parametrized by (a_1, b_1), (alpha, phase), (a_2, b_2).  The frame
data at a point comes from

    delta = wbar_1 dw_1 + wbar_2 dw_2
    beta  = w_1 wbar_2 dw_2 - (1+|w_2|^2) dw_1
    gamma = wbar_1 w_2 dw_1 - (1+|w_1|^2) dw_2
    rho   = |dw_1|^2 + |dw_2|^2 + |w_2 dw_1 - w_1 dw_2|^2
    u     = ln(rho / A_2^2)

with sin^2(alpha) = (|dw_1|^2+|dw_2|^2)/rho and cos^2(alpha) the Wronskian
share.  The U(1) gauge phase is free; a_1 carries a residual sqrt branch
that no inner product, reconstruction residual or tangent vector can see
(flipping (a_1, b_1) jointly flips eta_5..eta_8 only).  We fix it to the
principal root, which is also the convention of the closed-form normal
tables for the (xi, xi^2/2) surface.

Gauss-Weingarten data: J_j = <d^2X, eta_j>, H_j = <d dbarX, eta_j>,
S_jk = <d eta_j, eta_k> (antisymmetric), with the tangential coefficients
-(1/q)(H_j dX + J_j dbarX) fixed by the conformal metric.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import model as md
from .immersion import GELLMANN, Y_MINUS, Y_PLUS
from .jets import JetScalar, MatrixJet, matrix_jet_from_scalars

__all__ = [
    "FrameError",
    "FrameDegenerateError",
    "FrameParams",
    "MovingFrame",
    "GaussWeingarten",
    "frame_tangents",
    "frame_params",
    "su3_matrix",
    "frame_normals",
    "moving_frame",
    "appendix_normals",
    "gauss_weingarten",
]


class FrameError(Exception):
    pass


class FrameDegenerateError(FrameError):
    pass


@dataclass
class FrameParams:
    a1: complex
    b1: complex
    a2: complex
    b2: complex
    alpha: float
    phase: float
    u: float

    @property
    def sin_alpha(self) -> float:
        return math.sin(self.alpha)

    @property
    def cos_alpha(self) -> float:
        return math.cos(self.alpha)

    def unit_defects(self) -> tuple[float, float]:
        return (
            abs(abs(self.a1) ** 2 + abs(self.b1) ** 2 - 1.0),
            abs(abs(self.a2) ** 2 + abs(self.b2) ** 2 - 1.0),
        )


@dataclass
class MovingFrame:
    eta: list          # eta_1..eta_8 as 3x3 arrays
    u: float
    params: FrameParams

    @property
    def tangents(self):
        return self.eta[:2]

    @property
    def normals(self):
        return self.eta[2:]


def _require_cp2(s: md.AffineSolution):
    if s.n != 3:
        raise FrameError(f"the moving frame is specific to N = 3, got N = {s.n}")


def _frame_scalars(fields: md.FieldJets):
    """(delta, beta, gamma, rho, a2norm, wron) as jets one order lower."""
    w1, w2 = fields.f[1], fields.f[2]
    wb1, wb2 = fields.fbar[1], fields.fbar[2]
    dw1, dw2 = w1.shift_d(), w2.shift_d()
    order = dw1.order
    w1, w2, wb1, wb2 = (x.truncate(order) for x in (w1, w2, wb1, wb2))
    one = JetScalar.constant(1.0, order)
    delta = wb1 * dw1 + wb2 * dw2
    beta = w1 * wb2 * dw2 - (one + w2 * wb2) * dw1
    gamma = wb1 * w2 * dw1 - (one + w1 * wb1) * dw2
    wron = w2 * dw1 - w1 * dw2
    rho = dw1 * dw1.conj() + dw2 * dw2.conj() + wron * wron.conj()
    a2norm = one + w1 * wb1 + w2 * wb2
    return delta, beta, gamma, rho, a2norm, wron


def frame_tangents(s: md.AffineSolution, p) -> tuple[np.ndarray, np.ndarray, float]:
    """(eta_1, eta_2, u) in the explicit delta/beta/gamma form; eta_2 is the
    K matrix rotated by i, which is the cross-check anchoring the frame."""
    _require_cp2(s)
    p = s.point(p) if not isinstance(p, md.ex.EvalPoint) else p
    fields = md.field_jets(s, p, 1)
    delta, beta, gamma, rho, a2norm, _ = _frame_scalars(fields)
    rho0 = rho.value.real
    if rho0 <= 1e-300:
        raise FrameDegenerateError(f"rho = 0 at xi = {p.xi} (branch point)")
    a2sq = a2norm.value.real**2
    col = np.array([1.0, fields.fbar[1].value, fields.fbar[2].value])
    row = np.array([delta.value, beta.value, gamma.value])
    eta1 = (-1j / a2sq) * np.outer(col, row)
    colb = np.conj(row)
    roww = np.array([1.0, fields.f[1].value, fields.f[2].value])
    eta2 = (-1j / a2sq) * np.outer(colb, roww)
    u = math.log(rho0 / a2sq)
    return eta1, eta2, u


def _params_jets(fields: md.FieldJets, phase: float):
    """All frame parameters as jets (order = fields.order - 1)."""
    delta, beta, gamma, rho, a2norm, wron = _frame_scalars(fields)
    order = delta.order
    rho0 = rho.value.real
    if rho0 <= 1e-300:
        raise FrameDegenerateError("rho = 0 (branch point)")
    sin2 = (fields.f[1].shift_d() * fields.f[1].shift_d().conj()
            + fields.f[2].shift_d() * fields.f[2].shift_d().conj()) / rho
    cos2 = (wron * wron.conj()) / rho
    if cos2.value.real < 1e-24:
        raise FrameDegenerateError("cos(alpha) vanished (Wronskian w2 dw1 - w1 dw2 = 0)")
    if sin2.value.real < 1e-24:
        raise FrameDegenerateError("sin(alpha) vanished (dw1 = dw2 = 0)")
    sin_a = sin2.sqrt()   # nonnegative principal roots
    cos_a = cos2.sqrt()
    u = (rho / (a2norm * a2norm)).log()
    phase_fac = JetScalar.constant(cmath.exp(1j * phase), order)
    kappa = delta * cos_a / (wron * phase_fac)
    emu4 = (u * (-0.25)).exp()
    a1 = (delta * kappa).sqrt() * emu4 / (a2norm * sin_a)
    b1 = a1 / kappa
    dbar_wb1 = fields.fbar[1].shift_dbar().truncate(order)
    dbar_wb2 = fields.fbar[2].shift_dbar().truncate(order)
    denom = rho * sin_a * cos_a
    a2 = -(phase_fac * dbar_wb2 * wron) / denom
    b2 = (phase_fac * dbar_wb1 * wron) / denom
    return a1, b1, a2, b2, sin_a, cos_a, u


def frame_params(s: md.AffineSolution, p, phase: float = 0.0) -> FrameParams:
    _require_cp2(s)
    p = s.point(p) if not isinstance(p, md.ex.EvalPoint) else p
    fields = md.field_jets(s, p, 1)
    a1, b1, a2, b2, sin_a, cos_a, u = _params_jets(fields, phase)
    alpha = math.atan2(sin_a.value.real, cos_a.value.real)
    return FrameParams(a1.value, b1.value, a2.value, b2.value, alpha, phase, u.value.real)


def su3_matrix(params: FrameParams) -> np.ndarray:
    """phi as the product of the three SU(2)-type factors."""
    a1, b1, a2, b2 = params.a1, params.b1, params.a2, params.b2
    sa, ca = params.sin_alpha, params.cos_alpha
    eiphi = cmath.exp(1j * params.phase)
    m1 = np.array([[1, 0, 0], [0, a1, b1], [0, -np.conj(b1), np.conj(a1)]], dtype=complex)
    m2 = np.array([[eiphi * ca, -sa, 0], [sa, ca / eiphi, 0], [0, 0, 1]], dtype=complex)
    m3 = np.array([[1, 0, 0], [0, a2, b2], [0, -np.conj(b2), np.conj(a2)]], dtype=complex)
    return m1 @ m2 @ m3


def frame_normals(params: FrameParams) -> list:
    phi = su3_matrix(params)
    return [phi.conj().T @ sj @ phi for sj in GELLMANN[2:]]


def moving_frame(s: md.AffineSolution, p, phase: float = 0.0, anchor_tol: float = 1e-9) -> MovingFrame:
    """Full frame (eta_1, eta_2, eta_3..eta_8); validates the reconstruction
    of the tangents from phi against the explicit closed forms."""
    eta1, eta2, u = frame_tangents(s, p)
    params = frame_params(s, p, phase)
    phi = su3_matrix(params)
    scale = cmath.exp(0.5 * u)
    eta1_rec = 1j * scale * (phi.conj().T @ Y_MINUS @ phi)
    eta2_rec = 1j * scale * (phi.conj().T @ Y_PLUS @ phi)
    defect = max(np.linalg.norm(eta1_rec - eta1), np.linalg.norm(eta2_rec - eta2))
    if defect > anchor_tol * (1.0 + np.linalg.norm(eta1)):
        raise FrameError(f"frame parameters fail to reconstruct the tangents: {defect:.3e}")
    return MovingFrame([eta1, eta2] + frame_normals(params), u, params)


# --------------------------------------------------------------------------
# Closed-form normals for the (xi, xi^2/2) surface
# --------------------------------------------------------------------------

def appendix_normals(xi: complex, phase: float = 0.0) -> list:
    """The six closed-form normals for the special holomorphic surface
    (w_1, w_2) = (xi, xi^2/2); fractional powers use the principal branch, so
    the negative real axis is excluded."""
    z = complex(xi)
    if z == 0:
        raise FrameError("closed-form normals are singular at xi = 0 (fractional powers)")
    zb = z.conjugate()
    r2 = (z * zb).real
    g1, g2, g3, g4, g5 = (j + r2 for j in range(1, 6))
    rt3 = math.sqrt(3)
    e3 = cmath.exp(3j * phase)
    sz = cmath.sqrt(z)
    szb = cmath.sqrt(zb)
    z32 = z * sz
    zb32 = zb * szb
    absz = abs(z)

    t3 = np.array([
        [4 * (r2 - 1) / g2**2, 2 * z * (4 + r2 * g1) / (g1 * g2**2), 2 * z**2 * g5 / (g1 * g2**2)],
        [2 * zb * (4 + r2 * g1) / (g1 * g2**2), (4 + r2**2 * (5 + r2 * g2)) / (g1**2 * g2**2),
         -4 * z * (r2 - 1) / (g1**2 * g2**2)],
        [2 * zb**2 * g5 / (g1 * g2**2), -4 * zb * (r2 - 1) / (g1**2 * g2**2),
         r2 * (4 - r2 * g3**2) / (g1**2 * g2**2)],
    ])
    t4 = np.array([
        [2 * (2 + r2 * (2 - r2)) / (rt3 * g2**2), 2 * rt3 * r2 * z / g2**2, -2 * rt3 * z**2 / g2**2],
        [2 * rt3 * r2 * zb / g2**2, (4 + r2 * (r2 - 8)) / (rt3 * g2**2), 4 * rt3 * z / g2**2],
        [-2 * rt3 * zb**2 / g2**2, 4 * rt3 * zb / g2**2, (r2 * g4 - 8) / (rt3 * g2**2)],
    ])
    t5 = np.array([
        [2 * absz * (e3 * z**2 - zb**2) / g2**2,
         -sz * (4 * e3 * z**2 * g1 + zb**2 * (2 + r2 * g1)) / (szb * g1 * g2**2),
         2 * z32 * (2 * e3 * z * g1 - zb**3) / (zb32 * g1 * g2**2)],
        [szb * (4 * zb**2 * g1 + e3 * z**2 * (2 + r2 * g1)) / (sz * g1 * g2**2),
         -2 * (e3 * z**2 - zb**2) * (2 + r2 * g1) / (absz * g1 * g2**2),
         2 * sz * (2 * zb**3 + e3 * z * (2 + r2 * g1)) / (zb32 * g1 * g2**2)],
        [2 * zb32 * (e3 * z**3 - 2 * zb * g1) / (z32 * g1 * g2**2),
         -2 * szb * (2 * e3 * z**3 + zb * (2 + r2 * g1)) / (z32 * g1 * g2**2),
         4 * (e3 * z**2 - zb**2) / (absz * g1 * g2**2)],
    ])
    t6 = np.array([
        [-2 * absz * (e3 * z - zb) / g2**2,
         2 * z32 * (2 * e3 * g1 - zb**2) / (szb * g1 * g2**2),
         -z32 * (4 * e3 * g1 + r2 * zb**2 * g3) / (zb32 * g1 * g2**2)],
        [-2 * zb32 * (2 - e3 * z**2 + 2 * r2) / (sz * g1 * g2**2),
         -4 * absz * (e3 * z - zb) / (g1 * g2**2),
         2 * z32 * (2 * e3 + zb**2 * g3) / (szb * g1 * g2**2)],
        [zb32 * (4 + 4 * r2 + e3 * r2 * z**2 * g3) / (z32 * g1 * g2**2),
         -2 * zb32 * (2 + e3 * z**2 * g3) / (sz * g1 * g2**2),
         2 * absz * (e3 * z - zb) * g3 / (g1 * g2**2)],
    ])
    t7 = np.array([
        [-2 * absz * (e3 * z**2 + zb**2) / g2**2,
         sz * (4 * e3 * z**2 * g1 - zb**2 * (2 + r2 * g1)) / (szb * g1 * g2**2),
         -2 * z32 * (zb**3 + 2 * e3 * z * g1) / (zb32 * g1 * g2**2)],
        [szb * (4 * zb**2 * g1 - e3 * z**2 * (2 + r2 * g1)) / (sz * g1 * g2**2),
         2 * (e3 * z**2 + zb**2) * (2 + r2 * g1) / (absz * g1 * g2**2),
         2 * sz * (2 * zb**3 - e3 * z * (2 + r2 * g1)) / (zb32 * g1 * g2**2)],
        [-2 * zb32 * (e3 * z**3 + 2 * zb * g1) / (z32 * g1 * g2**2),
         2 * szb * (2 * e3 * z**3 - zb * (2 + r2 * g1)) / (z32 * g1 * g2**2),
         -4 * (e3 * z**2 + zb**2) / (absz * g1 * g2**2)],
    ])
    t8 = np.array([
        [2 * absz * (e3 * z + zb) / g2**2,
         -2 * z32 * (zb**2 + 2 * e3 * g1) / (szb * g1 * g2**2),
         z32 * (4 * e3 * g1 - r2 * zb**2 * g3) / (zb32 * g1 * g2**2)],
        [-2 * zb32 * (2 + e3 * z**2 + 2 * r2) / (sz * g1 * g2**2),
         4 * absz * (e3 * z + zb) / (g1 * g2**2),
         -2 * z32 * (2 * e3 - zb**2 * g3) / (szb * g1 * g2**2)],
        [zb32 * (4 + 4 * r2 - e3 * r2 * z**2 * g3) / (z32 * g1 * g2**2),
         2 * zb32 * (e3 * z**2 * g3 - 2) / (sz * g1 * g2**2),
         -2 * absz * (e3 * z + zb) * g3 / (g1 * g2**2)],
    ])
    gauge = cmath.exp(-1.5j * phase)
    return [1j * t3, 1j * t4, 1j * gauge * t5, 1j * gauge * t6, gauge * t7, gauge * t8]


# --------------------------------------------------------------------------
# Gauss-Weingarten data
# --------------------------------------------------------------------------

@dataclass
class GaussWeingarten:
    j_coeff: np.ndarray        # J_3..J_8
    h_coeff: np.ndarray        # H_3..H_8
    s_coeff: np.ndarray        # 6x6 S_jk
    residual_d2x: float
    residual_mixed: float
    residual_frame: float
    antisymmetry: float


def _frame_matrix_jets(fields: md.FieldJets, phase: float) -> list:
    """eta_3..eta_8 as order-1 MatrixJets (for d eta_j)."""
    a1, b1, a2, b2, sin_a, cos_a, _ = _params_jets(fields, phase)
    order = a1.order
    zero = JetScalar.constant(0.0, order)
    one = JetScalar.constant(1.0, order)
    eiphi = JetScalar.constant(cmath.exp(1j * phase), order)
    m1 = [[one, zero, zero], [zero, a1, b1], [zero, -b1.conj(), a1.conj()]]
    m2 = [[eiphi * cos_a, -sin_a, zero], [sin_a, cos_a / eiphi, zero], [zero, zero, one]]
    m3 = [[one, zero, zero], [zero, a2, b2], [zero, -b2.conj(), a2.conj()]]
    phi = matrix_jet_from_scalars(m1, order) @ matrix_jet_from_scalars(m2, order) \
        @ matrix_jet_from_scalars(m3, order)
    phid = phi.dagger()
    return [phid @ MatrixJet.constant(sj, order) @ phi for sj in GELLMANN[2:]]


def gauss_weingarten(s: md.AffineSolution, p, phase: float = 0.0) -> GaussWeingarten:
    _require_cp2(s)
    p = s.point(p) if not isinstance(p, md.ex.EvalPoint) else p
    fields = md.field_jets(s, p, 2)
    etas = _frame_matrix_jets(fields, phase)
    jets = md.invariant_jets(s, p, order=1)
    q0 = jets.q.value.real
    dq = jets.q.d(1, 0)
    dx = 1j * jets.kdag.value
    dbx = 1j * jets.k.value
    d2x = 1j * jets.kdag.d(1, 0)
    ddbx = 1j * jets.k.d(1, 0)

    j_coeff = np.array([md.su_pairing(d2x, e.value) for e in etas])
    h_coeff = np.array([md.su_pairing(ddbx, e.value) for e in etas])
    s_coeff = np.array([[md.su_pairing(ej.d(1, 0), ek.value) for ek in etas] for ej in etas])

    rec_d2x = (dq / q0) * dx + sum(jc * e.value for jc, e in zip(j_coeff, etas))
    rec_mixed = sum(hc * e.value for hc, e in zip(h_coeff, etas))
    r1 = float(np.linalg.norm(d2x - rec_d2x))
    r2 = float(np.linalg.norm(ddbx - rec_mixed))
    r3 = 0.0
    for idx, ej in enumerate(etas):
        rec = -(1.0 / q0) * (h_coeff[idx] * dx + j_coeff[idx] * dbx) \
            + sum(s_coeff[idx, kdx] * ek.value for kdx, ek in enumerate(etas))
        r3 = max(r3, float(np.linalg.norm(ej.d(1, 0) - rec)))
    anti = float(np.max(np.abs(s_coeff + s_coeff.T)))
    return GaussWeingarten(j_coeff, h_coeff, s_coeff, r1, r2, r3, anti)
