"""Core CP^(N-1) machinery: homogeneous fields, projectors, K-matrices,
equation-of-motion residuals and the pointwise scalar invariants.

Conventions (fixed once here, used everywhere):

* The homogeneous field is f = (1, w_1, ..., w_{N-1}) together with its
  literal conjugate field fbar = (1, wbar_1, ...).  A = sum_k fbar_k f_k.
* The projector is P = I - D/A with D_ij = fbar_i f_j.  This is the
  transposed-dyad convention; it is the one under which the closed-form
  2x2 and 3x3 projectors and K-matrices used as oracles hold verbatim.
* K = [dbar P, P] and Kdag = -[d P, P] = K^dagger; for holomorphic fields
  K = -dbar P, for anti-holomorphic K = +dbar P.
* Tangents of the immersed surface are dX = i Kdag, dbarX = i K, and the
  su(N) pairing is <A, B> = -tr(AB)/2, which makes

      q    = <dX, dbarX> = tr(Kdag K)/2      (= rho/(2 A^2) for holomorphic
                                              CP^2 fields)
      J    = -<dX, dX>   = -tr(Kdag Kdag)/2
      Jbar = -<dbarX, dbarX> = -tr(K K)/2

  The equivalent dyadic sandwiches (used as an independent route) are

      J = (sum_k df_k dfbar_k)/A - (sum_k df_k fbar_k)(sum_k f_k dfbar_k)/A^2

  and the conjugate-symmetric forms for Jbar and q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .jets import JetScalar, MatrixJet, outer_jet

__all__ = [
    "ModelError",
    "ConjugacyError",
    "AffineSolution",
    "FieldJets",
    "ProjectorValue",
    "KPair",
    "ScalarInvariants",
    "ELResidual",
    "HolomorphyReport",
    "field_jets",
    "homogeneous_normalization",
    "projector_at",
    "projector_jet",
    "k_jets",
    "k_matrices_at",
    "el_residual_at",
    "scalar_invariants_at",
    "invariant_jets",
    "dc_residual_at",
    "holomorphy_check",
    "su_pairing",
]

CONJUGACY_TOL = 1e-12
CROSSCHECK_TOL = 1e-10


class ModelError(Exception):
    pass


class ConjugacyError(ModelError):
    """wbar fails to be the pointwise complex conjugate of w."""


def su_pairing(a: np.ndarray, b: np.ndarray) -> complex:
    """The su(N) scalar product <A, B> = -tr(AB)/2."""
    return -0.5 * complex(np.trace(a @ b))


# --------------------------------------------------------------------------
# Solutions
# --------------------------------------------------------------------------

@dataclass
class AffineSolution:
    """N-1 affine fields w_i plus their formal conjugates.

    ``wbar`` defaults to conjugate_expression applied to each w_i, which is
    the literal conjugate field for every expression in the grammar.  A user
    override is accepted but still has to evaluate to the pointwise
    conjugate; symmetry flows that deliberately perturb w and wbar
    independently set ``enforce_conjugacy=False``.
    """

    n: int
    w: list
    wbar: list | None = None
    params: dict = field(default_factory=dict)
    name: str = ""
    singularities: tuple = ()
    enforce_conjugacy: bool = True
    defined_on_sphere: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ModelError("N must be at least 2")
        if len(self.w) != self.n - 1:
            raise ModelError(f"expected {self.n - 1} affine fields, got {len(self.w)}")
        self.w = [e if isinstance(e, ex.Expression) else ex.parse(e) for e in self.w]
        if self.wbar is None:
            self.wbar = [ex.conjugate_expression(e) for e in self.w]
        else:
            if len(self.wbar) != self.n - 1:
                raise ModelError("w and wbar must have the same length")
            self.wbar = [e if isinstance(e, ex.Expression) else ex.parse(e) for e in self.wbar]
        self._evals = [ex.JetEvaluator(e) for e in self.w]
        self._evals_bar = [ex.JetEvaluator(e) for e in self.wbar]

    def full_params(self) -> dict:
        """Parameter bindings with conjugate partners filled in."""
        out = dict(self.params)
        for name, value in self.params.items():
            partner = name[:-4] if name.endswith("_bar") else name + "_bar"
            out.setdefault(partner, complex(value).conjugate())
        return out

    def point(self, xi: complex) -> ex.EvalPoint:
        return ex.EvalPoint(complex(xi), self.full_params())

    def w_values(self, xi: complex) -> list:
        p = self.point(xi)
        return [ex.evaluate(e, p) for e in self.w]

    def near_singularity(self, xi: complex, radius: float = 1e-9) -> bool:
        return any(abs(complex(xi) - complex(s)) <= radius for s in self.singularities)


@dataclass
class FieldJets:
    """Component jets of f = (1, w) and fbar = (1, wbar) at one point."""

    order: int
    f: list       # JetScalar, length N
    fbar: list    # JetScalar, length N

    @property
    def n(self) -> int:
        return len(self.f)


def field_jets(s: AffineSolution, p: ex.EvalPoint, order: int) -> FieldJets:
    one = JetScalar.constant(1.0, order)
    f = [one] + [JetScalar.from_jet(e.evaluate(p, order)) for e in s._evals]
    fbar = [one] + [JetScalar.from_jet(e.evaluate(p, order)) for e in s._evals_bar]
    if s.enforce_conjugacy:
        for k in range(1, s.n):
            wv, wbv = f[k].value, fbar[k].value
            if abs(wbv - wv.conjugate()) > CONJUGACY_TOL * (1.0 + abs(wv)):
                raise ConjugacyError(
                    f"wbar_{k} is not the conjugate of w_{k} at xi={p.xi}: "
                    f"{wbv} vs conj {wv.conjugate()}"
                )
    return FieldJets(order, f, fbar)


def homogeneous_normalization(fields: FieldJets) -> JetScalar:
    """A = f^dag . f as a jet."""
    acc = fields.fbar[0] * fields.f[0]
    for k in range(1, fields.n):
        acc = acc + fields.fbar[k] * fields.f[k]
    return acc


# --------------------------------------------------------------------------
# Projector and K matrices
# --------------------------------------------------------------------------

@dataclass
class ProjectorValue:
    matrix: np.ndarray

    @property
    def hermiticity(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T))

    @property
    def idempotency(self) -> float:
        return float(np.linalg.norm(self.matrix @ self.matrix - self.matrix))

    @property
    def trace_defect(self) -> float:
        n = self.matrix.shape[0]
        return abs(complex(np.trace(self.matrix)) - (n - 1))


def projector_jet(fields: FieldJets, order: int | None = None) -> MatrixJet:
    order = fields.order if order is None else order
    a = homogeneous_normalization(fields).truncate(order)
    d = outer_jet([x.truncate(order) for x in fields.fbar], [x.truncate(order) for x in fields.f], order)
    inv_a = JetScalar.constant(1.0, order) / a
    return MatrixJet.identity(fields.n, order) - d.scale(inv_a)


def projector_at(s: AffineSolution, p: ex.EvalPoint | complex) -> ProjectorValue:
    p = s.point(p) if not isinstance(p, ex.EvalPoint) else p
    fields = field_jets(s, p, 0)
    return ProjectorValue(projector_jet(fields).value)


@dataclass
class KPair:
    k: np.ndarray
    kdag: np.ndarray

    @property
    def trace_defect(self) -> float:
        return abs(complex(np.trace(self.k)))

    @property
    def adjoint_defect(self) -> float:
        return float(np.linalg.norm(self.kdag - self.k.conj().T))


def k_jets(fields: FieldJets) -> tuple[MatrixJet, MatrixJet]:
    """(K, Kdag) jets from the projector jets: K = [dbar P, P]."""
    pj = projector_jet(fields)
    k = pj.shift_dbar().commutator(pj.truncate(pj.order - 1))
    return k, k.dagger()


def _k_value_dyadic(fields: FieldJets) -> np.ndarray:
    """K from the dyadic expansion of [dbar P, P]; independent of the jet
    commutator route and cross-checked against it."""
    f = np.array([x.value for x in fields.f])
    fbar = np.array([x.value for x in fields.fbar])
    dbf = np.array([x.d(0, 1) for x in fields.f])
    dbfbar = np.array([x.d(0, 1) for x in fields.fbar])
    a = fbar @ f
    u = dbfbar @ f
    v = fbar @ dbf
    big_u = np.outer(dbfbar, f)
    big_v = np.outer(fbar, dbf)
    return (big_u - big_v) / a + ((v - u) / a**2) * np.outer(fbar, f)


def k_matrices_at(s: AffineSolution, p: ex.EvalPoint | complex) -> KPair:
    p = s.point(p) if not isinstance(p, ex.EvalPoint) else p
    fields = field_jets(s, p, 1)
    kj, kdagj = k_jets(fields)
    k = kj.value
    k_dyadic = _k_value_dyadic(fields)
    scale = 1.0 + float(np.linalg.norm(k))
    if np.linalg.norm(k - k_dyadic) > CROSSCHECK_TOL * scale:
        raise ModelError(
            f"K commutator and dyadic forms disagree at xi={p.xi}: "
            f"{np.linalg.norm(k - k_dyadic):.3e}"
        )
    return KPair(k, kdagj.value)


# --------------------------------------------------------------------------
# Scalar invariants
# --------------------------------------------------------------------------

@dataclass
class ScalarInvariants:
    j: complex
    jbar: complex
    q: float
    action_density: float


def _sums(fields: FieldJets):
    f = np.array([x.value for x in fields.f])
    fbar = np.array([x.value for x in fields.fbar])
    df = np.array([x.d(1, 0) for x in fields.f])
    dbf = np.array([x.d(0, 1) for x in fields.f])
    dfbar = np.array([x.d(1, 0) for x in fields.fbar])
    dbfbar = np.array([x.d(0, 1) for x in fields.fbar])
    return f, fbar, df, dbf, dfbar, dbfbar


def scalar_invariants_at(s: AffineSolution, p: ex.EvalPoint | complex) -> ScalarInvariants:
    p = s.point(p) if not isinstance(p, ex.EvalPoint) else p
    fields = field_jets(s, p, 1)
    f, fbar, df, dbf, dfbar, dbfbar = _sums(fields)
    a = fbar @ f
    j = (df @ dfbar) / a - (df @ fbar) * (f @ dfbar) / a**2
    jbar = (dbf @ dbfbar) / a - (dbf @ fbar) * (f @ dbfbar) / a**2
    q = 0.5 * ((dbf @ dfbar + df @ dbfbar) / a
               - ((dfbar @ f) * (fbar @ dbf) + (f @ dbfbar) * (fbar @ df)) / a**2)
    # action density via the projector sandwiches (independent route; equals 2q)
    pmat = projector_jet(fields, 0).value
    density = ((df @ pmat @ dbfbar) + (dbf @ pmat @ dfbar)) / a
    return ScalarInvariants(j, jbar, float(q.real), float(density.real))


@dataclass
class InvariantJets:
    """Jets of q, J, Jbar together with the K jets that produced them."""

    q: JetScalar
    j: JetScalar
    jbar: JetScalar
    k: MatrixJet
    kdag: MatrixJet
    a: JetScalar


def invariant_jets(s: AffineSolution, p: ex.EvalPoint | complex, order: int = 1) -> InvariantJets:
    """q, J, Jbar as derivative towers of the given order (needs field jets
    of order + 1)."""
    p = s.point(p) if not isinstance(p, ex.EvalPoint) else p
    fields = field_jets(s, p, order + 1)
    kj, kdagj = k_jets(fields)
    q = (kdagj @ kj).trace() * 0.5
    j = (kdagj @ kdagj).trace() * (-0.5)
    jbar = (kj @ kj).trace() * (-0.5)
    return InvariantJets(q, j, jbar, kj, kdagj, homogeneous_normalization(fields).truncate(order))


# --------------------------------------------------------------------------
# Residuals
# --------------------------------------------------------------------------

@dataclass
class ELResidual:
    matrix: float
    affine: float

    @property
    def max(self) -> float:
        return max(self.matrix, self.affine)


def _affine_residual(fields: FieldJets) -> float:
    """Max modulus of the affine-coordinate equations of motion."""
    n = fields.n
    w = fields.f[1:]
    wbar = fields.fbar[1:]
    a = 1.0 + sum(wbar[k].value * w[k].value for k in range(n - 1))
    worst = 0.0
    for i in range(n - 1):
        r = w[i].d(1, 1) - (2.0 * wbar[i].value / a) * w[i].d(1, 0) * w[i].d(0, 1)
        rb = wbar[i].d(1, 1) - (2.0 * w[i].value / a) * wbar[i].d(1, 0) * wbar[i].d(0, 1)
        for jdx in range(n - 1):
            if jdx == i:
                continue
            r -= (wbar[jdx].value / a) * (w[i].d(1, 0) * w[jdx].d(0, 1) + w[i].d(0, 1) * w[jdx].d(1, 0))
            rb -= (w[jdx].value / a) * (wbar[i].d(1, 0) * wbar[jdx].d(0, 1) + wbar[i].d(0, 1) * wbar[jdx].d(1, 0))
        worst = max(worst, abs(r), abs(rb))
    return worst


def el_residual_at(s: AffineSolution, p: ex.EvalPoint | complex) -> ELResidual:
    """Residuals of the equations of motion: Frobenius norm of
    dK - dbar Kdag, and the max affine-equation modulus."""
    p = s.point(p) if not isinstance(p, ex.EvalPoint) else p
    fields = field_jets(s, p, 2)
    kj, kdagj = k_jets(fields)
    conservation = kj.d(1, 0) - kdagj.d(0, 1)
    return ELResidual(float(np.linalg.norm(conservation)), _affine_residual(fields))


def dc_residual_at(s: AffineSolution, p: ex.EvalPoint | complex, gauge: ex.Expression | None = None) -> float:
    """Differential-constraint residual max(|f.df - df.f|, |f.dbarf - dbarf.f|)
    in dagger-sandwich form.

    The constraints are not representative-invariant: ``gauge`` rescales the
    homogeneous field to mu*f (mubar auto-conjugated) before testing, which
    is how the dilation-invariant catalog entries satisfy them.
    """
    p = s.point(p) if not isinstance(p, ex.EvalPoint) else p
    fields = field_jets(s, p, 1)
    f = [x for x in fields.f]
    fbar = [x for x in fields.fbar]
    if gauge is not None:
        mu = JetScalar.from_jet(ex.evaluate_jet(gauge, p, 1))
        mubar = JetScalar.from_jet(ex.evaluate_jet(ex.conjugate_expression(gauge), p, 1))
        f = [mu * x for x in f]
        fbar = [mubar * x for x in fbar]
    r1 = sum(fbar[k] * f[k].shift_d() - fbar[k].shift_d() * f[k] for k in range(len(f)))
    r2 = sum(fbar[k] * f[k].shift_dbar() - fbar[k].shift_dbar() * f[k] for k in range(len(f)))
    return max(abs(r1.value), abs(r2.value))


@dataclass
class HolomorphyReport:
    classification: str  # holomorphic | anti-holomorphic | mixed
    max_dbar: float
    max_d: float
    threshold: float


def holomorphy_check(s: AffineSolution, points, threshold: float = 1e-10) -> HolomorphyReport:
    """Classify a solution by the largest Wirtinger derivatives of its fields
    over a sample of points."""
    max_dbar = 0.0
    max_d = 0.0
    for xi in points:
        fields = field_jets(s, s.point(xi), 1)
        for k in range(1, fields.n):
            max_dbar = max(max_dbar, abs(fields.f[k].d(0, 1)))
            max_d = max(max_d, abs(fields.f[k].d(1, 0)))
    if max_dbar < threshold:
        label = "holomorphic"
    elif max_d < threshold:
        label = "anti-holomorphic"
    else:
        label = "mixed"
    return HolomorphyReport(label, max_dbar, max_d, threshold)
