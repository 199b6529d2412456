"""Poisson brackets of spectral functionals by quadrature of their gradients.

``{A, B} = 2i int (dA/dpsibar dB/dpsi - dA/dpsi dB/dpsibar) dz`` over one
period. Gradients of monodromy entries come from :mod:`dirac`; gradients of
curve functions (``w``, ``X``, ``A``, ``W``, ``Xi``) follow by the chain rule.
Every ``verify_*`` function compares a quadrature left side against a closed
form and returns :class:`Verification` records.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .dirac import DEFAULT_TOL, TransitionGradient, gradient_transition_batch
from .errors import DivisorPoleError, PoleError
from .potential import Potential
from .quadrature import GradientField
from .spectrum import (
    BRANCH_TOL,
    CurvePoint,
    SpectrumReport,
    divisor,
    dw_dDelta,
    floquet_multiplier,
    omega,
)

DEFAULT_GRID = 512
ENTRIES = ("m11", "m12", "m21", "m22")


def _c(z) -> complex | str:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        return "inf"
    return z


@dataclass
class Verification:
    """One checked identity: ``residual`` compares ``lhs`` with ``rhs``."""

    name: str
    lhs: complex
    rhs: complex
    residual: float
    tol: float
    grid: int
    inputs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, (complex, np.complexfloating)):
                v = _c(v)
                return v if isinstance(v, str) else {"re": v.real, "im": v.imag}
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            return v

        return {
            "name": self.name,
            "inputs": enc(self.inputs),
            "lhs": enc(complex(self.lhs)),
            "rhs": enc(complex(self.rhs)),
            "residual": float(self.residual),
            "tol": self.tol,
            "grid": self.grid,
            "passed": self.passed,
            **({"extra": enc(self.extra)} if self.extra else {}),
        }


def relative_residual(lhs: complex, rhs: complex) -> float:
    """``|lhs - rhs| / (1 + |rhs|)``."""
    return float(abs(lhs - rhs) / (1 + abs(rhs)))


# bracket --------------------------------------------------------------------

def poisson_bracket(F: GradientField, G: GradientField) -> complex:
    """``2i int (dF/dpsibar dG/dpsi - dF/dpsi dG/dpsibar) dz`` with the fields' quadrature weights."""
    F.check_grid(G)

    def half(a, b):
        return np.sum(F.weights * (a.g_psibar * b.g_psi))

    # one shared pairing for both orders keeps antisymmetry exact in floating point
    return complex(2j * (half(F, G) - half(G, F)))


# gradients of monodromy entries and curve functions ---------------------------

def monodromy_gradients(pot: Potential, x: float, lams, grid_size: int = DEFAULT_GRID,
                        tol: float = DEFAULT_TOL, derivative: bool = False,
                        im_cap: float | None = None) -> list[TransitionGradient]:
    """Gradients of ``M(x + 2l, x, lam)`` for several ``lam`` on one shared grid."""
    return gradient_transition_batch(pot, x + 2 * pot.l, x, lams, grid_size, tol, derivative, im_cap)


def grad_monodromy_entry(pot: Potential, x: float, lam: complex, entry: str,
                         grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> GradientField:
    """Gradient of one monodromy entry (``"m11"``, ``"m12"``, ``"m21"`` or ``"m22"``)."""
    return monodromy_gradients(pot, x, [lam], grid_size, tol)[0][entry]


class PointGradients:
    """Gradients of the curve functions at one point ``Q`` from a monodromy gradient.

    Parameters
    ----------
    mg : TransitionGradient
        Gradient data of the monodromy at ``Q.lam``.
    Q : CurvePoint
        The curve point; its multiplier selects the sheet.
    """

    def __init__(self, mg: TransitionGradient, Q: CurvePoint, branch_tol: float = BRANCH_TOL):
        if abs(mg.lam - Q.lam) > 1e-12 * (1 + abs(Q.lam)):
            raise ValueError("curve point and monodromy gradient at different lambda")
        self.mg = mg
        self.Q = Q
        self.m = mg.matrix
        self.w = Q.w
        delta = 0.5 * (self.m[0, 0] + self.m[1, 1])
        self.branch_distance = abs(delta**2 - 1)
        self.branch_tol = branch_tol
        self.g = mg.entries()

    def _check_branch(self):
        if self.branch_distance < self.branch_tol:
            raise PoleError(f"|Delta^2 - 1| = {self.branch_distance:.1e} inside the branch-point exclusion zone")

    @property
    def omega(self) -> complex:
        self._check_branch()
        return omega(self.w)

    @property
    def grad_delta(self) -> GradientField:
        return 0.5 * (self.g["m11"] + self.g["m22"])

    @property
    def grad_w(self) -> GradientField:
        self._check_branch()
        return dw_dDelta(self.w) * self.grad_delta

    def _weyl_pair(self):
        m, w = self.m, self.w
        n1, d1 = w - m[0, 0], m[0, 1]
        n2, d2 = m[1, 0], w - m[1, 1]
        return (n1, d1, 1) if max(abs(n1), abs(d1)) >= max(abs(n2), abs(d2)) else (n2, d2, 2)

    @property
    def X(self) -> complex:
        n, d, _ = self._weyl_pair()
        if d == 0:
            raise PoleError("Weyl function is infinite at this point")
        return n / d

    @property
    def grad_X(self) -> GradientField:
        n, d, which = self._weyl_pair()
        if abs(d) <= 1e-13 * max(abs(n), 1.0):
            raise PoleError("Weyl function has a pole at this point")
        g, gw = self.g, self.grad_w
        X = n / d
        if which == 1:
            return (gw - g["m11"] - X * g["m12"]) / d
        return (g["m21"] - X * (gw - g["m22"])) / d

    def _a_pair(self):
        m, w = self.m, self.w
        n1, d1 = m[0, 1], m[0, 1] - m[0, 0] + w
        n2, d2 = w - m[1, 1], m[1, 0] - m[1, 1] + w
        return (n1, d1, 1) if abs(d1) >= abs(d2) else (n2, d2, 2)

    @property
    def A(self) -> complex:
        n, d, _ = self._a_pair()
        if d == 0:
            raise DivisorPoleError("coefficient A evaluated at a divisor point")
        return n / d

    @property
    def grad_A(self) -> GradientField:
        n, d, which = self._a_pair()
        scale = max(np.max(np.abs(self.m)), abs(self.w), 1.0)
        if abs(d) <= 1e-13 * scale:
            raise DivisorPoleError("coefficient A has a pole at this point")
        g, gw = self.g, self.grad_w
        A = n / d
        if which == 1:
            return (g["m12"] - A * (g["m12"] - g["m11"] + gw)) / d
        return (gw - g["m22"] - A * (g["m21"] - g["m22"] + gw)) / d

    def swapped(self) -> "PointGradients":
        return PointGradients(self.mg, self.Q.swapped(), self.branch_tol)


def _point_gradients(pot, x, Q, grid_size, tol):
    mg = monodromy_gradients(pot, x, [Q.lam], grid_size, tol, im_cap=_cap(pot, [Q.lam]))[0]
    return PointGradients(mg, Q)


def _cap(pot, lams):
    top = max(abs(complex(l).imag) for l in lams) * pot.l
    return max(60.0, 1.01 * top)


def grad_w(pot: Potential, x: float, Q: CurvePoint, grid_size: int = DEFAULT_GRID,
           tol: float = DEFAULT_TOL) -> GradientField:
    """Gradient of the Floquet multiplier, ``(dw/dDelta) (g11 + g22)/2``."""
    return _point_gradients(pot, x, Q, grid_size, tol).grad_w


def grad_weyl(pot: Potential, x: float, Q: CurvePoint, grid_size: int = DEFAULT_GRID,
              tol: float = DEFAULT_TOL) -> GradientField:
    """Gradient of ``X(x, Q)``."""
    return _point_gradients(pot, x, Q, grid_size, tol).grad_X


def grad_A(pot: Potential, x: float, Q: CurvePoint, grid_size: int = DEFAULT_GRID,
           tol: float = DEFAULT_TOL) -> GradientField:
    """Gradient of the coefficient ``A(x, Q)``."""
    return _point_gradients(pot, x, Q, grid_size, tol).grad_A


def grad_W(pot: Potential, x: float, Q: CurvePoint, grid_size: int = DEFAULT_GRID,
           tol: float = DEFAULT_TOL) -> GradientField:
    """Gradient of ``W = A(swapped Q) - A(Q)``."""
    pg = _point_gradients(pot, x, Q, grid_size, tol)
    return pg.swapped().grad_A - pg.grad_A


def grad_xi(pot: Potential, x: float, Q: CurvePoint, grid_size: int = DEFAULT_GRID,
            tol: float = DEFAULT_TOL) -> GradientField:
    """Gradient of ``Xi = A(swapped Q) + A(Q)``."""
    pg = _point_gradients(pot, x, Q, grid_size, tol)
    return pg.swapped().grad_A + pg.grad_A


def lft_gradient(gX: GradientField, X: complex, a, b, c, d) -> GradientField:
    """Gradient of ``(dX + b)/(cX + a)`` given the gradient of ``X``."""
    return (a * d - b * c) / (c * X + a) ** 2 * gX


# closed forms ---------------------------------------------------------------

K_RPB = -2.0


def rpb_closed_forms(m_lam: np.ndarray, m_mu: np.ndarray, lam: complex, mu: complex,
                     K: float = K_RPB) -> dict:
    """Right-hand sides of the six brackets between entries of ``M(lam)`` and ``M(mu)``."""
    a, b = m_lam, m_mu
    e = lambda i, j: a[i - 1, j - 1]  # noqa: E731
    f = lambda i, j: b[i - 1, j - 1]  # noqa: E731
    s = K / (lam - mu)
    return {
        ("m11", "m12"): s * (e(1, 2) * f(1, 1) - f(1, 2) * e(1, 1)),
        ("m11", "m21"): s * (e(1, 1) * f(2, 1) - f(1, 1) * e(2, 1)),
        ("m11", "m22"): s * (e(1, 2) * f(2, 1) - f(1, 2) * e(2, 1)),
        ("m12", "m21"): s * (e(1, 1) * f(2, 2) - f(1, 1) * e(2, 2)),
        ("m12", "m22"): s * (e(1, 2) * f(2, 2) - f(1, 2) * e(2, 2)),
        ("m21", "m22"): s * (e(2, 2) * f(2, 1) - f(2, 2) * e(2, 1)),
    }


def deformed_ah_rhs(XQ, XP, lam, mu, omQ, omP) -> complex:
    """``-2 (X(Q) - X(P))^2/(lam - mu) * (Omega(Q) + Omega(P))/2``."""
    return -2 * (XQ - XP) ** 2 / (lam - mu) * (omQ + omP) / 2


def undeformed_ah_rhs(XQ, XP, lam, mu) -> complex:
    """Limit of :func:`deformed_ah_rhs` when both deformation factors tend to -1."""
    return 2 * (XQ - XP) ** 2 / (lam - mu)


def popd_rhs(WQ, WP, XiQ, XiP, omQ, omP, lam, mu) -> tuple[complex, complex]:
    """Closed forms of ``{W(Q), W(P)}`` and ``{Xi(Q), Xi(P)}``."""
    ww = -2 * (XiQ - XiP) * (WP * omQ - WQ * omP) / (lam - mu)
    xx = -2 * (XiQ - XiP) * (WP * omP - WQ * omQ) / (lam - mu)
    return ww, xx


# verifications --------------------------------------------------------------

def _fd_derivative(f: np.ndarray, h: float, order: int = 4) -> tuple[np.ndarray, slice]:
    """Central differences on the interior; returns the derivative and the valid slice."""
    if order == 2:
        return (f[2:] - f[:-2]) / (2 * h), slice(1, -1)
    return (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h), slice(2, -2)


def verify_quartic_identity(pot: Potential, lam: complex, mu: complex, x_range=None,
                            grid_size: int = 2048, fd_order: int = 4,
                            tol: float = DEFAULT_TOL) -> Verification:
    """Pointwise check of the quartic-product identity for solutions at ``lam`` and ``mu``.

    Column solutions ``f+ = M(z, y, lam) e1``, ``g+ = M(z, y, mu) e2`` and row
    solutions ``f- = e1^T M(x, z, lam)``, ``g- = e1^T M(x, z, mu)``; the left side
    ``f2+ f1- g1+ g2- - f1+ f2- g2+ g1-`` is compared with
    ``d/dz[(f- . g+)(g- . f+)] / (i (lam - mu))`` by finite differences.
    """
    if lam == mu:
        raise ValueError("lambda and mu must differ")
    y, x = (-pot.l, pot.l) if x_range is None else x_range
    ga, gb = gradient_transition_batch(pot, x, y, [lam, mu], grid_size, tol)
    fp, gp = ga.forward[:, :, 0], gb.forward[:, :, 1]
    fm, gm = ga.backward[:, 0, :], gb.backward[:, 0, :]
    lhs = fp[:, 1] * fm[:, 0] * gp[:, 0] * gm[:, 1] - fp[:, 0] * fm[:, 1] * gp[:, 1] * gm[:, 0]
    prod = np.sum(fm * gp, axis=1) * np.sum(gm * fp, axis=1)
    h = (x - y) / grid_size
    deriv, sl = _fd_derivative(prod, h, fd_order)
    rhs = deriv / (1j * (lam - mu))
    err = np.abs(lhs[sl] - rhs)
    scale = max(1.0, float(np.max(np.abs(lhs))))
    k = int(np.argmax(err))
    return Verification("quartic_identity", lhs[sl][k], rhs[k], float(err[k] / scale), 1e-6, grid_size,
                        {"lambda": lam, "mu": mu, "x_range": [y, x]})


def verify_rpb(pot: Potential, lam: complex, mu: complex, x: float | None = None,
               grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL,
               threshold: float = 1e-6, K: float = K_RPB) -> list[Verification]:
    """Six brackets between monodromy entries at ``lam`` and ``mu`` plus the vanishing ones."""
    if lam == mu:
        raise ValueError("lambda and mu must differ")
    x = -pot.l if x is None else x
    ga, gb = monodromy_gradients(pot, x, [lam, mu], grid_size, tol, im_cap=_cap(pot, [lam, mu]))
    rhs = rpb_closed_forms(ga.matrix, gb.matrix, lam, mu, K)
    inputs = {"lambda": lam, "mu": mu, "x": x}
    out = []
    for (p, q), r in rhs.items():
        lhs = poisson_bracket(ga[p], gb[q])
        out.append(Verification(f"rpb {{{p}(lam),{q}(mu)}}", lhs, r, relative_residual(lhs, r),
                                threshold, grid_size, inputs))
    for p in ("m11", "m12", "m21", "m22"):
        lhs = poisson_bracket(ga[p], gb[p])
        out.append(Verification(f"rpb {{{p}(lam),{p}(mu)}}", lhs, 0j, relative_residual(lhs, 0),
                                threshold, grid_size, inputs))
    return out


def _pair_gradients(pot, x, Q, P, grid_size, tol):
    lams = [Q.lam] if Q.lam == P.lam else [Q.lam, P.lam]
    mgs = monodromy_gradients(pot, x, lams, grid_size, tol, im_cap=_cap(pot, lams))
    return PointGradients(mgs[0], Q), PointGradients(mgs[-1], P)


def verify_deformed_ah(pot: Potential, x: float, Q: CurvePoint, P: CurvePoint,
                       grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                       threshold: float = 1e-6) -> Verification:
    """Quadrature ``{X(Q), X(P)}`` against the deformed Atiyah-Hitchin formula."""
    if Q.lam == P.lam:
        raise ValueError("Q and P must lie over different lambda")
    gq, gp = _pair_gradients(pot, x, Q, P, grid_size, tol)
    lhs = poisson_bracket(gq.grad_X, gp.grad_X)
    rhs = deformed_ah_rhs(gq.X, gp.X, Q.lam, P.lam, gq.omega, gp.omega)
    return Verification("deformed_ah", lhs, rhs, relative_residual(lhs, rhs), threshold, grid_size,
                        {"x": x, "Q": [Q.lam, Q.w], "P": [P.lam, P.w]},
                        {"X_Q": gq.X, "X_P": gp.X, "omega_Q": gq.omega, "omega_P": gp.omega})


def verify_ah_degeneration(pot: Potential, x: float, tau: float, grid_size: int = DEFAULT_GRID,
                           tol: float = DEFAULT_TOL) -> Verification:
    """At ``lam = i tau, 2 i tau`` on sheet plus the deformed bracket tends to ``+2 (X(Q)-X(P))^2/(lam-mu)``.

    ``lhs`` is the deformed closed form, ``rhs`` the undeformed one; the
    tolerance is ``10 exp(-2 tau l) + 1e-6`` relative. The quadrature bracket is
    stored in ``extra`` together with its residual against the undeformed form.
    """
    cap = _cap(pot, [2j * tau])
    Q = floquet_multiplier(pot, 1j * tau, "plus", base_x=x, im_cap=cap)
    P = floquet_multiplier(pot, 2j * tau, "plus", base_x=x, im_cap=cap)
    gq, gp = _pair_gradients(pot, x, Q, P, grid_size, tol)
    deformed = deformed_ah_rhs(gq.X, gp.X, Q.lam, P.lam, gq.omega, gp.omega)
    plain = undeformed_ah_rhs(gq.X, gp.X, Q.lam, P.lam)
    quad_lhs = poisson_bracket(gq.grad_X, gp.grad_X)
    bound = 10 * np.exp(-2 * tau * pot.l) + 1e-6
    return Verification("ah_degeneration", deformed, plain, relative_residual(deformed, plain), bound,
                        grid_size, {"x": x, "tau": tau},
                        {"quadrature": quad_lhs, "quadrature_residual": relative_residual(quad_lhs, plain)})


def verify_A_bracket(pot: Potential, x: float, Q: CurvePoint, P: CurvePoint,
                     grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                     threshold: float = 1e-6) -> Verification:
    """Quadrature ``{A(Q), A(P)}`` against the same deformed kernel with ``A`` in place of ``X``."""
    if Q.lam == P.lam:
        raise ValueError("Q and P must lie over different lambda")
    gq, gp = _pair_gradients(pot, x, Q, P, grid_size, tol)
    lhs = poisson_bracket(gq.grad_A, gp.grad_A)
    rhs = deformed_ah_rhs(gq.A, gp.A, Q.lam, P.lam, gq.omega, gp.omega)
    return Verification("A_bracket", lhs, rhs, relative_residual(lhs, rhs), threshold, grid_size,
                        {"x": x, "Q": [Q.lam, Q.w], "P": [P.lam, P.w]})


def verify_popd(pot: Potential, x: float, Q: CurvePoint, P: CurvePoint,
                grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                threshold: float = 1e-6) -> list[Verification]:
    """Quadrature brackets of ``W`` and ``Xi`` against their closed forms."""
    if Q.lam == P.lam:
        raise ValueError("Q and P must lie over different lambda")
    gq, gp = _pair_gradients(pot, x, Q, P, grid_size, tol)
    sq, sp = gq.swapped(), gp.swapped()
    WQ, WP = sq.A - gq.A, sp.A - gp.A
    XiQ, XiP = sq.A + gq.A, sp.A + gp.A
    gWQ, gWP = sq.grad_A - gq.grad_A, sp.grad_A - gp.grad_A
    gXQ, gXP = sq.grad_A + gq.grad_A, sp.grad_A + gp.grad_A
    rww, rxx = popd_rhs(WQ, WP, XiQ, XiP, gq.omega, gp.omega, Q.lam, P.lam)
    lww = poisson_bracket(gWQ, gWP)
    lxx = poisson_bracket(gXQ, gXP)
    inputs = {"x": x, "Q": [Q.lam, Q.w], "P": [P.lam, P.w]}
    return [
        Verification("popd {W(Q),W(P)}", lww, rww, relative_residual(lww, rww), threshold, grid_size, inputs),
        Verification("popd {Xi(Q),Xi(P)}", lxx, rxx, relative_residual(lxx, rxx), threshold, grid_size, inputs),
    ]


@dataclass
class DivisorGradients:
    """Gradients of the coordinates ``mu = lam(gamma)`` and ``p(gamma)`` of one divisor point."""

    point: CurvePoint
    grad_mu: GradientField
    grad_p: GradientField
    p: complex


def divisor_gradients(pot: Potential, y: float, points: list[CurvePoint],
                      grid_size: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> list[DivisorGradients]:
    """Implicit differentiation of ``D(lam) = M12 - M11 + w(lam) = 0`` at each divisor point.

    ``dmu = -dD / D'(mu)`` and ``dp = ((w'/w) dmu + dw/w) / (2 i l)`` where
    ``dw`` is the variation at fixed ``lam``.
    """
    if not points:
        return []
    l = pot.l
    mgs = monodromy_gradients(pot, y, [q.lam for q in points], grid_size, tol, derivative=True)
    out = []
    for q, mg in zip(points, mgs):
        pg = PointGradients(mg, q)
        m, dm, w = mg.matrix, mg.dmatrix, q.w
        dwdd = dw_dDelta(w)
        w_lam = dwdd * 0.5 * (dm[0, 0] + dm[1, 1])
        d_lam = dm[0, 1] - dm[0, 0] + w_lam
        gw = pg.grad_w
        gD = pg.g["m12"] - pg.g["m11"] + gw
        gmu = -gD / d_lam
        gp = ((w_lam / w) * gmu + gw / w) / (2j * l)
        p = np.log(complex(w)) / (2j * l)
        out.append(DivisorGradients(q, gmu, gp, complex(p)))
    return out


def verify_canonical(pot: Potential, y: float, report: SpectrumReport, grid_size: int = DEFAULT_GRID,
                     tol: float = DEFAULT_TOL, threshold: float = 1e-4,
                     points: list[CurvePoint] | None = None) -> dict:
    """Brackets among divisor coordinates ``lam(gamma_k)`` and ``p(gamma_k)``.

    Returns a dict of residual matrices (``"lam_lam"``, ``"p_p"``, ``"p_lam"``),
    the raw bracket matrices, and the list of :class:`Verification` records.
    The expected values are 0, 0 and the identity respectively.
    """
    points = divisor(pot, y, report, tol=tol) if points is None else points
    dg = divisor_gradients(pot, y, points, grid_size, tol)
    n = len(dg)
    br = {k: np.zeros((n, n), complex) for k in ("lam_lam", "p_p", "p_lam")}
    for i in range(n):
        for j in range(n):
            br["lam_lam"][i, j] = poisson_bracket(dg[i].grad_mu, dg[j].grad_mu)
            br["p_p"][i, j] = poisson_bracket(dg[i].grad_p, dg[j].grad_p)
            br["p_lam"][i, j] = poisson_bracket(dg[i].grad_p, dg[j].grad_mu)
    target = {"lam_lam": np.zeros((n, n)), "p_p": np.zeros((n, n)), "p_lam": np.eye(n)}
    res = {k: np.abs(br[k] - target[k]) for k in br}
    checks = []
    for k in br:
        for i in range(n):
            for j in range(n):
                checks.append(Verification(f"canonical {k}[{i},{j}]", br[k][i, j], target[k][i, j],
                                           float(res[k][i, j]), threshold, grid_size,
                                           {"y": y, "mu_i": points[i].lam.real, "mu_j": points[j].lam.real}))
    reality = max((float(np.max(np.abs(d.grad_mu.g_psibar - np.conj(d.grad_mu.g_psi)))) for d in dg),
                  default=0.0)
    return {"residuals": res, "brackets": br, "checks": checks, "points": points,
            "mu_reality_defect": reality}


@dataclass
class FieldBracketResult:
    """Finite-``tau`` emulation of the field-bracket limits.

    ``r_pp`` estimates ``int_{y<z} f(y) {psi(z), psi(y)} dy`` and ``r_cross``
    estimates ``int_{y<z} f(y) {conj psi(z), psi(y)} dy``; ``ratio_cross`` is
    ``r_cross / f(z)``, to be compared with ``i`` (half of ``2i delta``).
    """

    tau: float
    r_pp: complex
    r_cross: complex
    f_z: complex
    ratio_cross: complex
    bracket_pp: complex
    bracket_pp_closed: complex
    bracket_cross: complex
    bracket_cross_closed: complex
    kernel_pp: complex
    kernel_cross: complex

    def to_dict(self) -> dict:
        return {k: (_c(v) if isinstance(v, complex) else v) for k, v in self.__dict__.items()}


def _half_line_kernel(f, z: float, rate: complex, length: float) -> complex:
    """``int_{z - length}^{z} f(y) exp(-rate (z - y)) dy`` by adaptive quadrature."""
    def part(fn):
        return quad(fn, z - length, z, limit=400, epsabs=1e-13, epsrel=1e-11,
                    points=[z - min(length, 10 / abs(rate))])[0]
    re = part(lambda y: (complex(f(y)) * np.exp(-rate * (z - y))).real)
    im = part(lambda y: (complex(f(y)) * np.exp(-rate * (z - y))).imag)
    return complex(re, im)


def verify_field_brackets(pot: Potential, z: float, test_function, tau: float,
                          grid_size: int = 2048, tol: float = DEFAULT_TOL) -> FieldBracketResult:
    """Emulate the field-bracket limits at finite ``tau``.

    ``{X(z, Q), X(z, P)}`` is computed by quadrature at a single base point ``z``;
    the shift of the second argument to ``y < z`` uses the asymptotic factor
    ``exp(-i lam(P) (z - y))``.

    * ``r_pp``: ``Q, P`` on sheet minus over ``-i tau`` and ``-2 i tau``;
      ``r_pp = -lam(Q) lam(P) {X(Q), X(P)} int f(y) exp(-i lam(P)(z - y)) dy``.
    * ``r_cross``: ``Q`` on sheet plus over ``i tau`` and ``P`` its conjugate
      point over ``-i tau``;
      ``r_cross = -(lam(Q) lam(P)/X(Q)^2) {X(Q), X(P)} int f(y) exp(-i lam(P)(z - y)) dy``.
    """
    l = pot.l
    cap = _cap(pot, [2j * tau])
    lams = [-1j * tau, -2j * tau, 1j * tau]
    mgs = monodromy_gradients(pot, z, lams, grid_size, tol, im_cap=cap)
    q_pp = floquet_multiplier(pot, lams[0], "minus", base_x=z, im_cap=cap)
    p_pp = floquet_multiplier(pot, lams[1], "minus", base_x=z, im_cap=cap)
    q_x = floquet_multiplier(pot, lams[2], "plus", base_x=z, im_cap=cap)
    p_x = q_x.conjugated()
    f_z = complex(test_function(z))
    if pot.is_zero:
        zero = 0j
        return FieldBracketResult(tau, zero, zero, f_z, zero, zero, zero, zero, zero, zero, zero)

    gq, gp = PointGradients(mgs[0], q_pp), PointGradients(mgs[1], p_pp)
    b_pp = poisson_bracket(gq.grad_X, gp.grad_X)
    b_pp_closed = deformed_ah_rhs(gq.X, gp.X, q_pp.lam, p_pp.lam, gq.omega, gp.omega)
    k_pp = _half_line_kernel(test_function, z, 1j * p_pp.lam, 2 * l)
    r_pp = -q_pp.lam * p_pp.lam * b_pp * k_pp

    hq, hp = PointGradients(mgs[2], q_x), PointGradients(mgs[0], p_x)
    b_x = poisson_bracket(hq.grad_X, hp.grad_X)
    b_x_closed = deformed_ah_rhs(hq.X, hp.X, q_x.lam, p_x.lam, hq.omega, hp.omega)
    k_x = _half_line_kernel(test_function, z, 1j * p_x.lam, 2 * l)
    r_cross = -(q_x.lam * p_x.lam / hq.X**2) * b_x * k_x
    return FieldBracketResult(tau, complex(r_pp), complex(r_cross), f_z, complex(r_cross / f_z),
                              b_pp, complex(b_pp_closed), b_x, complex(b_x_closed), k_pp, k_x)
