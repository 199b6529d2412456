"""Discriminant, Floquet multipliers, periodic spectrum, quasimomentum and divisor."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dirac import DEFAULT_TOL, monodromy_batch
from .errors import AmbiguousSheetError, DegenerateDivisorError, PoleError, SpectralError
from .potential import Potential

BRANCH_TOL = 1e-6  # exclusion zone |Delta^2 - 1| around branch points


@dataclass(frozen=True)
class CurvePoint:
    """A point ``(lam, w)`` of the spectral curve; the sheet is fixed by ``w``."""

    lam: complex
    w: complex
    base_x: float = 0.0

    def __post_init__(self):
        if self.w == 0:
            raise ValueError("Floquet multiplier cannot vanish")
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "base_x", float(self.base_x))

    @property
    def delta(self) -> complex:
        return 0.5 * (self.w + 1 / self.w)

    def swapped(self) -> "CurvePoint":
        """The sheet involution ``(lam, w) -> (lam, 1/w)``."""
        return CurvePoint(self.lam, 1 / self.w, self.base_x)

    def conjugated(self) -> "CurvePoint":
        """The antiholomorphic involution ``(lam, w) -> (conj lam, conj w)``."""
        return CurvePoint(np.conj(self.lam), np.conj(self.w), self.base_x)

    def quadratic_residual(self, delta: complex) -> float:
        return abs(self.w**2 - 2 * delta * self.w + 1)


@dataclass(frozen=True)
class SpectrumPoint:
    lam: float
    classification: str  # "simple" or "double"
    delta: float
    d_delta: float

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "classification": self.classification,
                "delta": self.delta, "d_delta": self.d_delta}


@dataclass
class SpectrumReport:
    """Periodic (``Delta = 1``) and antiperiodic (``Delta = -1``) points in a scan range."""

    periodic_points: list
    antiperiodic_points: list
    gaps: list
    scan_range: tuple
    unresolved: list = field(default_factory=list)

    def all_points(self) -> list:
        return sorted(self.periodic_points + self.antiperiodic_points, key=lambda p: p.lam)

    def pairs(self) -> list:
        """``(lam_minus, lam_plus)`` for every double point and every complete gap, sorted."""
        out = [(p.lam, p.lam) for p in self.all_points() if p.classification == "double"]
        out += [tuple(g) for g in self.gaps]
        return sorted(out, key=lambda ab: ab[0] + ab[1])

    def to_dict(self) -> dict:
        return {
            "scan_range": list(self.scan_range),
            "periodic_points": [p.to_dict() for p in self.periodic_points],
            "antiperiodic_points": [p.to_dict() for p in self.antiperiodic_points],
            "gaps": [list(g) for g in self.gaps],
            "unresolved": [list(u) for u in self.unresolved],
        }


# discriminant ---------------------------------------------------------------

def discriminant_batch(pot: Potential, lams, order: int = 1, tol: float = DEFAULT_TOL,
                       im_cap: float | None = None):
    """``Delta`` and its first ``order`` lambda-derivatives at many points (base point ``-l``)."""
    mats = monodromy_batch(pot, lams, order=order, tol=tol, im_cap=im_cap)
    return tuple(0.5 * (m[:, 0, 0] + m[:, 1, 1]) for m in mats)


def discriminant(pot: Potential, lam: complex, tol: float = DEFAULT_TOL,
                 im_cap: float | None = None) -> tuple[complex, complex]:
    """``Delta(lam) = tr M(-l, lam) / 2`` and ``dDelta/dlam``."""
    d, dd = discriminant_batch(pot, [lam], order=1, tol=tol, im_cap=im_cap)
    return complex(d[0]), complex(dd[0])


# Floquet multipliers ----------------------------------------------------------

def multiplier_roots(delta: complex) -> tuple[complex, complex]:
    """Roots of ``w^2 - 2 delta w + 1``, ordered ``(small, big)`` in modulus."""
    r = np.sqrt(complex(delta) ** 2 - 1)
    big = delta + r if abs(delta + r) >= abs(delta - r) else delta - r
    return 1 / big, big


def _classify(lam: complex, small: complex, big: complex, sheet: str) -> complex:
    # plus: |w| < 1 in the upper half plane, |w| > 1 in the lower one
    upper = lam.imag >= 0
    return small if (sheet == "plus") == upper else big


def _track(deltas, w0):
    w = w0
    for d in deltas:
        a, b = multiplier_roots(d)
        w = a if abs(a - w) <= abs(b - w) else b
    return w


def default_sheet_path(lam: complex, l: float, n: int = 48) -> np.ndarray:
    """Vertical path ending at ``lam`` from a point a distance ``1/l`` into the open half plane."""
    side = -1.0 if lam.imag < 0 else 1.0
    return lam + 1j * side * np.linspace(1.0 / l, 0.0, n) ** 1.5 * l**0.5


def floquet_multiplier(pot: Potential, lam: complex, sheet: str = "plus", path=None,
                       branch_tol: float = BRANCH_TOL, tol: float = DEFAULT_TOL,
                       im_cap: float | None = None, base_x: float | None = None) -> CurvePoint:
    """The curve point over ``lam`` on the requested sheet.

    Sheet ``plus`` is the root continuous with ``exp(i lam l)`` as
    ``Im lam -> +inf``: ``|w| < 1`` above the real axis and ``|w| > 1`` below it.
    On the real axis the value is the limit from above. Points where
    ``|w|`` is too close to 1 to classify are resolved by tracking the root
    along ``path`` (a sequence of lambda values ending at ``lam``), or along a
    short vertical path if none is given.
    """
    if sheet not in ("plus", "minus"):
        raise ValueError("sheet must be 'plus' or 'minus'")
    lam = complex(lam)
    base = -pot.l if base_x is None else base_x
    if path is not None:
        path = np.asarray(path, complex)
        if path[-1] != lam:
            path = np.append(path, lam)
        deltas = discriminant_batch(pot, path, order=0, tol=tol, im_cap=im_cap)[0]
        small, big = multiplier_roots(deltas[0])
        if abs(abs(big) - 1) < 1e-8:
            raise AmbiguousSheetError("tracking path must start off the bands")
        w0 = _classify(complex(path[0]), small, big, sheet)
        return CurvePoint(lam, _track(deltas[1:], w0), base)

    delta = complex(discriminant_batch(pot, [lam], order=0, tol=tol, im_cap=im_cap)[0][0])
    small, big = multiplier_roots(delta)
    if abs(delta**2 - 1) <= branch_tol:
        raise AmbiguousSheetError(
            f"|Delta^2 - 1| = {abs(delta**2 - 1):.2e} at lambda={lam}; supply a tracking path"
        )
    if abs(abs(big) - 1) > 1e-8:
        return CurvePoint(lam, _classify(lam, small, big, sheet), base)
    return floquet_multiplier(pot, lam, sheet, path=default_sheet_path(lam, pot.l),
                              branch_tol=branch_tol, tol=tol, im_cap=im_cap, base_x=base_x)


def curve_point(pot: Potential, lam: complex, sheet: str = "plus", **kw) -> CurvePoint:
    """Alias of :func:`floquet_multiplier`."""
    return floquet_multiplier(pot, lam, sheet, **kw)


# deformation factor ---------------------------------------------------------

def _w(q):
    return q.w if isinstance(q, CurvePoint) else complex(q)


def omega(Q, tol: float = 1e-12) -> complex:
    """``(w^2 + 1)/(w^2 - 1)``; accepts a :class:`CurvePoint` or a bare multiplier."""
    w2 = _w(Q) ** 2
    if abs(w2 - 1) <= tol:
        raise PoleError("Omega has a pole where w^2 = 1")
    if abs(w2) > 1e300:
        return 1.0 + 0j
    return (w2 + 1) / (w2 - 1)


def dw_dDelta(Q, tol: float = 1e-12) -> complex:
    """``dw/dDelta = 2 w^2/(w^2 - 1)`` along the curve."""
    w2 = _w(Q) ** 2
    if abs(w2 - 1) <= tol:
        raise PoleError("dw/dDelta has a pole where w^2 = 1")
    if abs(w2) > 1e300:
        return 2.0 + 0j
    return 2 * w2 / (w2 - 1)


# quasimomentum --------------------------------------------------------------

def quasimomentum(pot: Potential, Q: CurvePoint, reference_path=None, anchor_offset: float = 0.0,
                  anchor_height: float = 20.0, n_path: int = 160, tol: float = DEFAULT_TOL,
                  im_cap: float | None = None) -> complex:
    """``p = log(w)/(2 i l)`` continued along a path from a large-imaginary anchor.

    The path runs from ``anchor`` to ``Q.lam``; by default it is vertical with
    the anchor ``anchor_height/l`` further into the half plane containing ``Q``.
    At the anchor the branch of the logarithm is the one closest to
    ``+lam/2 + anchor_offset`` on the sheet that continues to ``Q`` as ``plus``
    at infinity, and ``-lam/2 + anchor_offset`` on the other.
    """
    l = pot.l
    lam = Q.lam
    if reference_path is None:
        side = -1.0 if lam.imag < 0 else 1.0
        top = abs(lam.imag) + anchor_height / l
        reference_path = lam.real + 1j * side * np.linspace(top, abs(lam.imag), n_path)
    path = np.asarray(reference_path, complex)
    if path[-1] != lam:
        path = np.append(path, lam)
    deltas = discriminant_batch(pot, path, order=0, tol=tol, im_cap=im_cap)[0]
    if np.min(np.abs(deltas**2 - 1)) <= BRANCH_TOL:
        raise SpectralError("quasimomentum path passes through a branch point")
    anchor = complex(path[0])
    small, big = multiplier_roots(deltas[0])
    ends = []
    for sheet in ("plus", "minus"):
        w0 = _classify(anchor, small, big, sheet)
        ws = [w0]
        for d in deltas[1:]:
            a, b = multiplier_roots(d)
            ws.append(a if abs(a - ws[-1]) <= abs(b - ws[-1]) else b)
        ends.append((sheet, np.array(ws)))
    sheet, ws = min(ends, key=lambda e: abs(e[1][-1] - Q.w))
    if abs(ws[-1] - Q.w) > 1e-6 * max(1.0, abs(Q.w)):
        raise SpectralError("tracked multiplier does not reach the requested curve point")
    logs = np.log(ws[0]) + np.concatenate([[0], np.cumsum(np.log(ws[1:] / ws[:-1]))])
    p = logs / (2j * l)
    target = (anchor / 2 if sheet == "plus" else -anchor / 2) + anchor_offset
    shift = np.round((target - p[0]).real * l / np.pi) * np.pi / l
    return complex(p[-1] + shift)


def quasimomentum_expansion(pot: Potential, taus=None, tol: float = DEFAULT_TOL) -> dict:
    """Leading coefficients of ``p(i tau) = i tau/2 - p1/(i tau) - p3/(i tau)^3 + ...`` on sheet plus.

    ``tau * (Im p - tau/2) = p1 - p3/tau^2 + p5/tau^4`` is solved exactly
    on the supplied ``taus`` (Richardson extrapolation in ``1/tau^2``).
    """
    l = pot.l
    taus = np.array([20.0, 40.0, 80.0]) / l if taus is None else np.asarray(taus, float)
    cap = 1.05 * float(np.max(taus)) * l
    lams = 1j * taus
    deltas = discriminant_batch(pot, lams, order=0, tol=tol, im_cap=cap)[0]
    ys = []
    for tau, d in zip(taus, deltas):
        small, _ = multiplier_roots(d)
        # log|w| carries the imaginary part of p; the real part only fixes the branch
        ys.append(tau * (-np.log(abs(small)) / (2 * l) - tau / 2))
    ys = np.array(ys)
    t2 = 1.0 / taus**2
    basis = np.vander(t2, len(taus), increasing=True) * (-1.0) ** np.arange(len(taus))
    coef = np.linalg.solve(basis, ys)
    return {"p1": float(coef[0]), "taus": taus.tolist(), "samples": ys.tolist(),
            "coefficients": coef.tolist()}


# periodic spectrum ----------------------------------------------------------

def _bracketed_newton(func, lo, hi, max_iter: int = 80, xtol: float = 1e-14):
    """Vectorized safeguarded Newton for sign-changing brackets ``[lo, hi]``.

    ``func(x) -> (f, df)`` evaluates a batch. Returns ``(roots, converged)``.
    """
    lo = np.array(lo, float)
    hi = np.array(hi, float)
    f_lo = func(lo)[0]
    x = 0.5 * (lo + hi)
    done = np.zeros(len(x), bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if not len(act):
            break
        f, df = func(x[act])
        same = np.sign(f) == np.sign(f_lo[act])
        lo[act] = np.where(same, x[act], lo[act])
        f_lo[act] = np.where(same, f, f_lo[act])
        hi[act] = np.where(same, hi[act], x[act])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(df != 0, f / df, np.inf)
        new = x[act] - step
        outside = ~((new > lo[act]) & (new < hi[act])) | ~np.isfinite(new)
        new = np.where(outside, 0.5 * (lo[act] + hi[act]), new)
        conv = (np.abs(new - x[act]) <= xtol * (1 + np.abs(new))) | (f == 0) | (
            hi[act] - lo[act] <= 2 * xtol * (1 + np.abs(x[act])))
        x[act] = np.where(f == 0, x[act], new)
        done[act] = conv
    return x, done


def periodic_spectrum(pot: Potential, lambda_range, resolution: int = 16, tol: float = DEFAULT_TOL,
                      noise_tol: float = 1e-10, batch: int = 512) -> SpectrumReport:
    """Roots of ``Delta = +1`` and ``Delta = -1`` in a real interval.

    Candidates come from sign changes of ``Delta -/+ 1`` and of ``Delta'`` on a
    uniform scan with ``resolution`` samples per spacing ``pi/l``; all are
    polished by safeguarded Newton with the augmented-system derivatives.
    A critical point of ``Delta`` whose value is within ``noise_tol`` of
    ``+-1`` is a double point; the remaining roots are simple.
    """
    a, b = float(lambda_range[0]), float(lambda_range[1])
    if not b > a:
        return SpectrumReport([], [], [], (a, b))
    if resolution < 8:
        raise ValueError("resolution must be at least 8 samples per pi/l")
    l = pot.l
    step = np.pi / l / resolution
    # offset the scan off the lattice pi*k/l so no root sits exactly on a node
    start = a - step * (np.sqrt(2) - 1)
    n = int(np.ceil((b - start) / step)) + 2
    grid = start + step * np.arange(max(n, 3))

    def evaluate(lams):
        chunks = [lams[i:i + batch] for i in range(0, len(lams), batch)] or [lams]
        parts = [discriminant_batch(pot, c, order=2, tol=tol) for c in chunks]
        return tuple(np.concatenate([p[k].real for p in parts]) for k in range(3))

    d0, d1, d2 = evaluate(grid)
    unresolved = []

    # critical points of Delta
    idx = np.flatnonzero(np.sign(d1[:-1]) != np.sign(d1[1:]))
    crit = np.empty(0)
    if len(idx):
        crit, ok = _bracketed_newton(lambda x: evaluate(x)[1:], grid[idx], grid[idx + 1])
        unresolved += [(float(grid[i]), float(grid[i + 1])) for i in idx[~ok]]
    crit = _dedupe(crit)
    c0, c1, c2 = evaluate(crit) if len(crit) else (np.empty(0),) * 3

    points = {1: [], -1: []}
    for target in (1, -1):
        double = np.abs(c0 - target) <= noise_tol
        for lc, v, dv, ddv in zip(crit[double], c0[double], c1[double], c2[double]):
            points[target].append(SpectrumPoint(float(lc), "double", float(v), float(dv)))
        nodes = np.concatenate([grid, crit])
        g = np.concatenate([d0, c0]) - target
        zero = np.concatenate([np.zeros(len(grid), bool), double])
        order = np.argsort(nodes, kind="stable")
        nodes, g, zero = nodes[order], g[order], zero[order]
        cand = np.flatnonzero(
            (np.sign(g[:-1]) * np.sign(g[1:]) < 0) & ~zero[:-1] & ~zero[1:]
            & (nodes[1:] > nodes[:-1])
        )
        if not len(cand):
            continue
        roots, ok = _bracketed_newton(
            lambda x: (lambda r: (r[0] - target, r[1]))(evaluate(x)), nodes[cand], nodes[cand + 1]
        )
        unresolved += [(float(nodes[i]), float(nodes[i + 1])) for i in cand[~ok]]
        roots = _dedupe(roots)
        r0, r1, _ = evaluate(roots)
        for lr, v, dv in zip(roots, r0, r1):
            points[target].append(SpectrumPoint(float(lr), "simple", float(v), float(dv)))

    for t in points:
        points[t] = sorted((p for p in points[t] if a <= p.lam <= b), key=lambda p: p.lam)

    gaps = _gaps(points, crit, c0, noise_tol)
    return SpectrumReport(points[1], points[-1], gaps, (a, b), sorted(unresolved))


def _dedupe(x, tol: float = 1e-9):
    x = np.sort(np.asarray(x, float))
    if len(x) < 2:
        return x
    keep = np.concatenate([[True], np.diff(x) > tol * (1 + np.abs(x[1:]))])
    return x[keep]


def _gaps(points, crit, c0, noise_tol):
    merged = sorted(
        [(p.lam, t, p.classification) for t in points for p in points[t]], key=lambda e: e[0]
    )
    gaps = []
    for (lo, t1, k1), (hi, t2, k2) in zip(merged[:-1], merged[1:]):
        if k1 != "simple" or k2 != "simple" or t1 != t2:
            continue
        inside = (crit > lo) & (crit < hi)
        if np.any(np.abs(c0[inside]) > 1 + noise_tol):
            gaps.append((lo, hi))
    return gaps


def hadamard_product(lam: complex, pairs, l: float) -> complex:
    """``-prod_k (lam_k^+ - lam)(lam_k^- - lam)/a_k^2`` over indexed pairs ``{k: (lam_k^-, lam_k^+)}``."""
    total = -1.0 + 0j
    for k, (lm, lp) in pairs.items():
        a_k = 1.0 / l if k == 0 else np.pi * k / l
        total *= (lp - lam) * (lm - lam) / a_k**2
    return total


def index_pairs(report: SpectrumReport, l: float, truncation_N: int) -> dict:
    """Assign each double point / gap to its index ``k`` (nearest ``pi k/l`` of the centre)."""
    out = {}
    for lm, lp in report.pairs():
        k = int(np.round(0.5 * (lm + lp) * l / np.pi))
        if abs(k) <= truncation_N:
            if k in out:
                raise SpectralError(f"two spectral pairs assigned to index {k}")
            out[k] = (lm, lp)
    missing = [k for k in range(-truncation_N, truncation_N + 1) if k not in out]
    if missing:
        raise SpectralError(f"spectrum does not cover indices {missing[:5]}...")
    return out


def hadamard_residual(pot: Potential, lam: complex, truncation_N: int,
                      report: SpectrumReport | None = None, tol: float = DEFAULT_TOL) -> float:
    """``|Delta^2(lam) - 1 - truncated Hadamard product|`` with ``a_0 = 1/l`` and ``a_k = pi k/l``."""
    l = pot.l
    if report is None:
        edge = np.pi * (truncation_N + 0.5) / l
        report = periodic_spectrum(pot, (-edge, edge), tol=tol)
    pairs = index_pairs(report, l, truncation_N)
    d = complex(discriminant_batch(pot, [lam], order=0, tol=tol)[0][0])
    return float(abs(d**2 - 1 - hadamard_product(lam, pairs, l)))


# divisor --------------------------------------------------------------------

def divisor(pot: Potential, y: float, report: SpectrumReport, tol: float = DEFAULT_TOL,
            edge_tol: float = 1e-9, samples: int = 33) -> list[CurvePoint]:
    """Poles of the Floquet solution normalised at ``y``, one per open gap.

    On a gap the condition ``M12 - M11 + w = 0`` reduces to
    ``Im(M11 - M12) = 0`` with ``w = Re(M11 - M12)``, where ``M`` is the
    monodromy based at ``y``.
    """
    out = []

    def g(lams):
        m, dm = monodromy_batch(pot, lams, x=y, order=1, tol=tol)
        return (m[:, 0, 0] - m[:, 0, 1]).imag, (dm[:, 0, 0] - dm[:, 0, 1]).imag

    for lo, hi in report.gaps:
        lams = np.linspace(lo, hi, samples)
        vals = g(lams)[0]
        scale = np.max(np.abs(vals)) + 1e-300
        if abs(vals[0]) <= edge_tol * scale or abs(vals[-1]) <= edge_tol * scale:
            raise DegenerateDivisorError(f"divisor point at the edge of gap [{lo}, {hi}]")
        idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
        if len(idx) != 1:
            raise SpectralError(f"expected one divisor point in gap [{lo}, {hi}], found {len(idx)}")
        mu, ok = _bracketed_newton(g, lams[idx], lams[idx + 1])
        mu = float(mu[0])
        m = monodromy_batch(pot, [mu], x=y, tol=tol)[0][0]
        w = (m[0, 0] - m[0, 1]).real
        if abs(m[0, 1] - m[0, 0] + w) > 1e-8 * max(1.0, abs(w)):
            raise SpectralError("divisor refinement did not converge")
        out.append(CurvePoint(mu, w, y))
    return out
