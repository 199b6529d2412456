"""Floquet solutions, the coefficient A, the Weyl function and field recovery."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import DEFAULT_IM_CAP, DEFAULT_TOL, monodromy_batch, transition_matrix
from .errors import DegenerateTransformError, DivisorPoleError
from .potential import Potential
from .spectrum import CurvePoint, floquet_multiplier, multiplier_roots

INFINITY = complex(np.inf, 0.0)


def is_infinite(X) -> bool:
    return not np.isfinite(X)


@dataclass(frozen=True)
class ProjectivePoint:
    """``num : den`` on the Riemann sphere; ``den == 0`` is infinity."""

    num: complex
    den: complex

    @classmethod
    def from_value(cls, X) -> "ProjectivePoint":
        return cls(1.0 + 0j, 0j) if is_infinite(X) else cls(complex(X), 1.0 + 0j)

    @property
    def value(self) -> complex:
        if self.den == 0:
            return INFINITY
        return self.num / self.den

    def chordal_distance(self, other: "ProjectivePoint") -> float:
        """Chordal metric on the sphere; well defined at infinity."""
        n1 = np.hypot(abs(self.num), abs(self.den))
        n2 = np.hypot(abs(other.num), abs(other.den))
        return float(abs(self.num * other.den - other.num * self.den) / (n1 * n2))


@dataclass(frozen=True)
class WeylValue:
    """Weyl function and coefficient ``A`` at ``(x, Q)``.

    ``X`` is ``INFINITY`` when the selected ratio has a zero denominator;
    ``consistency_residual`` is the chordal distance between the two
    equivalent ratio formulas.
    """

    Q: CurvePoint
    x: float
    A: complex
    X: complex
    consistency_residual: float
    projective: ProjectivePoint


def _monodromy_at(pot: Potential, y: float, lam: complex, tol: float, im_cap):
    return monodromy_batch(pot, [lam], x=y, tol=tol, im_cap=im_cap)[0][0]


def _cap_for(pot: Potential, lam: complex, im_cap):
    if im_cap is not None:
        return im_cap
    return max(DEFAULT_IM_CAP, 1.01 * abs(complex(lam).imag) * pot.l)


def weyl_ratios(m: np.ndarray, w: complex):
    """The two projective forms ``(w - M11) : M12`` and ``M21 : (w - M22)``."""
    return ProjectivePoint(w - m[0, 0], m[0, 1]), ProjectivePoint(m[1, 0], w - m[1, 1])


def a_from_monodromy(m: np.ndarray, w: complex, pole_tol: float = 1e-10):
    """Coefficient ``A`` from a monodromy matrix and multiplier.

    Returns ``(A, residual)``. Of the two equivalent expressions
    ``M12/(M12 - M11 + w)`` and ``(w - M22)/(M21 - M22 + w)`` the one with the
    larger denominator is returned; ``residual`` is their difference.
    """
    n1, d1 = m[0, 1], m[0, 1] - m[0, 0] + w
    n2, d2 = w - m[1, 1], m[1, 0] - m[1, 1] + w
    scale = max(abs(m[0, 0]), abs(m[1, 1]), abs(m[0, 1]), abs(m[1, 0]), abs(w), 1.0)
    if max(abs(d1), abs(d2)) <= pole_tol * scale:
        raise DivisorPoleError("coefficient A evaluated at a divisor point")
    a1 = n1 / d1 if d1 != 0 else INFINITY
    a2 = n2 / d2 if d2 != 0 else INFINITY
    best = a1 if abs(d1) >= abs(d2) else a2
    residual = abs(a1 - a2) if np.isfinite(a1) and np.isfinite(a2) else np.inf
    return complex(best), float(residual)


def coefficient_A(pot: Potential, y: float, Q: CurvePoint, tol: float = DEFAULT_TOL,
                  im_cap: float | None = None) -> complex:
    """``A(y, Q)``, the weight of the first column in the normalised Floquet solution."""
    m = _monodromy_at(pot, y, Q.lam, tol, _cap_for(pot, Q.lam, im_cap))
    return a_from_monodromy(m, Q.w)[0]


def floquet_solution(pot: Potential, x: float, y: float, Q: CurvePoint, tol: float = DEFAULT_TOL,
                     im_cap: float | None = None) -> np.ndarray:
    """``e(x, y, Q) = A*(m11, m21) + (1 - A)*(m12, m22)`` with ``M = M(x, y, lam)``.

    Normalised by ``e1(y) + e2(y) = 1`` and multiplied by ``w`` under ``x -> x + 2l``.
    """
    A = coefficient_A(pot, y, Q, tol, im_cap)
    m = transition_matrix(pot, x, y, Q.lam, tol=tol, im_cap=_cap_for(pot, Q.lam, im_cap)).matrix
    return A * m[:, 0] + (1 - A) * m[:, 1]


def weyl_from_monodromy(m: np.ndarray, Q: CurvePoint, x: float) -> WeylValue:
    r1, r2 = weyl_ratios(m, Q.w)
    # the two pairs are proportional; the one with the larger norm carries less rounding error
    n1, n2 = max(abs(r1.num), abs(r1.den)), max(abs(r2.num), abs(r2.den))
    best = r1 if n1 >= n2 else r2
    # a pair that vanishes to rounding carries no information to compare against
    degenerate = min(n1, n2) <= 1e-12 * max(n1, n2, 1.0)
    consistency = 0.0 if degenerate else r1.chordal_distance(r2)
    X = best.value
    if is_infinite(X):
        A = 0j
    else:
        A = 1 / (1 + X) if X != -1 else INFINITY
    return WeylValue(Q, float(x), complex(A), X, consistency, best)


def weyl_function(pot: Potential, x: float, Q: CurvePoint, tol: float = DEFAULT_TOL,
                  im_cap: float | None = None) -> WeylValue:
    """``X(x, Q) = (w - M11(x))/M12(x) = M21(x)/(w - M22(x))`` with base point ``x``."""
    m = _monodromy_at(pot, x, Q.lam, tol, _cap_for(pot, Q.lam, im_cap))
    return weyl_from_monodromy(m, Q, x)


def wronskian_W(pot: Potential, y: float, Q: CurvePoint, tol: float = DEFAULT_TOL,
                im_cap: float | None = None) -> complex:
    """``W(y, Q) = A(y, swapped Q) - A(y, Q)``."""
    m = _monodromy_at(pot, y, Q.lam, tol, _cap_for(pot, Q.lam, im_cap))
    return a_from_monodromy(m, 1 / Q.w)[0] - a_from_monodromy(m, Q.w)[0]


def xi(pot: Potential, y: float, Q: CurvePoint, tol: float = DEFAULT_TOL,
       im_cap: float | None = None) -> complex:
    """``Xi(y, Q) = A(y, swapped Q) + A(y, Q)``."""
    m = _monodromy_at(pot, y, Q.lam, tol, _cap_for(pot, Q.lam, im_cap))
    return a_from_monodromy(m, 1 / Q.w)[0] + a_from_monodromy(m, Q.w)[0]


def lft_transform(X, a: complex, b: complex, c: complex, d: complex):
    """``(d X + b)/(c X + a)`` on the Riemann sphere.

    Accepts a complex number (``INFINITY`` allowed) or a :class:`ProjectivePoint`
    and returns the same kind.
    """
    if a * d - b * c == 0:
        raise DegenerateTransformError("linear-fractional transform with ad - bc = 0")
    proj = isinstance(X, ProjectivePoint)
    P = X if proj else ProjectivePoint.from_value(X)
    out = ProjectivePoint(d * P.num + b * P.den, c * P.num + a * P.den)
    return out if proj else out.value


def recover_field(pot: Potential, x: float, tau: float, tol: float = DEFAULT_TOL,
                  im_cap: float | None = None) -> tuple[complex, complex]:
    """Estimates of ``psi(x)`` and ``conj psi(x)`` from the Weyl function at ``lam = -+ i tau``.

    ``-i*lam*X`` at ``lam = -i tau`` on sheet minus and ``i*lam/X`` at
    ``lam = i tau`` on sheet plus; both have error ``O(1/tau)``.
    """
    cap = _cap_for(pot, 1j * tau, im_cap)
    lm, lp = -1j * tau, 1j * tau
    mats = monodromy_batch(pot, [lm, lp], x=x, tol=tol, im_cap=cap)[0]
    psi_est = 0j
    psibar_est = 0j
    for lam, m, sheet in ((lm, mats[0], "minus"), (lp, mats[1], "plus")):
        small, _ = multiplier_roots(0.5 * (m[0, 0] + m[1, 1]))
        # sheet minus below the axis and sheet plus above it both carry the small root
        Q = CurvePoint(lam, small, x)
        X = weyl_from_monodromy(m, Q, x).X
        if sheet == "minus":
            psi_est = -1j * lam * X
        else:
            psibar_est = 0j if is_infinite(X) else 1j * lam / X
    return complex(psi_est), complex(psibar_est)


def curve_point_pair(pot: Potential, lam: complex, **kw) -> tuple[CurvePoint, CurvePoint]:
    """Both sheets over ``lam``."""
    q = floquet_multiplier(pot, lam, "plus", **kw)
    return q, q.swapped()
