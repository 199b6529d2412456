"""Closed forms for the plane-wave potential ``C exp(i alpha x)``, ``alpha = pi n/l``.

The curve is rational with uniformizer ``z``: ``lam = z + eta^2/(4(z - alpha))``
with ``eta = 2|C|``. ``z = inf`` lies over infinity on sheet plus and
``z = alpha`` over infinity on sheet minus.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError
from .potential import Potential, make_plane_wave


@dataclass(frozen=True)
class OneGapCurve:
    alpha: float
    eta: float
    l: float
    n: int
    C: complex

    @classmethod
    def from_plane_wave(cls, C: complex, n: int, l: float) -> "OneGapCurve":
        return cls(np.pi * n / l, 2 * abs(C), float(l), int(n), complex(C))

    @classmethod
    def from_potential(cls, pot: Potential) -> "OneGapCurve":
        if len(pot.modes) != 1:
            raise ValueError("not a plane-wave potential")
        return cls.from_plane_wave(pot.coeffs[0], int(pot.modes[0]), pot.l)

    def potential(self) -> Potential:
        return make_plane_wave(self.C, self.n, self.l)

    @property
    def gap(self) -> tuple[float, float]:
        return self.alpha - self.eta, self.alpha + self.eta

    def double_points(self, m_max: int) -> list[float]:
        """Closed gaps at ``alpha +- sqrt((pi m/l)^2 + eta^2)``, ``1 <= m <= m_max``."""
        out = []
        for m in range(1, m_max + 1):
            r = np.hypot(np.pi * m / self.l, self.eta)
            out += [self.alpha - r, self.alpha + r]
        return sorted(out)


def _offset(curve: OneGapCurve, z):
    u = np.asarray(z, complex) - curve.alpha
    if np.any(u == 0):
        raise PoleError("z = alpha lies over infinity on sheet minus")
    return u


def uniformize(curve: OneGapCurve, z):
    """``(lam, y)`` with ``y^2 = eta^2 - (alpha - lam)^2``."""
    u = _offset(curve, z)
    q = curve.eta**2 / (4 * u)
    return z + q, 1j * u + q / 1j


def involutions(curve: OneGapCurve, z):
    """``(eps_pm z, eps_a z)``: sheet swap and the antiholomorphic involution."""
    u = _offset(curve, z)
    return curve.alpha + curve.eta**2 / (4 * u), curve.alpha + curve.eta**2 / (4 * np.conj(u))


def quasimomentum_z(curve: OneGapCurve, z):
    """``p(z) = (z - eta^2/(4(z - alpha)))/2``; normalised so ``p ~ lam/2`` at ``z = inf``."""
    u = _offset(curve, z)
    return 0.5 * (z - curve.eta**2 / (4 * u))


def multiplier_z(curve: OneGapCurve, z):
    """``w = exp(2 i l p(z))``."""
    return np.exp(2j * curve.l * quasimomentum_z(curve, z))


def discriminant_closed(curve: OneGapCurve, lam):
    """``Delta(lam) = (-1)^n cosh(l sqrt(eta^2 - (lam - alpha)^2))``."""
    s = np.sqrt(np.asarray(curve.eta**2 - (lam - curve.alpha) ** 2, complex))
    return (-1) ** curve.n * np.cosh(curve.l * s)


def h_functions(curve: OneGapCurve, z, z_gamma):
    """``h_plus = (z - alpha)/(z - alpha - z_gamma)`` and ``h_minus = -z_gamma/(z - alpha - z_gamma)``."""
    d = np.asarray(z, complex) - curve.alpha - z_gamma
    if np.any(np.abs(d) <= 1e-14 * np.maximum(1.0, np.abs(z))):
        raise PoleError("h functions have a pole at z - alpha = z_gamma")
    return (z - curve.alpha) / d, -z_gamma / d


def divisor_phase(curve: OneGapCurve, x):
    """Phase of ``z_gamma(x) = i conj(C) exp(-i alpha x)``: ``pi/2 - arg C - alpha x``."""
    return np.pi / 2 - np.angle(curve.C) - curve.alpha * np.asarray(x, float)


def z_gamma(curve: OneGapCurve, x, phi_gamma_ref: float | None = None, x_ref: float = 0.0):
    """Divisor point in the shifted uniformizer, ``(eta/2) exp(i phi_gamma(x))``.

    ``phi_gamma(x) = phi_gamma(x_ref) - alpha (x - x_ref)``; the reference
    phase defaults to the value derived from the potential.
    """
    if phi_gamma_ref is None:
        phi_gamma_ref = divisor_phase(curve, x_ref)
    phi = phi_gamma_ref - curve.alpha * (np.asarray(x, float) - x_ref)
    return 0.5 * curve.eta * np.exp(1j * phi)


def divisor_lambda(curve: OneGapCurve, x):
    """Projection of the divisor point: ``alpha + 2 Re z_gamma(x)``."""
    return curve.alpha + 2 * z_gamma(curve, x).real


def closed_weyl(curve: OneGapCurve, x, z, phi_gamma_ref: float | None = None, x_ref: float = 0.0):
    """``X(x, z) = -(z - alpha)/z_gamma(x)``."""
    return -(np.asarray(z, complex) - curve.alpha) / z_gamma(curve, x, phi_gamma_ref, x_ref)


def closed_A(curve: OneGapCurve, y, z):
    """``A(y, z) = h_minus(z | gamma(y))``."""
    return h_functions(curve, z, z_gamma(curve, y))[1]


def z_from_curve_point(curve: OneGapCurve, lam: complex, w: complex) -> complex:
    """Uniformizer of ``(lam, w)``: the root of ``lam(z) = lam`` whose multiplier matches ``w``."""
    roots = np.roots([1.0, -(lam - curve.alpha), curve.eta**2 / 4]) + curve.alpha
    mult = multiplier_z(curve, roots)
    return complex(roots[np.argmin(np.abs(mult - w))])
