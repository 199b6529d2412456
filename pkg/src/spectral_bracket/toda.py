"""Open Toda lattice: Jacobi matrix, spectral data, rational Weyl function and brackets.

``H = sum p_k^2/2 + sum_{k<N} exp(q_k - q_{k+1})``. The Jacobi matrix has
diagonal ``-p_k`` and off-diagonal ``exp((q_k - q_{k+1})/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import PoleError, SpectralError


@dataclass(frozen=True, eq=False)
class TodaState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, float).ravel()
        p = np.array(self.p, float).ravel()
        if q.shape != p.shape or len(q) < 2:
            raise ValueError("q and p must have the same length N >= 2")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def N(self) -> int:
        return len(self.q)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, v) -> "TodaState":
        v = np.asarray(v, float)
        n = len(v) // 2
        return cls(v[:n], v[n:])

    @classmethod
    def random(cls, rng, N: int, scale: float = 1.0) -> "TodaState":
        return cls(scale * rng.standard_normal(N), scale * rng.standard_normal(N))

    def to_dict(self) -> dict:
        return {"N": self.N, "q": self.q.tolist(), "p": self.p.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "TodaState":
        state = cls(d["q"], d["p"])
        if "N" in d and int(d["N"]) != state.N:
            raise ValueError("N does not match the length of q")
        return state


@dataclass(frozen=True, eq=False)
class TodaSpectralData:
    """Eigenvalues ``lam_1 < ... < lam_N`` and residues ``rho_k`` (squared first eigenvector components)."""

    eigenvalues: np.ndarray
    residues: np.ndarray


def _offdiag(state: TodaState) -> np.ndarray:
    with np.errstate(over="raise"):
        try:
            return np.exp(0.5 * (state.q[:-1] - state.q[1:]))
        except FloatingPointError as exc:
            raise SpectralError("off-diagonal entries overflow") from exc


def hamiltonian(state: TodaState) -> float:
    return float(0.5 * np.sum(state.p**2) + np.sum(np.exp(state.q[:-1] - state.q[1:])))


def jacobi_matrix(state: TodaState) -> np.ndarray:
    """Symmetric tridiagonal ``L`` with diagonal ``-p`` and off-diagonal ``exp((q_k - q_{k+1})/2)``."""
    c = _offdiag(state)
    return np.diag(-state.p) + np.diag(c, 1) + np.diag(c, -1)


def toda_spectral_data(state: TodaState) -> TodaSpectralData:
    vals, vecs = eigh_tridiagonal(-state.p, _offdiag(state))
    return TodaSpectralData(vals, vecs[0] ** 2)


def toda_weyl(data: TodaSpectralData, lam: complex) -> complex:
    """``X(lam) = sum rho_k/(lam_k - lam)``, the ``(1,1)`` entry of ``(L - lam)^{-1}``."""
    d = data.eigenvalues - lam
    if np.any(d == 0):
        raise PoleError("Weyl function evaluated at an eigenvalue")
    return complex(np.sum(data.residues / d))


def resolvent_11(state: TodaState, lam: complex) -> complex:
    """Direct ``[(L - lam)^{-1}]_{11}`` by a linear solve."""
    L = jacobi_matrix(state).astype(complex)
    e1 = np.zeros(state.N)
    e1[0] = 1.0
    return complex(np.linalg.solve(L - lam * np.eye(state.N), e1)[0])


def _gradient(F, v: np.ndarray, step: float) -> np.ndarray:
    g = np.zeros(len(v), complex)
    for i in range(len(v)):
        h = step * max(1.0, abs(v[i]))

        def central(hh):
            e = np.zeros(len(v))
            e[i] = hh
            return (F(v + e) - F(v - e)) / (2 * hh)

        # one Richardson step removes the h^2 term
        g[i] = (4 * central(h / 2) - central(h)) / 3
    return g


def toda_gradient(state: TodaState, F, step: float = 1e-4):
    """``(dF/dq, dF/dp)`` by Richardson-refined central differences."""
    g = _gradient(lambda v: complex(F(TodaState.from_vector(v))), state.vector, step)
    return g[: state.N], g[state.N:]


def toda_bracket(state: TodaState, F, G, step: float = 1e-4) -> complex:
    """Canonical bracket ``sum dF/dq dG/dp - dF/dp dG/dq`` of two observables ``F(state)``, ``G(state)``."""
    fq, fp = toda_gradient(state, F, step)
    gq, gp = toda_gradient(state, G, step)
    val = complex(np.sum(fq * gp - fp * gq))
    return val


def mah_rhs(xl: complex, xm: complex, lam: complex, mu: complex) -> complex:
    """``(X(lam) - X(mu)) ((X(lam) - X(mu))/(lam - mu) - X(lam) X(mu))``."""
    return (xl - xm) * ((xl - xm) / (lam - mu) - xl * xm)


def verify_mah(state: TodaState, lam: complex, mu: complex, step: float = 1e-4) -> dict:
    """Finite-difference ``{X(lam), X(mu)}`` against the restricted Atiyah-Hitchin formula."""
    if lam == mu:
        raise ValueError("lambda and mu must differ")
    Xl = lambda s: toda_weyl(toda_spectral_data(s), lam)  # noqa: E731
    Xm = lambda s: toda_weyl(toda_spectral_data(s), mu)  # noqa: E731
    lhs = toda_bracket(state, Xl, Xm, step)
    xl, xm = Xl(state), Xm(state)
    rhs = mah_rhs(xl, xm, lam, mu)
    return {"lhs": lhs, "rhs": rhs, "residual": float(abs(lhs - rhs) / (1 + abs(rhs)))}


def casimir_bracket(state: TodaState, mu: complex, step: float = 1e-4) -> complex:
    """``{sum lam_k, X(mu)}``; vanishes because the trace only depends on ``p``."""
    tr = lambda s: float(np.sum(toda_spectral_data(s).eigenvalues))  # noqa: E731
    Xm = lambda s: toda_weyl(toda_spectral_data(s), mu)  # noqa: E731
    return toda_bracket(state, tr, Xm, step)


def _force(q: np.ndarray) -> np.ndarray:
    e = np.exp(q[:-1] - q[1:])
    f = np.zeros_like(q)
    f[:-1] -= e
    f[1:] += e
    return f


# Yoshida triple-jump coefficients lifting Stormer-Verlet to order 6
_W1 = 1.0 / (2 - 2 ** (1 / 3))
_W0 = 1 - 2 * _W1
_Y4 = (_W1, _W0, _W1)
_V1 = 1.0 / (2 - 2 ** (1 / 5))
_V0 = 1 - 2 * _V1
_Y6 = tuple(a * b for b in (_V1, _V0, _V1) for a in _Y4)


def toda_flow_step(state: TodaState, dt: float, steps: int = 1) -> TodaState:
    """Advance the Toda flow with a sixth-order symplectic composition of Stormer-Verlet.

    Pairwise forces cancel, so the total momentum is conserved to rounding.
    """
    q, p = state.q.copy(), state.p.copy()
    for _ in range(steps):
        for c in _Y6:
            h = c * dt
            p += 0.5 * h * _force(q)
            q += h * p
            p += 0.5 * h * _force(q)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise SpectralError("Toda integration blew up")
    return TodaState(q, p)
