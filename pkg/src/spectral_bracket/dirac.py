"""Transition matrices of the Zakharov-Shabat problem ``M' = V M``.

``V(x, lam) = [[-i*lam/2, conj(psi)], [psi, i*lam/2]]``. All integrators work on
batches of spectral parameters at once; the state is the stacked complex
array of shape ``(n_lam, blocks, 2, 2)`` flattened for :func:`scipy.integrate.solve_ivp`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError
from .potential import Potential
from .quadrature import GradientField, gregory_weights

DEFAULT_TOL = 1e-10
DEFAULT_IM_CAP = 60.0  # bound on |Im lam| * l


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """``M(x, y, lam)`` with ``M(y, y, lam) = I``."""

    matrix: np.ndarray
    x: float
    y: float
    lam: complex

    @property
    def m11(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def m12(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def m21(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def m22(self) -> complex:
        return complex(self.matrix[1, 1])

    @property
    def det(self) -> complex:
        m = self.matrix
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def trace(self) -> complex:
        return complex(self.matrix[0, 0] + self.matrix[1, 1])

    def inverse(self) -> np.ndarray:
        """Adjugate, exact for unimodular matrices."""
        return adjugate(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def adjugate(m: np.ndarray) -> np.ndarray:
    """Adjugate of a (stack of) 2x2 matrices; equals the inverse when det = 1."""
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out


def sigma1_conjugate(m: np.ndarray) -> np.ndarray:
    """``sigma1 conj(m) sigma1`` (entries swapped across both diagonals)."""
    return np.conj(m[..., ::-1, ::-1])


def _check_cap(pot: Potential, lams: np.ndarray, im_cap: float | None):
    cap = DEFAULT_IM_CAP if im_cap is None else im_cap
    if lams.size and np.max(np.abs(lams.imag)) * pot.l > cap:
        raise IntegrationError(
            f"|Im lambda| * l exceeds the configured bound {cap:g}; raise im_cap to proceed"
        )


def _left_v(a, p, pb, A):
    # V @ A with V = [[a, pb], [p, -a]]; a broadcast over the lambda axis
    out = np.empty_like(A)
    out[..., 0, :] = a * A[..., 0, :] + pb * A[..., 1, :]
    out[..., 1, :] = p * A[..., 0, :] - a * A[..., 1, :]
    return out


def _right_v(a, p, pb, A):
    # A @ V
    out = np.empty_like(A)
    out[..., :, 0] = A[..., :, 0] * a + A[..., :, 1] * p
    out[..., :, 1] = A[..., :, 0] * pb - A[..., :, 1] * a
    return out


def _sigma3_half(A):
    # (dV/dlam) @ A = -(i/2) sigma3 @ A
    out = np.empty_like(A)
    out[..., 0, :] = -0.5j * A[..., 0, :]
    out[..., 1, :] = 0.5j * A[..., 1, :]
    return out


def propagate(
    pot: Potential,
    x: float,
    y: float,
    lams,
    *,
    samples: np.ndarray | None = None,
    order: int = 0,
    backward: bool = False,
    tol: float = DEFAULT_TOL,
    im_cap: float | None = None,
):
    """Integrate transition matrices for a batch of spectral parameters.

    Parameters
    ----------
    x, y : float
        End and start points; ``M(y, y) = I``.
    lams : array_like
        Spectral parameters, shape ``(n,)``.
    samples : ndarray, optional
        Increasing offsets ``s`` in ``[0, |x - y|]`` at which to report
        results; defaults to the endpoint only.
    order : int
        Number of lambda-derivatives of the forward matrix (0, 1 or 2).
    backward : bool
        Also integrate ``B(s) = M(x, x - s*sign)`` as a row solution, which
        avoids forming ``M(x, z)`` as a product with an inverse.

    Returns
    -------
    dict
        ``"forward"`` with shape ``(n_samples, n, 2, 2)`` holding
        ``M(y + s*sign, y)``; ``"d1"``, ``"d2"`` derivative blocks and
        ``"backward"`` when requested.
    """
    lams = np.atleast_1d(np.asarray(lams, complex))
    _check_cap(pot, lams, im_cap)
    length = float(x - y)
    sign = 1.0 if length >= 0 else -1.0
    span = abs(length)
    if samples is None:
        samples = np.array([span])
    samples = np.asarray(samples, float)
    n = len(lams)
    nb = 1 + order + (1 if backward else 0)
    state0 = np.zeros((n, nb, 2, 2), complex)
    state0[:, 0] = np.eye(2)
    if backward:
        state0[:, -1] = np.eye(2)
    a = (-0.5j * lams)[:, None]
    a_back = sign * a

    def rhs(s, flat):
        st = flat.reshape(n, nb, 2, 2)
        out = np.empty_like(st)
        zf = y + sign * s
        p = complex(pot(zf)) * sign
        pb = complex(np.conj(pot(zf))) * sign
        sa = sign * a
        out[:, 0] = _left_v(sa, p, pb, st[:, 0])
        if order >= 1:
            out[:, 1] = _left_v(sa, p, pb, st[:, 1]) + sign * _sigma3_half(st[:, 0])
        if order >= 2:
            out[:, 2] = _left_v(sa, p, pb, st[:, 2]) + 2 * sign * _sigma3_half(st[:, 1])
        if backward:
            zb = x - sign * s
            q = complex(pot(zb)) * sign
            qb = complex(np.conj(pot(zb))) * sign
            out[:, -1] = _right_v(a_back, q, qb, st[:, -1])
        return out.ravel()

    result = {}
    if span == 0.0:
        traj = np.broadcast_to(state0, (len(samples),) + state0.shape).copy()
    else:
        sol = solve_ivp(
            rhs,
            (0.0, span),
            state0.ravel(),
            method="DOP853",
            t_eval=samples,
            rtol=max(tol * 1e-2, 3e-14),
            atol=tol * 1e-4,
        )
        if sol.status != 0:
            raise IntegrationError(f"transition-matrix integration failed: {sol.message}")
        traj = sol.y.T.reshape(len(samples), n, nb, 2, 2)
    result["forward"] = traj[:, :, 0]
    if order >= 1:
        result["d1"] = traj[:, :, 1]
    if order >= 2:
        result["d2"] = traj[:, :, 2]
    if backward:
        result["backward"] = traj[:, :, -1]
    return result


def transition_matrix(pot: Potential, x: float, y: float, lam: complex,
                      tol: float = DEFAULT_TOL, im_cap: float | None = None) -> TransitionMatrix:
    """``M(x, y, lam)``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    m = propagate(pot, x, y, [lam], tol=tol, im_cap=im_cap)["forward"][-1, 0]
    return TransitionMatrix(m, float(x), float(y), complex(lam))


def transition_with_lambda_derivative(pot: Potential, x: float, y: float, lam: complex,
                                      tol: float = DEFAULT_TOL, im_cap: float | None = None):
    """``M(x, y, lam)`` together with ``dM/dlam`` from the augmented system."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    r = propagate(pot, x, y, [lam], order=1, tol=tol, im_cap=im_cap)
    return TransitionMatrix(r["forward"][-1, 0], float(x), float(y), complex(lam)), r["d1"][-1, 0]


def monodromy(pot: Potential, x: float, lam: complex, tol: float = DEFAULT_TOL,
              im_cap: float | None = None) -> TransitionMatrix:
    """Monodromy ``M(x + 2l, x, lam)``."""
    return transition_matrix(pot, x + 2 * pot.l, x, lam, tol=tol, im_cap=im_cap)


def monodromy_batch(pot: Potential, lams, x: float | None = None, order: int = 0,
                    tol: float = DEFAULT_TOL, im_cap: float | None = None):
    """Monodromies (and up to two lambda-derivatives) for many ``lam`` at once.

    Returns a tuple of arrays with shape ``(n, 2, 2)``: ``(M,)``, ``(M, dM)``
    or ``(M, dM, d2M)``.
    """
    x = -pot.l if x is None else x
    lams = np.atleast_1d(np.asarray(lams, complex))
    if lams.size == 0:
        return tuple(np.zeros((0, 2, 2), complex) for _ in range(order + 1))
    r = propagate(pot, x + 2 * pot.l, x, lams, order=order, tol=tol, im_cap=im_cap)
    keys = ["forward", "d1", "d2"][: order + 1]
    return tuple(r[k][-1] for k in keys)


@dataclass(frozen=True, eq=False)
class TransitionGradient:
    """Functional derivatives of the entries of ``M(x, y, lam)``.

    ``dM/dpsi(z) = M(x, z) E21 M(z, y)`` and ``dM/dpsibar(z) = M(x, z) E12 M(z, y)``.

    Attributes
    ----------
    z, weights : ndarray
        Uniform grid on ``[y, x]`` and its quadrature weights.
    forward : ndarray
        ``M(z, y)`` on the grid, shape ``(n, 2, 2)``.
    backward : ndarray
        ``M(x, z)`` on the grid.
    transition : TransitionMatrix
        ``M(x, y, lam)``.
    dmatrix : ndarray or None
        ``dM(x, y)/dlam`` when requested.
    """

    z: np.ndarray
    weights: np.ndarray
    forward: np.ndarray
    backward: np.ndarray
    transition: TransitionMatrix
    dmatrix: np.ndarray | None = None

    @property
    def lam(self) -> complex:
        return self.transition.lam

    @property
    def matrix(self) -> np.ndarray:
        return self.transition.matrix

    def entry(self, i: int, j: int) -> GradientField:
        """Gradient of ``m_ij`` with one-based indices."""
        i, j = i - 1, j - 1
        b, f = self.backward, self.forward
        return GradientField(
            self.z,
            self.weights,
            b[:, i, 1] * f[:, 0, j],
            b[:, i, 0] * f[:, 1, j],
        )

    def __getitem__(self, name: str) -> GradientField:
        if len(name) != 3 or name[0] != "m" or name[1] not in "12" or name[2] not in "12":
            raise KeyError(name)
        return self.entry(int(name[1]), int(name[2]))

    def entries(self) -> dict:
        return {f"m{i}{j}": self.entry(i, j) for i in (1, 2) for j in (1, 2)}


def gradient_transition_batch(pot: Potential, x: float, y: float, lams, grid_size: int = 512,
                              tol: float = DEFAULT_TOL, derivative: bool = False,
                              im_cap: float | None = None) -> list[TransitionGradient]:
    """:func:`gradient_transition` for several spectral parameters sharing one grid."""
    if x < y:
        raise ValueError("gradient grid needs y <= x")
    lams = np.atleast_1d(np.asarray(lams, complex))
    span = x - y
    s = np.linspace(0.0, span, grid_size + 1)
    if span == 0.0:
        z = np.full(grid_size + 1, float(y))
        weights = np.zeros(grid_size + 1)
    else:
        z = y + s
        weights = gregory_weights(grid_size, span / grid_size)
    r = propagate(pot, x, y, lams, samples=s, order=1 if derivative else 0, backward=True,
                  tol=tol, im_cap=im_cap)
    z.setflags(write=False)
    weights.setflags(write=False)
    out = []
    for k, lam in enumerate(lams):
        fwd = r["forward"][:, k]
        # backward[s] = M(x, x - s) so reverse to align with z = y + s
        bwd = r["backward"][::-1, k]
        tm = TransitionMatrix(fwd[-1].copy(), float(x), float(y), complex(lam))
        dm = r["d1"][-1, k].copy() if derivative else None
        out.append(TransitionGradient(z, weights, fwd, bwd, tm, dm))
    return out


def gradient_transition(pot: Potential, x: float, y: float, lam: complex, grid_size: int = 512,
                        tol: float = DEFAULT_TOL, derivative: bool = False,
                        im_cap: float | None = None) -> TransitionGradient:
    """Sampled functional derivatives of all entries of ``M(x, y, lam)``.

    The grid has ``grid_size`` intervals on ``[y, x]``, endpoints included.
    ``M(x, z)`` is integrated directly as a row solution rather than formed as
    ``M(x, y) M(z, y)^{-1}``, which loses all accuracy once the entries grow
    like ``exp(|Im lam| (x - y) / 2)``.
    """
    return gradient_transition_batch(pot, x, y, [lam], grid_size, tol, derivative, im_cap)[0]


def rk4_transition(pot: Potential, x: float, y: float, lam: complex, steps: int = 4000) -> np.ndarray:
    """Fixed-step classical Runge-Kutta reference for ``M(x, y, lam)``.

    Used as an independent oracle in tests only.
    """
    h = (x - y) / steps
    m = np.eye(2, dtype=complex)

    def v(z):
        p = complex(pot(z))
        return np.array([[-0.5j * lam, np.conj(p)], [p, 0.5j * lam]])

    z = y
    for _ in range(steps):
        v0, vh, v1 = v(z), v(z + h / 2), v(z + h)
        k1 = v0 @ m
        k2 = vh @ (m + h / 2 * k1)
        k3 = vh @ (m + h / 2 * k2)
        k4 = v1 @ (m + h * k3)
        m = m + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        z += h
    return m
