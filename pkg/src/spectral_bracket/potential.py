"""Smooth 2l-periodic potentials given by finite Fourier series."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype).ravel()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Potential:
    """``psi(x) = sum_k c_k exp(i*pi*k*x/l)`` on the period ``[-l, l]``.

    Attributes
    ----------
    l : float
        Half period.
    modes : ndarray of int
        Fourier indices ``k`` (distinct).
    coeffs : ndarray of complex
        Coefficients ``c_k`` aligned with ``modes``.
    """

    l: float
    modes: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError("half period l must be positive")
        modes = _frozen(self.modes, np.int64)
        coeffs = _frozen(self.coeffs, complex)
        if modes.shape != coeffs.shape:
            raise ValueError("modes and coeffs must have the same length")
        if len(np.unique(modes)) != len(modes):
            raise ValueError("Fourier modes must be distinct")
        object.__setattr__(self, "l", float(self.l))
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coeffs", coeffs)

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, l: float = np.pi) -> "Potential":
        return cls(l, [], [])

    @classmethod
    def from_modes(cls, l: float, coeffs: dict) -> "Potential":
        """Build from a ``{k: c_k}`` mapping."""
        ks = sorted(coeffs)
        return cls(l, ks, [coeffs[k] for k in ks])

    @classmethod
    def from_samples(cls, samples, l: float, cutoff: int | None = None) -> "Potential":
        """Discrete Fourier analysis of samples at ``x_j = -l + 2*l*j/n``, ``j < n``.

        Modes with ``|k| > cutoff`` are discarded (default: all resolvable modes).
        """
        samples = np.asarray(samples, complex)
        n = len(samples)
        ks = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
        c = np.fft.fft(samples) / n * np.where(ks % 2, -1.0, 1.0)
        keep = np.abs(ks) <= (n // 2 - 1 if cutoff is None else cutoff)
        order = np.argsort(ks[keep])
        return cls(l, ks[keep][order], c[keep][order])

    @classmethod
    def random(cls, rng, l: float = np.pi, max_mode: int = 2, scale: float = 0.3,
               n_modes: int | None = None) -> "Potential":
        """Random trigonometric polynomial with modes in ``[-max_mode, max_mode]``."""
        pool = np.arange(-max_mode, max_mode + 1)
        n_modes = len(pool) if n_modes is None else n_modes
        ks = np.sort(rng.choice(pool, size=n_modes, replace=False))
        c = scale * (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) / np.sqrt(2 * n_modes)
        return cls(l, ks, c)

    # evaluation -------------------------------------------------------------

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.pi * self.modes / self.l

    @property
    def max_mode(self) -> int:
        return int(np.max(np.abs(self.modes))) if len(self.modes) else 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def _series(self, x, c):
        x = np.asarray(x, float)
        if not len(self.modes):
            return np.zeros(x.shape, complex)
        phase = np.exp(1j * np.multiply.outer(x, self.wavenumbers))
        return phase @ c

    def __call__(self, x):
        """``psi(x)``; scalar in, scalar out."""
        return self._series(x, self.coeffs)

    def conj_eval(self, x):
        """``conj(psi(x))`` for real ``x``."""
        return np.conj(self(x))

    def derivative(self, x, order: int = 1):
        """Term-wise differentiated series ``psi^(order)(x)``."""
        return self._series(x, self.coeffs * (1j * self.wavenumbers) ** order)

    # transformations --------------------------------------------------------

    def shifted(self, a: float) -> "Potential":
        """``x -> psi(x + a)``."""
        return Potential(self.l, self.modes, self.coeffs * np.exp(1j * self.wavenumbers * a))

    def reflected_conjugate(self) -> "Potential":
        """``x -> conj(psi(-x))``."""
        return Potential(self.l, self.modes, np.conj(self.coeffs))

    def perturbed(self, other: "Potential", eps: complex) -> "Potential":
        """``psi + eps*other`` (same half period)."""
        if other.l != self.l:
            raise ValueError("half periods differ")
        table = dict(zip(self.modes.tolist(), self.coeffs))
        for k, c in zip(other.modes.tolist(), other.coeffs):
            table[k] = table.get(k, 0) + eps * c
        return Potential.from_modes(self.l, table)

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "coeffs": [
                {"k": int(k), "re": float(c.real), "im": float(c.imag)}
                for k, c in zip(self.modes, self.coeffs)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Potential":
        try:
            l = float(d["l"])
            entries = d.get("coeffs", [])
            table = {int(e["k"]): complex(float(e.get("re", 0.0)), float(e.get("im", 0.0))) for e in entries}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed potential descriptor: {exc}") from exc
        if len(table) != len(entries):
            raise ValueError("duplicate Fourier mode in potential descriptor")
        return cls.from_modes(l, table)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        return cls.from_dict(json.loads(text))


def eval_potential(pot: Potential, x):
    """``psi(x)``."""
    return pot(x)


def make_plane_wave(C: complex, n: int, l: float) -> Potential:
    """Plane wave ``C*exp(i*pi*n*x/l)``; the zero potential when ``C == 0``."""
    if not l > 0:
        raise ValueError("half period l must be positive")
    if C == 0:
        return Potential.zero(l)
    return Potential(l, [n], [C])


def conserved_quantities(pot: Potential, n_points: int = 512) -> tuple[float, float, float]:
    """The first three NLS integrals over ``[-l, l]``.

    ``H1 = 1/2 int |psi|^2``, ``H2 = 1/(2i) int psi*conj(psi)'`` and
    ``H3 = 1/2 int |psi'|^2 + |psi|^4``, by the periodic trapezoid rule. The
    number of points is raised if needed so the quartic term is not aliased.
    """
    n = max(n_points, 4 * pot.max_mode + 2)
    x = -pot.l + 2 * pot.l * np.arange(n) / n
    h = 2 * pot.l / n
    psi = pot(x)
    dpsi = pot.derivative(x)
    a2 = np.abs(psi) ** 2
    h1 = 0.5 * h * np.sum(a2)
    h2 = h * np.sum(psi * np.conj(dpsi)) / 2j
    h3 = 0.5 * h * np.sum(np.abs(dpsi) ** 2 + a2**2)
    return float(h1), float(h2.real), float(h3)
