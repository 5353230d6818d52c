"""Fourier multipliers and pointwise nonlinearities of the Klein-Gordon problem."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import AlphaOutOfRange
from .grid import Field, GridSpec, multiply

# Above this many stored samples the propagator tables are evaluated per row.
_TABLE_LIMIT = 1 << 24


def bessel_potential(f: Field, sigma: float) -> Field:
    """J_sigma = (I - Laplacian)^(sigma/2), symbol <xi>^sigma."""
    if sigma == 0:
        return f
    return multiply(f, f.spec.japanese() ** sigma)


def kg_cosine(f: Field, t: float) -> Field:
    """K'(t) = cos(t <xi>)."""
    return multiply(f, np.cos(t * f.spec.japanese()))


def kg_sine(f: Field, t: float) -> Field:
    """K(t) = sin(t <xi>) / <xi>; finite at xi = 0 because <0> = 1."""
    w = f.spec.japanese()
    return multiply(f, np.sin(t * w) / w)


def riesz_constant(alpha: float, n: int) -> float:
    """Fourier transform of |x|^{alpha-n} is riesz_constant * |xi|^{-alpha}."""
    return math.pi ** (n / 2) * 2.0 ** alpha * gamma_fn(alpha / 2) / gamma_fn((n - alpha) / 2)


def riesz_symbol(xi_norm: np.ndarray, alpha: float, n: int) -> np.ndarray:
    if not 0 < alpha < n:
        raise AlphaOutOfRange(f"alpha must lie in (0, {n}), got {alpha}")
    c = riesz_constant(alpha, n)
    safe = np.where(xi_norm > 0, xi_norm, 1.0)
    return np.where(xi_norm > 0, c * safe ** (-alpha), 0.0)


def riesz_potential(f: Field, alpha: float) -> Field:
    """I_alpha f = f * |y|^{alpha-n}; the zero mode is projected out."""
    return multiply(f, riesz_symbol(f.spec.xi_norm(), alpha, f.spec.n))


def power_values(u: np.ndarray, k: float, sign: int = 1) -> np.ndarray:
    """sign * |u|^k u pointwise, with 0 mapped to 0."""
    a = np.abs(u)
    out = np.zeros_like(u, dtype=complex)
    nz = a > 0
    out[nz] = a[nz] ** k * u[nz]
    return sign * out


def power_nonlinearity(u: Field, k: float, sign: int = 1) -> Field:
    if not k > 0:
        raise ValueError(f"power must be positive, got {k}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return Field(u.spec, power_values(u.values, k, sign))


def hartree_nonlinearity(u: Field, mu: float, modulus: bool = True) -> Field:
    """(|x|^{-mu} * |u|^2) u, or with u^2 in place of |u|^2 when ``modulus`` is False."""
    n = u.spec.n
    if not 0 < mu < n:
        raise AlphaOutOfRange(f"mu must lie in (0, {n}), got {mu}")
    dens = np.abs(u.values) ** 2 if modulus else u.values ** 2
    pot = riesz_potential(Field(u.spec, dens), n - mu)
    return Field(u.spec, pot.values * u.values)


@dataclass(frozen=True, eq=False)
class PropagatorCache:
    """cos(m tau <xi>) and sin(m tau <xi>)/<xi> for m = 0..M.

    Every row is evaluated directly at t = m tau; no recurrences. ``w`` is the
    sampled <xi> in whatever layout the caller works in (centered by default).
    """

    spec: GridSpec
    tau: float
    M: int
    w: np.ndarray = field(repr=False)
    _cos: np.ndarray | None = field(default=None, repr=False)
    _sin: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def build(cls, spec: GridSpec, tau: float, M: int, w: np.ndarray | None = None) -> "PropagatorCache":
        w = spec.japanese() if w is None else w
        if (M + 1) * w.size <= _TABLE_LIMIT:
            t = tau * np.arange(M + 1).reshape((-1,) + (1,) * w.ndim)
            c, s = np.cos(t * w), np.sin(t * w)
            c.flags.writeable = False
            s.flags.writeable = False
            return cls(spec, tau, M, w, c, s)
        return cls(spec, tau, M, w)

    def time(self, m: int) -> float:
        return m * self.tau

    def cos(self, m: int) -> np.ndarray:
        if self._cos is not None:
            return self._cos[m]
        return np.cos((m * self.tau) * self.w)

    def sin(self, m: int) -> np.ndarray:
        """sin(m tau <xi>) (without the 1/<xi> factor)."""
        if self._sin is not None:
            return self._sin[m]
        return np.sin((m * self.tau) * self.w)

    def sine_kernel(self, m: int) -> np.ndarray:
        return self.sin(m) / self.w
