"""Periodic grids, unitary Fourier transforms and quadrature norms.

The box ``[-L/2, L/2)^n`` stands in for R^n. Spectral coefficients are stored
in centered lexicographic order: array index ``i`` along an axis holds the
integer frequency index ``j = i - N/2`` and the frequency ``xi_j = j * 2pi/L``.
The normalization makes ``c_j = fhat(xi_j) / L^(n/2)`` where ``fhat`` is the
continuous transform ``int f(x) exp(-i x.xi) dx`` approximated by the
rectangle rule, so the l2 norm of the coefficients equals the L2 quadrature
norm of the samples.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft

from .errors import InvalidExponent, InvalidGrid, NonFiniteSymbol, NonFiniteValues

_WORKERS = None


def set_workers(count: int | None) -> None:
    """Cap the number of FFT worker threads (``None`` reads MODKG_THREADS)."""
    global _WORKERS
    _WORKERS = count


def workers() -> int:
    if _WORKERS is not None:
        return max(1, int(_WORKERS))
    env = os.environ.get("MODKG_THREADS")
    return max(1, int(env)) if env else 1


def fftn(a: np.ndarray, axes) -> np.ndarray:
    return sfft.fftn(a, axes=axes, workers=workers())


def ifftn(a: np.ndarray, axes) -> np.ndarray:
    return sfft.ifftn(a, axes=axes, workers=workers())


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with ``N`` samples per axis on a box of edge ``L``."""

    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise InvalidGrid(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.N < 16 or self.N & (self.N - 1):
            raise InvalidGrid(f"N must be a power of two >= 16, got {self.N}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise InvalidGrid(f"box length must be positive, got {self.L}")
        object.__setattr__(self, "L", float(self.L))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def dxi(self) -> float:
        return 2.0 * math.pi / self.L

    @property
    def nyquist(self) -> float:
        return math.pi * self.N / self.L

    @property
    def volume(self) -> float:
        return self.L ** self.n

    @property
    def resolves_unit_windows(self) -> bool:
        return self.dxi <= 0.125

    @property
    def kmax(self) -> int:
        """Largest band index with ``sqrt(n) + kmax`` strictly below Nyquist."""
        return math.ceil(self.nyquist - math.sqrt(self.n)) - 1

    def x_axis(self) -> np.ndarray:
        return -self.L / 2 + self.h * np.arange(self.N)

    def index_axis(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2)

    def xi_axis(self) -> np.ndarray:
        return self.dxi * self.index_axis()

    def x_mesh(self) -> tuple[np.ndarray, ...]:
        ax = self.x_axis()
        return tuple(np.meshgrid(*([ax] * self.n), indexing="ij"))

    def xi_mesh(self) -> tuple[np.ndarray, ...]:
        ax = self.xi_axis()
        return tuple(np.meshgrid(*([ax] * self.n), indexing="ij"))

    def xi_norm(self) -> np.ndarray:
        """Euclidean |xi| on the centered frequency grid."""
        ax2 = self.xi_axis() ** 2
        out = np.zeros(self.shape)
        for d in range(self.n):
            out = out + ax2.reshape([-1 if i == d else 1 for i in range(self.n)])
        return np.sqrt(out)

    def japanese(self) -> np.ndarray:
        """<xi> = (1 + |xi|^2)^(1/2) on the centered frequency grid."""
        return np.sqrt(1.0 + self.xi_norm() ** 2)

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.n, self.L, self.N * factor)


def _sign_axis(N: int) -> np.ndarray:
    # (-1)^j for j in [-N/2, N/2): shifts the origin from x=0 to x=-L/2.
    return np.where(np.arange(-N // 2, N // 2) % 2 == 0, 1.0, -1.0)


def _phase(spec: GridSpec) -> np.ndarray:
    s = _sign_axis(spec.N)
    out = np.ones(spec.shape)
    for d in range(spec.n):
        out = out * s.reshape([-1 if i == d else 1 for i in range(spec.n)])
    return out


def _scale(spec: GridSpec) -> float:
    return spec.h ** spec.n / spec.L ** (spec.n / 2)


def values_to_coefficients(spec: GridSpec, values: np.ndarray, leading: int = 0) -> np.ndarray:
    """Centered coefficients of physical samples; ``leading`` batch axes are kept."""
    axes = tuple(range(leading, leading + spec.n))
    raw = sfft.fftshift(fftn(values, axes), axes=axes)
    return raw * (_phase(spec) * _scale(spec))


def coefficients_to_values(spec: GridSpec, coeffs: np.ndarray, leading: int = 0) -> np.ndarray:
    axes = tuple(range(leading, leading + spec.n))
    raw = sfft.ifftshift(coeffs * (_phase(spec) / _scale(spec)), axes=axes)
    return ifftn(raw, axes)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function on ``spec``'s grid (read-only)."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.size == self.spec.N ** self.spec.n and v.shape != self.spec.shape:
            v = v.reshape(self.spec.shape)
        if v.shape != self.spec.shape:
            raise InvalidGrid(f"values shape {v.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteValues("field contains NaN or Inf")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_function(cls, spec: GridSpec, fn: Callable[..., np.ndarray]) -> "Field":
        return cls(spec, np.broadcast_to(fn(*spec.x_mesh()), spec.shape))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "Field":
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    @classmethod
    def plane_wave(cls, spec: GridSpec, index: Sequence[int]) -> "Field":
        """exp(i xi_j . x) for the integer frequency multi-index ``index``."""
        index = tuple(index) + (0,) * (spec.n - len(index))
        phase = sum(spec.dxi * j * x for j, x in zip(index, spec.x_mesh()))
        return cls(spec, np.exp(1j * phase))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other: "Field") -> "Field":
        return Field(self.spec, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.spec, self.values - other.values)

    def __mul__(self, scalar) -> "Field":
        return Field(self.spec, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients ``c_j`` for ``j`` in ``[-N/2, N/2)^n``, centered storage."""

    spec: GridSpec
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients)
        if c.shape != self.spec.shape:
            raise InvalidGrid(f"coefficient shape {c.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(c)):
            raise NonFiniteValues("coefficients contain NaN or Inf")
        object.__setattr__(self, "coefficients", _frozen(c))

    def index_to_position(self, j: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(i) + self.spec.N // 2 for i in j)

    def at(self, j: Sequence[int]) -> complex:
        return complex(self.coefficients[self.index_to_position(j)])

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))


def forward_transform(f: Field) -> SpectralField:
    return SpectralField(f.spec, values_to_coefficients(f.spec, f.values))


def inverse_transform(g: SpectralField) -> Field:
    return Field(g.spec, coefficients_to_values(g.spec, g.coefficients))


Symbol = Callable[..., np.ndarray]


def evaluate_symbol(spec: GridSpec, m) -> np.ndarray:
    """Sample a symbol on the centered frequency grid.

    ``m`` is either an array already sampled on the grid, or a callable that
    receives the ``n`` frequency meshes.
    """
    if callable(m):
        vals = np.asarray(m(*spec.xi_mesh()))
    else:
        vals = np.asarray(m)
    vals = np.broadcast_to(vals, spec.shape)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSymbol("symbol is NaN/Inf at a retained frequency")
    return vals


def apply_multiplier(g: SpectralField, m) -> SpectralField:
    return SpectralField(g.spec, g.coefficients * evaluate_symbol(g.spec, m))


def multiply(f: Field, m) -> Field:
    """Apply the Fourier multiplier ``m`` to a physical field."""
    return inverse_transform(apply_multiplier(forward_transform(f), m))


def lp_of_array(values: np.ndarray, p: float, cell: float, axes=None) -> np.ndarray | float:
    """Riemann-sum L^p norm over ``axes`` with cell volume ``cell``."""
    if p < 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    a = np.abs(values)
    if math.isinf(p):
        return np.max(a, axis=axes)
    peak = np.max(a, axis=axes, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    s = np.sum((a / safe) ** p, axis=axes)
    peak = np.squeeze(peak, axis=axes) if axes is not None else peak.reshape(())
    return peak * (s * cell) ** (1.0 / p)


def lp_norm(f: Field, p: float) -> float:
    """(sum |f(x)|^p h^n)^(1/p); ``p = inf`` gives the max modulus."""
    return float(lp_of_array(f.values, p, f.spec.h ** f.spec.n))
