"""Frequency-uniform and dyadic decompositions on the periodic grid.

The unit-box windows are tensor products of the 1-D bump
``psi(t) = exp(-smoothness / (1 - t^2))`` on ``|t| < 1`` renormalized by its
integer-lattice sum, so ``sum_k phi(xi - k) = 1`` holds to rounding on every
frequency with ``|xi|_inf <= kmax``. Half-width 1 per axis puts the support of
``phi`` inside the Euclidean ball of radius ``sqrt(n)``.

Dyadic blocks use the same bump on the variable ``log2 |xi|``; the top block is
capped (equal to its raw bump below ``2^J`` and 1 above), so the blocks sum to
one on the whole grid.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import BandOutOfRange, SpectralLeakage, UnresolvedWindow
from .grid import (
    Field,
    GridSpec,
    coefficients_to_values,
    forward_transform,
    values_to_coefficients,
)

LEAKAGE_TOL = 1e-10
# Bands whose windowed coefficients are below this fraction of the input's
# largest coefficient contribute nothing above rounding and are not transformed.
BAND_SKIP_TOL = 1e-17
_BATCH_BYTES = 1 << 26


def bump(t: np.ndarray, smoothness: float = 1.0) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-smoothness / (1.0 - t[inside] ** 2))
    return out


def unit_window(t: np.ndarray, smoothness: float = 1.0) -> np.ndarray:
    """1-D window ``psi(t) / sum_m psi(t - m)``, supported on ``|t| < 1``."""
    t = np.asarray(t, dtype=float)
    num = bump(t, smoothness)
    den = num + bump(t - 1.0, smoothness) + bump(t + 1.0, smoothness)
    return np.divide(num, den, out=np.zeros_like(num), where=num > 0)


def phi(xi: np.ndarray, smoothness: float = 1.0) -> np.ndarray:
    """Base window evaluated at points ``xi`` of shape (..., n)."""
    xi = np.asarray(xi, dtype=float)
    return np.prod(unit_window(xi, smoothness), axis=-1)


@dataclass(frozen=True, eq=False)
class WindowFamily:
    """Sampled windows ``phi_k`` for all bands with ``|k|_inf <= kmax``."""

    spec: GridSpec
    smoothness: float
    kmax: int
    table: np.ndarray = field(repr=False)  # (2 kmax + 1, N): phi1(xi - k) per axis
    support: tuple = field(repr=False)  # per 1-D band, (start, stop) index slice

    @property
    def band_indices(self) -> list[tuple[int, ...]]:
        r = range(-self.kmax, self.kmax + 1)
        return [tuple(k) for k in itertools.product(r, repeat=self.spec.n)]

    def row(self, k1: int) -> np.ndarray:
        return self.table[k1 + self.kmax]

    def check_band(self, k) -> tuple[int, ...]:
        k = tuple(int(v) for v in np.atleast_1d(k))
        if len(k) != self.spec.n:
            raise BandOutOfRange(f"band index {k} has wrong dimension")
        if max(abs(v) for v in k) > self.kmax:
            raise BandOutOfRange(f"band {k} outside retained range |k| <= {self.kmax}")
        return k

    def window(self, k) -> np.ndarray:
        """phi_k sampled on the centered frequency grid."""
        k = self.check_band(k)
        out = np.ones(self.spec.shape)
        for d, kd in enumerate(k):
            out = out * self.row(kd).reshape([-1 if i == d else 1 for i in range(self.spec.n)])
        return out

    def slices(self, k) -> tuple[slice, ...]:
        return tuple(slice(*self.support[kd + self.kmax]) for kd in k)

    def partition_sum(self) -> np.ndarray:
        """sum over retained bands of phi_k on the grid (separable)."""
        s1 = self.table.sum(axis=0)
        out = np.ones(self.spec.shape)
        for d in range(self.spec.n):
            out = out * s1.reshape([-1 if i == d else 1 for i in range(self.spec.n)])
        return out

    def resolved_mask(self) -> np.ndarray:
        """Frequencies where the truncated partition sums to one."""
        ax = np.abs(self.spec.xi_axis()) <= self.kmax
        out = np.ones(self.spec.shape, dtype=bool)
        for d in range(self.spec.n):
            out = out & ax.reshape([-1 if i == d else 1 for i in range(self.spec.n)])
        return out

    def to_csv(self, path) -> None:
        xi = self.spec.xi_axis()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "xi", "phi"])
            for k1 in range(-self.kmax, self.kmax + 1):
                lo, hi = self.support[k1 + self.kmax]
                for i in range(lo, hi):
                    w.writerow([k1, repr(float(xi[i])), repr(float(self.table[k1 + self.kmax, i]))])


_FAMILIES: dict = {}


def build_windows(spec: GridSpec, smoothness: float = 1.0) -> WindowFamily:
    if not spec.resolves_unit_windows:
        raise UnresolvedWindow(
            f"frequency spacing {spec.dxi:.4g} > 1/8; enlarge the box (L >= 16 pi)"
        )
    key = (spec, float(smoothness))
    if key in _FAMILIES:
        return _FAMILIES[key]
    kmax = spec.kmax
    if kmax < 0:
        raise UnresolvedWindow("grid too coarse to retain any band")
    xi = spec.xi_axis()
    rows, support = [], []
    for k1 in range(-kmax, kmax + 1):
        r = unit_window(xi - k1, smoothness)
        nz = np.nonzero(r)[0]
        rows.append(r)
        support.append((int(nz[0]), int(nz[-1]) + 1) if nz.size else (0, 0))
    fam = WindowFamily(spec, float(smoothness), kmax, np.array(rows), tuple(support))
    fam.table.flags.writeable = False
    _FAMILIES[key] = fam
    return fam


def leakage(spec: GridSpec, coeffs: np.ndarray, mask: np.ndarray) -> float:
    """Relative l2 mass of ``coeffs`` outside ``mask`` (trailing n axes)."""
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return 0.0
    out = float(np.sum(np.abs(coeffs[..., ~mask]) ** 2))
    return math.sqrt(out / total)


def check_band_resolved(family: WindowFamily, coeffs: np.ndarray, tol: float = LEAKAGE_TOL) -> None:
    lk = leakage(family.spec, coeffs, family.resolved_mask())
    if lk > tol:
        raise SpectralLeakage(
            f"relative spectral mass {lk:.3e} outside retained bands exceeds {tol:.1e}", lk
        )


def iter_bands(
    family: WindowFamily,
    coeffs: np.ndarray,
    leading: int = 0,
    skip_tol: float = BAND_SKIP_TOL,
) -> Iterator[tuple[tuple[int, ...], np.ndarray | None]]:
    """Yield ``(k, values)`` for every retained band in lexicographic order.

    ``coeffs`` carries ``leading`` batch axes before the n spatial axes; the
    yielded physical samples keep them. Negligible bands yield ``None``.
    """
    spec = family.spec
    n = spec.n
    scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    thresh = skip_tol * scale
    per = max(1, _BATCH_BYTES // (16 * coeffs.size))
    pending: list = []

    def flush():
        if not pending:
            return []
        stack = np.zeros((len(pending),) + coeffs.shape, dtype=complex)
        for i, (_, sl, w) in enumerate(pending):
            stack[(i,) + (slice(None),) * leading + sl] = w
        vals = coefficients_to_values(spec, stack, leading=leading + 1)
        out = [(k, vals[i]) for i, (k, _, _) in enumerate(pending)]
        pending.clear()
        return out

    for k in family.band_indices:
        sl = family.slices(k)
        w = coeffs[(slice(None),) * leading + sl]
        for d, kd in enumerate(k):
            lo, hi = family.support[kd + family.kmax]
            shape = [1] * (leading + n)
            shape[leading + d] = hi - lo
            w = w * family.row(kd)[lo:hi].reshape(shape)
        if scale == 0.0 or not np.any(np.abs(w) > thresh):
            yield from flush()
            yield k, None
            continue
        pending.append((k, sl, w))
        if len(pending) >= per:
            yield from flush()
    yield from flush()


def box_operator(f: Field, k, family: WindowFamily | None = None) -> Field:
    family = family or build_windows(f.spec)
    k = family.check_band(k)
    c = forward_transform(f).coefficients * family.window(k)
    return Field(f.spec, coefficients_to_values(f.spec, c))


@dataclass(frozen=True, eq=False)
class ModulationDecomposition:
    spec: GridSpec
    bands: dict = field(repr=False)  # band index -> Field

    def __getitem__(self, k) -> Field:
        return self.bands[tuple(k)]


def decompose(f: Field, family: WindowFamily | None = None, tol: float = LEAKAGE_TOL) -> ModulationDecomposition:
    family = family or build_windows(f.spec)
    c = values_to_coefficients(f.spec, f.values)
    check_band_resolved(family, c, tol)
    bands = {}
    for k, vals in iter_bands(family, c, skip_tol=0.0):
        bands[k] = Field(f.spec, np.zeros(f.spec.shape) if vals is None else vals)
    return ModulationDecomposition(f.spec, bands)


def reconstruct(d: ModulationDecomposition) -> Field:
    total = np.zeros(d.spec.shape, dtype=complex)
    for k in sorted(d.bands):
        total = total + d.bands[k].values
    return Field(d.spec, total)


@dataclass(frozen=True, eq=False)
class DyadicFamily:
    """Littlewood-Paley blocks ``j = 0..jmax`` sampled on the grid."""

    spec: GridSpec
    smoothness: float
    jmax: int
    blocks: np.ndarray = field(repr=False)  # (jmax + 1, *shape)

    def block(self, j: int) -> np.ndarray:
        if not 0 <= j <= self.jmax:
            raise BandOutOfRange(f"dyadic index {j} outside 0..{self.jmax}")
        return self.blocks[j]


_DYADIC: dict = {}


def build_dyadic(spec: GridSpec, smoothness: float = 1.0) -> DyadicFamily:
    key = (spec, float(smoothness))
    if key in _DYADIC:
        return _DYADIC[key]
    jmax = int(math.floor(math.log2(spec.nyquist)))
    r = spec.xi_norm()
    with np.errstate(divide="ignore"):
        u = np.where(r > 0, np.log2(np.where(r > 0, r, 1.0)), -np.inf)
    raw = []
    for j in range(jmax + 1):
        if j == 0:
            b = np.where(u <= 0, 1.0, bump(np.where(np.isfinite(u), u, 0.0), smoothness))
        else:
            b = bump(np.where(np.isfinite(u), u - j, -2.0), smoothness)
        if j == jmax:
            b = np.where(u >= j, 1.0, b)
        raw.append(b)
    raw = np.array(raw)
    total = raw.sum(axis=0)
    blocks = raw / total
    blocks.flags.writeable = False
    fam = DyadicFamily(spec, float(smoothness), jmax, blocks)
    _DYADIC[key] = fam
    return fam


def dyadic_operator(f: Field, j: int, family: DyadicFamily | None = None) -> Field:
    family = family or build_dyadic(f.spec)
    c = forward_transform(f).coefficients * family.block(j)
    return Field(f.spec, coefficients_to_values(f.spec, c))


def iter_dyadic(family: DyadicFamily, coeffs: np.ndarray, leading: int = 0):
    """Yield ``(j, values)`` for every dyadic block (batch axes preserved)."""
    for j in range(family.jmax + 1):
        yield j, coefficients_to_values(family.spec, coeffs * family.blocks[j], leading=leading)


def modulate(f: Field, m) -> Field:
    """Multiply by ``exp(i m.x)``; ``m`` should be a grid frequency."""
    m = tuple(np.atleast_1d(m))
    phase = sum(mi * x for mi, x in zip(m, f.spec.x_mesh()))
    return Field(f.spec, f.values * np.exp(1j * phase))
