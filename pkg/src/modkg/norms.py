"""Modulation, Besov, Sobolev and mixed time-space norms.

Infinite lattice and dyadic sums are truncated to the retained bands; inputs
must be band-resolved (``SpectralLeakage`` otherwise) unless ``check=False``.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .decomposition import (
    BAND_SKIP_TOL,
    WindowFamily,
    build_dyadic,
    build_windows,
    check_band_resolved,
    iter_bands,
    iter_dyadic,
)
from .errors import EmptyTrajectory, InvalidExponent
from .grid import Field, GridSpec, lp_of_array, values_to_coefficients
from .trajectory import Trajectory, trapezoid_weights


class Order(enum.Enum):
    SEQUENCE_OUTSIDE = "sequence_outside"  # l^{s,q}_box(L^r(0,T; L^p))
    TIME_OUTSIDE = "time_outside"  # L^r(0,T; M^s_{p,q})


@dataclass(frozen=True)
class SpaceParams:
    s: float = 0.0
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise InvalidExponent(f"p and q must be >= 1, got p={self.p}, q={self.q}")

    def shifted(self, ds: float) -> "SpaceParams":
        return replace(self, s=self.s + ds)


@dataclass(frozen=True)
class TimeSpaceParams:
    space: SpaceParams
    r: float = 2.0
    T: float | None = None  # None: use the whole trajectory
    order: Order = Order.SEQUENCE_OUTSIDE

    def __post_init__(self):
        if self.r < 1:
            raise InvalidExponent(f"r must be >= 1, got {self.r}")
        if self.T is not None and not self.T > 0:
            raise ValueError("horizon T must be positive")


def japanese(k) -> float:
    k = np.asarray(k, dtype=float)
    return float(np.sqrt(1.0 + np.sum(k * k)))


def weighted_lq(weights: np.ndarray, values: np.ndarray, q: float, axis: int = 0):
    """(sum_i (w_i v_i)^q)^(1/q) along ``axis``; ``q = inf`` is the max."""
    terms = np.abs(np.moveaxis(np.asarray(values, dtype=float), axis, 0))
    w = np.asarray(weights, dtype=float).reshape((-1,) + (1,) * (terms.ndim - 1))
    terms = w * terms
    if terms.shape[0] == 0:
        return np.zeros(terms.shape[1:])
    if math.isinf(q):
        return np.max(terms, axis=0)
    peak = np.max(terms, axis=0)
    safe = np.where(peak > 0, peak, 1.0)
    return peak * np.sum((terms / safe) ** q, axis=0) ** (1.0 / q)


def band_norm_table(
    spec: GridSpec,
    values: np.ndarray,
    p: float,
    family: WindowFamily | None = None,
    leading: int = 0,
    check: bool = True,
    skip: bool = True,
):
    """L^p norms of every band ``box_k f``.

    Returns ``(bands, norms)`` with ``bands`` an (K, n) integer array in
    lexicographic order and ``norms`` of shape ``(K, *batch)``.
    """
    family = family or build_windows(spec)
    coeffs = values_to_coefficients(spec, values, leading=leading)
    if check:
        check_band_resolved(family, coeffs)
    batch = values.shape[:leading]
    cell = spec.h ** spec.n
    axes = tuple(range(leading, leading + spec.n))
    ks, rows = [], []
    for k, vals in iter_bands(family, coeffs, leading=leading, skip_tol=BAND_SKIP_TOL if skip else 0.0):
        ks.append(k)
        rows.append(np.zeros(batch) if vals is None else lp_of_array(vals, p, cell, axes=axes))
    return np.array(ks, dtype=int), np.array(rows, dtype=float).reshape((len(ks),) + batch)


def band_weights(bands: np.ndarray, s: float) -> np.ndarray:
    return (1.0 + np.sum(bands.astype(float) ** 2, axis=1)) ** (s / 2.0)


def modulation_norm(f: Field, params: SpaceParams, family: WindowFamily | None = None, check: bool = True) -> float:
    """(sum_k <k>^{sq} ||box_k f||_p^q)^{1/q} over retained bands."""
    bands, norms = band_norm_table(f.spec, f.values, params.p, family, check=check)
    return float(weighted_lq(band_weights(bands, params.s), norms, params.q))


def modulation_norms(spec: GridSpec, frames: np.ndarray, params: SpaceParams, check: bool = True) -> np.ndarray:
    """modulation_norm of each frame in a stack ``(F, *shape)``."""
    bands, norms = band_norm_table(spec, frames, params.p, leading=1, check=check)
    return weighted_lq(band_weights(bands, params.s), norms, params.q)


def dyadic_norm_table(spec: GridSpec, values: np.ndarray, p: float, leading: int = 0, check: bool = True):
    if check:
        check_band_resolved(build_windows(spec), values_to_coefficients(spec, values, leading=leading))
    fam = build_dyadic(spec)
    coeffs = values_to_coefficients(spec, values, leading=leading)
    cell = spec.h ** spec.n
    axes = tuple(range(leading, leading + spec.n))
    return np.array([lp_of_array(v, p, cell, axes=axes) for _, v in iter_dyadic(fam, coeffs, leading)])


def besov_norm(f: Field, params: SpaceParams, check: bool = True) -> float:
    """(sum_j 2^{jsq} ||Delta_j f||_p^q)^{1/q} over retained dyadic blocks."""
    norms = dyadic_norm_table(f.spec, f.values, params.p, check=check)
    w = 2.0 ** (params.s * np.arange(norms.shape[0]))
    return float(weighted_lq(w, norms, params.q))


def sobolev_norm(f: Field, s: float) -> float:
    c = values_to_coefficients(f.spec, f.values)
    return float(np.sqrt(np.sum((f.spec.japanese() ** (2 * s)) * np.abs(c) ** 2)))


def _time_lr(weights: np.ndarray, g: np.ndarray, r: float, axis: int = -1):
    g = np.abs(g)
    if math.isinf(r):
        return np.max(g, axis=axis)
    peak = np.max(g, axis=axis, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    s = np.sum(weights * (g / safe) ** r, axis=axis)
    return np.squeeze(peak, axis=axis) * s ** (1.0 / r)


def _frames_for(traj: Trajectory, T: float | None):
    if len(traj) == 0:
        raise EmptyTrajectory("empty trajectory")
    if T is None:
        return traj.times, traj.u
    t0 = traj.times[0]
    keep = traj.times - t0 <= T * (1 + 1e-12)
    times = traj.times[keep]
    if abs((times[-1] - t0) - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"trajectory does not reach the horizon T={T}")
    return times, traj.u[keep]


def timespace_norm(traj: Trajectory, params: TimeSpaceParams, check: bool = True) -> float:
    """Mixed norm in either order; time integrals use the trapezoid rule."""
    times, frames = _frames_for(traj, params.T)
    w = trapezoid_weights(times)
    sp = params.space
    bands, norms = band_norm_table(traj.spec, frames, sp.p, leading=1, check=check)
    weights = band_weights(bands, sp.s)
    if params.order is Order.SEQUENCE_OUTSIDE:
        per_band = _time_lr(w, norms, params.r, axis=1)
        return float(weighted_lq(weights, per_band, sp.q))
    per_time = weighted_lq(weights, norms, sp.q)
    return float(_time_lr(w, per_time, params.r, axis=0))


def write_norm_report(path, rows) -> None:
    """rows: dicts with keys norm_kind, s, p, q, r, T, order, value."""
    cols = ["norm_kind", "s", "p", "q", "r", "T", "order", "value"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow(["" if row.get(c) is None else (repr(row[c]) if isinstance(row[c], float) else row[c]) for c in cols])
