"""NLKG / NLKG-Hartree solvers on the periodic grid.

Two independent routes:

* ``duhamel_picard`` iterates the integral form
  ``u(t) = K'(t)u0 + K(t)u1 + int_0^t K(t - s) F(u(s)) ds`` over the whole
  time grid, with the trapezoid rule for the retarded integral.
* ``reference_integrator`` advances ``(u, u_t)`` with a Lawson RK4 scheme
  that treats the linear Klein-Gordon flow exactly.

The equation is ``u_tt + (I - Laplacian) u = F(u)`` with ``F = sign |u|^k u``
for the power model (``sign = -1`` defocusing) or ``F = -(|x|^-mu * |u|^2) u``
for the Hartree model. State is held as centered spectral coefficients.
Nonlinear terms are evaluated on a zero-padded grid and projected back onto
the retained frequencies ``|xi|_inf <= kmax``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decomposition import build_windows, check_band_resolved
from .errors import NoConvergence, SpectralLeakage
from .grid import Field, GridSpec, coefficients_to_values, values_to_coefficients
from .norms import SpaceParams, TimeSpaceParams, modulation_norms, timespace_norm
from .operators import PropagatorCache, power_values, riesz_symbol
from .trajectory import Trajectory


@dataclass(frozen=True)
class Power:
    k: float
    sign: int = -1

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("power must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def degree(self) -> int:
        return math.ceil(self.k + 1)

    @property
    def focusing(self) -> bool:
        return self.sign > 0


@dataclass(frozen=True)
class Hartree:
    mu: float
    modulus: bool = True
    degree: int = 3



@dataclass(frozen=True, eq=False)
class CauchyData:
    u0: Field
    u1: Field

    def __post_init__(self):
        if self.u0.spec != self.u1.spec:
            raise ValueError("u0 and u1 live on different grids")

    @property
    def spec(self) -> GridSpec:
        return self.u0.spec


@dataclass(frozen=True)
class SolverConfig:
    T: float
    M: int
    nonlinearity: Power | Hartree | None = None
    eps: float = 1e-8
    max_sweeps: int = 50
    diagnostic: SpaceParams | TimeSpaceParams | None = None  # None: max-frame L2
    leakage_tol: float = 1e-4

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if self.M < 2:
            raise ValueError("need at least M = 2 time steps")
        if not self.eps > 0:
            raise ValueError("Picard tolerance must be positive")

    @property
    def tau(self) -> float:
        return self.T / self.M

    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.M + 1)


class _Padded:
    """Minimal grid descriptor for the dealiasing grid (N need not be 2^m)."""

    def __init__(self, spec: GridSpec, N: int):
        self.n, self.L, self.N = spec.n, spec.L, N
        self.shape = (N,) * spec.n
        self.h = spec.L / N


def padded_size(spec: GridSpec, degree: int) -> int:
    """Smallest even size whose Nyquist keeps degree-``degree`` products alias-free
    on the retained box ``|xi|_inf <= kmax``."""
    K = spec.kmax + 1
    need = (degree + 1) * K / 2.0
    Np = math.ceil(need * spec.L / math.pi)
    Np += Np % 2
    return max(spec.N, Np)


class NonlinearTerm:
    """Evaluates the projected nonlinearity on centered coefficients."""

    def __init__(self, spec: GridSpec, model: Power | Hartree | None, leakage_tol: float = 1e-4):
        self.spec = spec
        self.model = model
        self.tol = leakage_tol
        self.mask = build_windows(spec).resolved_mask()
        degree = model.degree if model is not None else 1
        self.Np = padded_size(spec, degree)
        self.fine = _Padded(spec, self.Np)
        self.offset = (self.Np - spec.N) // 2
        self.inner = tuple(slice(self.offset, self.offset + spec.N) for _ in range(spec.n))
        if isinstance(model, Hartree):
            ax = spec.dxi * np.arange(-self.Np // 2, self.Np // 2)
            r2 = sum(np.meshgrid(*([ax ** 2] * spec.n), indexing="ij"))
            self.kernel = riesz_symbol(np.sqrt(r2), spec.n - model.mu, spec.n)
        self.last_leakage = 0.0

    def to_fine(self, c: np.ndarray) -> np.ndarray:
        big = np.zeros(self.fine.shape, dtype=complex)
        big[self.inner] = c
        return coefficients_to_values(self.fine, big)

    def from_fine(self, v: np.ndarray) -> np.ndarray:
        return values_to_coefficients(self.fine, v)

    def pointwise(self, u: np.ndarray) -> np.ndarray:
        """F(u) on physical samples of the padded grid."""
        m = self.model
        if isinstance(m, Power):
            return power_values(u, m.k, m.sign)
        dens = np.abs(u) ** 2 if m.modulus else u * u
        pot = coefficients_to_values(self.fine, values_to_coefficients(self.fine, dens) * self.kernel)
        return -pot * u

    def __call__(self, c: np.ndarray) -> np.ndarray:
        if self.model is None:
            return np.zeros_like(c)
        big = self.from_fine(self.pointwise(self.to_fine(c)))
        out = big[self.inner]
        total = float(np.sum(np.abs(big) ** 2))
        kept = float(np.sum(np.abs(out[self.mask]) ** 2))
        lk = math.sqrt(max(total - kept, 0.0) / total) if total > 0 else 0.0
        self.last_leakage = max(self.last_leakage, lk)
        if lk > self.tol:
            raise SpectralLeakage(f"nonlinear term leaks {lk:.3e} outside retained bands", lk)
        return np.where(self.mask, out, 0.0)

    def potential_energy(self, c: np.ndarray) -> float:
        """-sign/(k+2) * int |u|^{k+2} on the padded grid (power model only)."""
        m = self.model
        if not isinstance(m, Power):
            return 0.0
        u = self.to_fine(c)
        integral = float(np.sum(np.abs(u) ** (m.k + 2))) * self.fine.h ** self.spec.n
        return -m.sign / (m.k + 2) * integral


def _coeffs(f: Field) -> np.ndarray:
    return values_to_coefficients(f.spec, f.values)


def _check_data(data: CauchyData) -> tuple[np.ndarray, np.ndarray]:
    fam = build_windows(data.spec)
    c0, c1 = _coeffs(data.u0), _coeffs(data.u1)
    check_band_resolved(fam, c0)
    check_band_resolved(fam, c1)
    return c0, c1


def energy(u: Field, ut: Field, k: float, sign: int = -1, oversample: int | None = None) -> float:
    """1/2 ||u_t||^2 + 1/2 (||u||^2 + ||grad u||^2) - sign/(k+2) ||u||_{k+2}^{k+2}.

    ``sign`` is the sign of the right-hand side ``sign |u|^k u``; the potential
    is integrated on a zero-padded grid of size ``oversample`` when given.
    """
    spec = u.spec
    c, ct = _coeffs(u), _coeffs(ut)
    kin = 0.5 * float(np.sum(np.abs(ct) ** 2))
    grad = 0.5 * float(np.sum(spec.japanese() ** 2 * np.abs(c) ** 2))
    if oversample is None or oversample == spec.N:
        vals, h = u.values, spec.h
    else:
        fine = _Padded(spec, oversample)
        big = np.zeros(fine.shape, dtype=complex)
        off = (oversample - spec.N) // 2
        big[tuple(slice(off, off + spec.N) for _ in range(spec.n))] = c
        vals, h = coefficients_to_values(fine, big), fine.h
    pot = float(np.sum(np.abs(vals) ** (k + 2))) * h ** spec.n
    return kin + grad - sign / (k + 2) * pot


def _energy_coeffs(spec: GridSpec, nl: NonlinearTerm, c: np.ndarray, ct: np.ndarray) -> float:
    kin = 0.5 * float(np.sum(np.abs(ct) ** 2))
    grad = 0.5 * float(np.sum(spec.japanese() ** 2 * np.abs(c) ** 2))
    return kin + grad + nl.potential_energy(c)


def _duhamel_map(spec, cache: PropagatorCache, nl: NonlinearTerm, c0, c1, frames: np.ndarray):
    """Phi(u) on every frame plus its time derivative (centered coefficients)."""
    M = cache.M
    w = cache.w
    tau = cache.tau
    out = np.empty_like(frames)
    out_t = np.empty_like(frames)
    A = np.zeros(spec.shape, dtype=complex)
    B = np.zeros(spec.shape, dtype=complex)
    prev_c = prev_s = None
    for m in range(M + 1):
        cm, sm = cache.cos(m), cache.sin(m)
        F = nl(frames[m])
        gc, gs = cm * F, sm * F
        if m > 0:
            A += 0.5 * tau * (prev_c + gc)
            B += 0.5 * tau * (prev_s + gs)
        prev_c, prev_s = gc, gs
        out[m] = cm * c0 + sm / w * c1 + (sm * A - cm * B) / w
        out_t[m] = -w * sm * c0 + cm * c1 + (cm * A + sm * B)
    return out, out_t


def _free_flow(cache: PropagatorCache, c0, c1):
    frames = np.empty((cache.M + 1,) + c0.shape, dtype=complex)
    for m in range(cache.M + 1):
        frames[m] = cache.cos(m) * c0 + cache.sin(m) / cache.w * c1
    return frames


class _Diagnostic:
    def __init__(self, spec: GridSpec, times: np.ndarray, choice):
        self.spec, self.times, self.choice = spec, times, choice

    def __call__(self, frames: np.ndarray) -> float:
        if self.choice is None:
            return float(np.max(np.sqrt(np.sum(np.abs(frames) ** 2, axis=tuple(range(1, frames.ndim))))))
        vals = coefficients_to_values(self.spec, frames, leading=1)
        if isinstance(self.choice, SpaceParams):
            return float(np.max(modulation_norms(self.spec, vals, self.choice, check=False)))
        return timespace_norm(Trajectory(self.spec, self.times, vals), self.choice, check=False)


def _trajectory(spec, times, frames, frames_t, diagnostics) -> Trajectory:
    return Trajectory(
        spec,
        times,
        coefficients_to_values(spec, frames, leading=1),
        coefficients_to_values(spec, frames_t, leading=1),
        diagnostics,
    )


def duhamel_picard(data: CauchyData, cfg: SolverConfig) -> Trajectory:
    """Contraction iteration on the integral form, starting from the free flow."""
    spec = data.spec
    c0, c1 = _check_data(data)
    cache = PropagatorCache.build(spec, cfg.tau, cfg.M)
    nl = NonlinearTerm(spec, cfg.nonlinearity, cfg.leakage_tol)
    diag = _Diagnostic(spec, cfg.times(), cfg.diagnostic)
    frames = _free_flow(cache, c0, c1)
    # The free flow is Phi(0), so the sweep-1 ratio compares against ||u^0 - 0||.
    diffs, changes, ratios = [diag(frames)], [], []
    frames_t = None
    for sweep in range(1, cfg.max_sweeps + 1):
        try:
            new, new_t = _duhamel_map(spec, cache, nl, c0, c1, frames)
        except SpectralLeakage as exc:
            if ratios and ratios[-1] >= 1:
                raise NoConvergence(
                    f"iteration diverging (ratio {ratios[-1]:.3g}) and leaking spectrum", ratios, changes
                ) from exc
            raise
        if not np.all(np.isfinite(new)):
            raise NoConvergence("iterate became non-finite", ratios, changes)
        d = diag(new - frames)
        size = diag(new)
        ratios.append(d / diffs[-1] if diffs[-1] > 0 else 0.0)
        diffs.append(d)
        changes.append(d / size if size > 0 else 0.0)
        frames, frames_t = new, new_t
        if changes[-1] < cfg.eps:
            break
        if size > 1e150 or (len(ratios) >= 3 and min(ratios[-3:]) >= 1):
            raise NoConvergence(f"contraction ratio {ratios[-1]:.3g} >= 1", ratios, changes)
    else:
        raise NoConvergence(
            f"no convergence after {cfg.max_sweeps} sweeps (last change {changes[-1]:.3e})", ratios, changes
        )
    energies = _energy_series(spec, nl, cfg, frames, frames_t)
    diagnostics = {
        "method": "picard",
        "sweeps": len(changes),
        "changes": changes,
        "contraction_ratios": ratios,
        "energy": energies,
        "leakage": nl.last_leakage,
        "padded_N": nl.Np,
    }
    return _trajectory(spec, cfg.times(), frames, frames_t, diagnostics)


def _energy_series(spec, nl, cfg, frames, frames_t):
    if cfg.nonlinearity is not None and not isinstance(cfg.nonlinearity, Power):
        return []
    return [_energy_coeffs(spec, nl, frames[m], frames_t[m]) for m in range(frames.shape[0])]


def reference_integrator(data: CauchyData, cfg: SolverConfig) -> Trajectory:
    """Lawson RK4: exact Klein-Gordon rotation composed with classical RK4 stages."""
    spec = data.spec
    c0, c1 = _check_data(data)
    nl = NonlinearTerm(spec, cfg.nonlinearity, cfg.leakage_tol)
    w = spec.japanese()
    h = cfg.tau

    def rotation(dt):
        c, s = np.cos(dt * w), np.sin(dt * w)
        return c, s

    full, half = rotation(h), rotation(h / 2)

    def flow(rot, u, v):
        c, s = rot
        return c * u + s / w * v, -w * s * u + c * v

    frames = np.empty((cfg.M + 1,) + spec.shape, dtype=complex)
    frames_t = np.empty_like(frames)
    u, v = c0.copy(), c1.copy()
    frames[0], frames_t[0] = u, v
    for m in range(1, cfg.M + 1):
        # G(u, v) = (0, F(u)), so each stage only needs its u component.
        k1 = nl(u)
        au, _ = flow(half, u, v + 0.5 * h * k1)
        k2 = nl(au)
        bu, _ = flow(half, u, v)
        k3 = nl(bu)
        e3u, _ = flow(half, np.zeros_like(u), k3)
        fu, fv = flow(full, u, v)
        k4 = nl(fu + h * e3u)
        e1u, e1v = flow(full, np.zeros_like(u), k1)
        e23u, e23v = flow(half, np.zeros_like(u), k2 + k3)
        u = fu + h / 6 * (e1u + 2 * e23u)
        v = fv + h / 6 * (e1v + 2 * e23v + k4)
        frames[m], frames_t[m] = u, v
    diagnostics = {
        "method": "lawson_rk4",
        "energy": _energy_series(spec, nl, cfg, frames, frames_t),
        "leakage": nl.last_leakage,
        "padded_N": nl.Np,
    }
    return _trajectory(spec, cfg.times(), frames, frames_t, diagnostics)


def residual(traj: Trajectory, data: CauchyData, cfg: SolverConfig) -> float:
    """Max over frames of ||u_m - Phi(u)_m||_2, relative to max_m ||u_m||_2."""
    spec = data.spec
    c0, c1 = _coeffs(data.u0), _coeffs(data.u1)
    cache = PropagatorCache.build(spec, cfg.tau, cfg.M)
    nl = NonlinearTerm(spec, cfg.nonlinearity, cfg.leakage_tol)
    frames = values_to_coefficients(spec, traj.u, leading=1)
    mapped, _ = _duhamel_map(spec, cache, nl, c0, c1, frames)
    axes = tuple(range(1, frames.ndim))
    defect = np.sqrt(np.sum(np.abs(frames - mapped) ** 2, axis=axes))
    scale = np.max(np.sqrt(np.sum(np.abs(frames) ** 2, axis=axes)))
    return float(np.max(defect) / scale) if scale > 0 else float(np.max(defect))


def max_relative_distance(a: Trajectory, b: Trajectory) -> float:
    """max over frames of ||a_m - b_m||_2 / ||b_m||_2."""
    axes = tuple(range(1, a.u.ndim))
    num = np.sqrt(np.sum(np.abs(a.u - b.u) ** 2, axis=axes))
    den = np.sqrt(np.sum(np.abs(b.u) ** 2, axis=axes))
    return float(np.max(num / np.where(den > 0, den, 1.0)))


def energy_drift(traj: Trajectory) -> float:
    e = traj.diagnostics.get("energy") or []
    if len(e) < 2 or e[0] == 0:
        return 0.0
    return abs(e[-1] - e[0]) / abs(e[0])
