import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modkg.errors import EmptyTrajectory, InvalidExponent, SpectralLeakage
from modkg.grid import Field, GridSpec, lp_norm
from modkg.norms import (
    Order,
    SpaceParams,
    TimeSpaceParams,
    besov_norm,
    modulation_norm,
    sobolev_norm,
    timespace_norm,
    weighted_lq,
)
from modkg.trajectory import Trajectory

from conftest import band_limited, gaussian

SPEC = GridSpec(1, 64.0, 256)


def test_m22_matches_l2_norm(rng):
    # sum_k phi_k^2 != 1, but M^0_{2,2} is equivalent to L2; check the equivalence band.
    f = band_limited(SPEC, rng)
    m = modulation_norm(f, SpaceParams(0, 2, 2))
    l2 = lp_norm(f, 2)
    assert 0.5 * l2 <= m <= l2 * (1 + 1e-12)


def test_plane_wave_modulation_norm_exact():
    j = 20
    f = Field.plane_wave(SPEC, [j])
    from modkg.decomposition import unit_window

    xi = j * SPEC.dxi
    ks = np.arange(-SPEC.kmax, SPEC.kmax + 1)
    w = unit_window(xi - ks)
    for s, p, q in [(0, 2, 2), (1, 4, 1), (0.5, math.inf, 3)]:
        bandp = w * (SPEC.volume ** (1 / p) if not math.isinf(p) else 1.0)
        expect = np.sum(((1 + ks ** 2.0) ** (s / 2) * bandp) ** q) ** (1 / q)
        assert modulation_norm(f, SpaceParams(s, p, q)) == pytest.approx(expect, rel=1e-12)


def test_q_and_s_monotonicity(rng):
    f = band_limited(SPEC, rng)
    base = modulation_norm(f, SpaceParams(0.5, 3, 1))
    assert modulation_norm(f, SpaceParams(0.5, 3, 2)) <= base * (1 + 1e-12)
    assert modulation_norm(f, SpaceParams(0.0, 3, 1)) <= base * (1 + 1e-12)


def test_norm_guards():
    with pytest.raises(InvalidExponent):
        SpaceParams(0, 0.5, 2)
    with pytest.raises(InvalidExponent):
        TimeSpaceParams(SpaceParams(), r=0.5)
    with pytest.raises(SpectralLeakage):
        modulation_norm(Field.plane_wave(SPEC, [SPEC.N // 2 - 1]), SpaceParams())


def test_sobolev_of_gaussian():
    spec = GridSpec(1, 64.0, 512)
    f = gaussian(spec, width=1.0)
    # ||f||_{H^0} = ||f||_2 = pi^{1/4}
    assert sobolev_norm(f, 0) == pytest.approx(math.pi ** 0.25, rel=1e-12)
    assert sobolev_norm(f, 1) > sobolev_norm(f, 0)


def test_besov_and_modulation_positive_and_homogeneous(rng):
    f = band_limited(SPEC, rng)
    for fn in (besov_norm, modulation_norm):
        a = fn(f, SpaceParams(0.3, 4, 2))
        assert a > 0
        assert fn(f * 3.0, SpaceParams(0.3, 4, 2)) == pytest.approx(3 * a, rel=1e-12)


def test_timespace_orders_minkowski(rng):
    times = np.linspace(0, 1, 9)
    frames = [band_limited(SPEC, rng) for _ in times]
    traj = Trajectory.from_fields(times, frames)
    sp = SpaceParams(0.2, 4, 2)
    for r in (2, 4):
        seq = timespace_norm(traj, TimeSpaceParams(sp, r=r, order=Order.SEQUENCE_OUTSIDE))
        tim = timespace_norm(traj, TimeSpaceParams(sp, r=r, order=Order.TIME_OUTSIDE))
        # r >= q: Minkowski gives ||.||_{L^r l^q} <= ||.||_{l^q L^r}
        assert tim <= seq * (1 + 1e-12)


def test_timespace_stationary_scales_with_horizon():
    f = gaussian(SPEC)
    traj = Trajectory.stationary(f, np.linspace(0, 2, 5))
    sp = SpaceParams(0, 2, 2)
    m = modulation_norm(f, sp)
    v = timespace_norm(traj, TimeSpaceParams(sp, r=2, T=2.0, order=Order.TIME_OUTSIDE))
    assert v == pytest.approx(m * math.sqrt(2.0), rel=1e-12)
    with pytest.raises(ValueError):
        timespace_norm(traj, TimeSpaceParams(sp, T=3.0))
    with pytest.raises(EmptyTrajectory):
        Trajectory(SPEC, np.array([]), np.zeros((0, SPEC.N)))


@settings(max_examples=30, deadline=None)
@given(
    vals=st.lists(st.floats(0, 1e3), min_size=1, max_size=12),
    q1=st.floats(1, 8),
    dq=st.floats(0, 8),
)
def test_weighted_lq_monotone_in_q(vals, q1, dq):
    v = np.array(vals)
    w = np.ones_like(v)
    a = weighted_lq(w, v, q1)
    b = weighted_lq(w, v, q1 + dq)
    assert b <= a * (1 + 1e-12) + 1e-300
    assert weighted_lq(w, v, math.inf) <= b * (1 + 1e-12) + 1e-300
