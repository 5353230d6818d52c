import math

import numpy as np
import pytest

from modkg.errors import AlphaOutOfRange
from modkg.grid import Field, GridSpec
from modkg.operators import (
    PropagatorCache,
    bessel_potential,
    hartree_nonlinearity,
    kg_cosine,
    kg_sine,
    power_nonlinearity,
    riesz_constant,
    riesz_potential,
)

from conftest import band_limited, gaussian
from oracles import gaussian_riesz_3d, riesz_quadrature


def test_bessel_potential_group_and_plane_wave(rng):
    spec = GridSpec(1, 64.0, 256)
    f = band_limited(spec, rng)
    a = bessel_potential(bessel_potential(f, 0.7), -0.7)
    assert np.max(np.abs(a.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))
    pw = Field.plane_wave(spec, [10])
    xi = 10 * spec.dxi
    assert np.allclose(bessel_potential(pw, 2).values, (1 + xi * xi) * pw.values)


def test_propagators_on_plane_wave():
    spec = GridSpec(2, 52.0, 64)
    pw = Field.plane_wave(spec, [3, -2])
    w = math.sqrt(1 + (13 * spec.dxi ** 2))
    t = 1.7
    assert np.allclose(kg_cosine(pw, t).values, math.cos(t * w) * pw.values, atol=1e-13)
    assert np.allclose(kg_sine(pw, t).values, math.sin(t * w) / w * pw.values, atol=1e-13)


def test_propagator_cache_rows_are_direct():
    spec = GridSpec(1, 64.0, 128)
    c = PropagatorCache.build(spec, 0.1, 50)
    w = spec.japanese()
    assert np.array_equal(c.cos(37), np.cos((37 * 0.1) * w))
    assert np.array_equal(c.sine_kernel(5), np.sin((5 * 0.1) * w) / w)


def test_riesz_constant_known_value():
    # n = 3, alpha = 2: FT of 1/|x| is 4 pi / |xi|^2.
    assert riesz_constant(2.0, 3) == pytest.approx(4 * math.pi)
    with pytest.raises(AlphaOutOfRange):
        riesz_potential(Field.zeros(GridSpec(1, 64.0, 64)), 1.0)


def test_riesz_eigenfunction():
    spec = GridSpec(1, 64.0, 256)
    pw = Field.plane_wave(spec, [7])
    out = riesz_potential(pw, 0.5)
    expect = riesz_constant(0.5, 1) * (7 * spec.dxi) ** -0.5
    assert np.allclose(out.values, expect * pw.values, atol=1e-12)
    const = riesz_potential(Field(spec, np.ones(spec.shape)), 0.5)
    assert np.max(np.abs(const.values)) < 1e-13  # zero mode projected out


@pytest.mark.parametrize("alpha", [0.3, 0.5])
def test_riesz_1d_matches_hurwitz_green_function(alpha):
    L = 32.0
    spec = GridSpec(1, L, 512)
    sig = 1.0
    fn = lambda y: math.exp(-y * y / (2 * sig * sig))  # noqa: E731
    f = Field.from_function(spec, lambda x: np.exp(-x * x / (2 * sig * sig)))
    num = riesz_potential(f, alpha).values.real
    x = spec.x_axis()
    for i in (spec.N // 2, spec.N // 2 + 20, spec.N // 2 - 45, spec.N // 2 + 100):
        ref = riesz_quadrature(fn, x[i], alpha, L)
        assert abs(num[i] - ref) <= 1e-4 * max(1.0, abs(ref))


def test_hartree_matches_closed_form_convolution_on_probe():
    spec = GridSpec(3, 52.0, 64)
    width2 = 13.0  # |u|^2 = 0.01 exp(-|x|^2 / 13)
    u = gaussian(spec, amp=0.1, width=math.sqrt(width2))  # exp(-|x|^2 / 26)
    mu = 1.5
    pot = (hartree_nonlinearity(u, mu).values / u.values).real
    c = spec.N // 2
    probe = (slice(c - 4, c + 4),) * 3
    r2 = sum(x[probe] ** 2 for x in spec.x_mesh())
    exact = 0.01 * gaussian_riesz_3d(r2, mu, width2)
    diff = pot[probe] - exact
    offset = diff.mean()  # zero-mode projection and periodic images shift by a constant
    assert np.max(np.abs(diff - offset)) <= 1e-3 * np.max(np.abs(exact))


def test_power_nonlinearity_values():
    spec = GridSpec(1, 16.0, 16)
    v = np.linspace(-2, 2, 16) + 0.5j
    out = power_nonlinearity(Field(spec, v), 2.5, sign=-1).values
    assert np.allclose(out, -np.abs(v) ** 2.5 * v)
    with pytest.raises(ValueError):
        power_nonlinearity(Field(spec, v), 0.0)
    with pytest.raises(ValueError):
        power_nonlinearity(Field(spec, v), 1.0, sign=2)
