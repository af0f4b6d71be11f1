import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cayley_ac import halfplane as hp

from conftest import spectral_params, upper_points


def test_fixed_point_closed_form_m3():
    z = hp.fixed_point(3, 2.0 + 0j)
    assert z == pytest.approx(-1 / 3 + 0.4714045207910317j, abs=1e-15)


@pytest.mark.parametrize("M", range(2, 7))
def test_fixed_point_on_circle_inside_band(M):
    e = np.linspace(-2 * math.sqrt(M), 2 * math.sqrt(M), 203)[1:-1]
    z = hp.fixed_point(M, e + 0j)
    assert np.all(z.imag > 0)
    np.testing.assert_allclose(np.abs(z), 1 / math.sqrt(M), atol=1e-12)


@given(spectral_params())
def test_fixed_point_is_fixed(args):
    M, lam = args
    z = hp.fixed_point(M, lam)
    assert z.imag > 0
    assert abs(hp.mobius_phi([z] * M, 0.0, lam) - z) <= 1e-12 * max(1.0, abs(z))


def test_fixed_point_rejects_bad_input():
    with pytest.raises(ValueError):
        hp.fixed_point(1, 0.5j)
    with pytest.raises(ValueError):
        hp.fixed_point(2, 0.1 - 0.1j)
    with pytest.raises(ValueError):
        hp.fixed_point(2, 2 * math.sqrt(2) + 0j)


def test_fixed_point_large_lambda_no_cancellation():
    z = hp.fixed_point(2, 1e8 + 1e-3j)
    assert z.imag > 0
    assert abs(z + 1e-8) < 1e-15


@given(st.lists(upper_points(), min_size=2, max_size=5), st.floats(-100, 100), spectral_params(M=2))
def test_phi_preserves_upper_half_plane(zs, q, args):
    _, lam = args
    assert hp.mobius_phi(zs, q, lam).imag > 0


def test_phi_against_extended_precision():
    import mpmath

    zs, q, lam = (1j, 1 + 1j, -1 + 2j), 0.5, 1 + 0.1j
    got = hp.mobius_phi(list(zs), q, lam)
    mpmath.mp.dps = 40
    ref = -1 / (sum(mpmath.mpc(z) for z in zs) + mpmath.mpc(lam) - q)
    assert got.imag > 0
    assert abs(got - complex(ref)) <= 1e-15


def test_cosh_dist_examples():
    assert hp.cosh_dist(1j, 2j) == pytest.approx(0.5, abs=1e-15)
    assert hp.cosh_dist(1j, 1j) == 0.0


@given(upper_points(), upper_points())
def test_hyperbolic_distance_matches_arccosh(s, z):
    c = hp.cosh_dist(s, z)
    d = hp.hyperbolic_distance(s, z)
    assert d >= 0
    # cosh(d) = 1 + c/2
    assert math.cosh(d) == pytest.approx(1 + c / 2, rel=1e-9)


@given(upper_points(), upper_points(), upper_points())
def test_hyperbolic_triangle_inequality(a, b, c):
    d = hp.hyperbolic_distance
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-9 * (1 + d(a, b) + d(b, c))


def test_weight_examples_at_real_lambda():
    # M=2, lam=0: z_lam = i/sqrt(2)
    assert hp.weight(1j * math.sqrt(2), 2, 0j) == pytest.approx(0.5, rel=1e-14)
    assert hp.weight(1 + 1j / math.sqrt(2), 2, 0j) == pytest.approx(2.0, rel=1e-14)
    zl = hp.fixed_point(2, 0j)
    assert zl == pytest.approx(1j / math.sqrt(2), abs=1e-15)
    assert hp.weight(zl, 2, 0j) == 0.0


def test_chi_examples_and_singularity():
    assert hp.chi(1j * math.sqrt(2), 2, 0j) == pytest.approx(2.0, rel=1e-14)
    assert hp.chi(1 + 1j / math.sqrt(2), 2, 0j) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(ValueError):
        hp.chi(hp.fixed_point(2, 0j), 2, 0j)


@given(upper_points(), spectral_params(M=3))
def test_weight_chi_reciprocal(z, args):
    M, lam = args
    zl = hp.fixed_point(M, lam)
    if abs(z - zl) < 1e-9:
        return
    assert hp.weight(z, M, lam) * hp.chi(z, M, lam) == pytest.approx(1.0, rel=1e-12)


def test_abs_bound_example():
    lhs, rhs = hp.abs_from_weight_bound(10j, 1j)
    assert lhs == pytest.approx(10.0)
    assert rhs == pytest.approx(34.4, rel=1e-14)


@given(upper_points(1e-6, 1e6, 1e4), upper_points(1e-6, 1e6, 1e4))
def test_abs_bound_property(z, s):
    lhs, rhs = hp.abs_from_weight_bound(z, s)
    assert lhs <= rhs * (1 + 1e-12)


def test_point_types_validate():
    with pytest.raises(ValueError):
        hp.UpperHalfPoint(0.0, 0.0)
    with pytest.raises(ValueError):
        hp.UpperHalfPoint(math.nan, 1.0)
    with pytest.raises(ValueError):
        hp.SpectralParameter(0.0, -1e-3)
    p = hp.UpperHalfPoint.from_complex(1 + 2j)
    assert complex(p) == 1 + 2j
    lam = hp.SpectralParameter(1.0, 0.01)
    assert lam.in_strip(2.0, 0.1)
    assert not lam.in_strip(0.5, 0.1)
