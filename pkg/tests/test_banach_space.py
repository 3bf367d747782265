import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sghybrid import (ConfigError, DimensionError, SpaceSpec, duality_gap, duality_map,
                      estimate_g, hilbert_modulus, modulus_for, norm, pairing, xu_gap)
from sghybrid.banach_space import _pnorm, sample_xu_triples

P_VALUES = [1.5, 2.0, 3.0, 4.0]
coords = st.floats(-1e3, 1e3, allow_nan=False)


def vectors(n):
    return arrays(np.float64, n, elements=coords)


# -- SpaceSpec -----------------------------------------------------------------

def test_space_rejects_bad_parameters():
    for bad in [dict(n=0), dict(n=2, p=1.0), dict(n=2, p=math.inf), dict(n=2.5)]:
        with pytest.raises(ConfigError):
            SpaceSpec(**bad)


def test_space_flags_and_conjugate_exponent():
    s = SpaceSpec(3, 4.0)
    assert s.opial and s.uniformly_convex
    assert s.q == pytest.approx(4 / 3)
    assert SpaceSpec.from_dict(s.to_dict()) == s


def test_vector_shape_checked():
    s = SpaceSpec(2)
    with pytest.raises(DimensionError):
        s.vector([1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        s.vector([1.0, np.nan])


# -- norm ----------------------------------------------------------------------

def test_norm_examples():
    assert norm(SpaceSpec(3), [0, 0, 0]) == 0.0
    assert norm(SpaceSpec(2), [3, 4]) == 5.0
    assert norm(SpaceSpec(2, 4.0), [1, 1]) == pytest.approx(2 ** 0.25, rel=1e-15)


def test_norm_does_not_overflow():
    assert norm(SpaceSpec(2, 4.0), [1e200, 0]) == pytest.approx(1e200)


@settings(max_examples=200, deadline=None)
@given(x=vectors(3), y=vectors(3), c=coords, p=st.sampled_from(P_VALUES))
def test_norm_triangle_and_homogeneity(x, y, c, p):
    s = SpaceSpec(3, p)
    assert norm(s, x + y) <= norm(s, x) + norm(s, y) + 1e-12 * (1 + norm(s, x) + norm(s, y))
    assert norm(s, c * x) == pytest.approx(abs(c) * norm(s, x), rel=1e-12, abs=1e-300)


# -- duality map ---------------------------------------------------------------

def test_duality_map_examples():
    np.testing.assert_array_equal(duality_map(SpaceSpec(2), [2, -1]), [2, -1])
    np.testing.assert_array_equal(duality_map(SpaceSpec(2, 3.0), [0, 0]), [0, 0])
    x = np.array([1.0, 1.0])
    Jx = duality_map(SpaceSpec(2, 4.0), x)
    np.testing.assert_allclose(Jx, [2 ** -0.5, 2 ** -0.5], rtol=1e-15)
    assert pairing(x, Jx) == pytest.approx(2 ** 0.5, rel=1e-15)


@settings(max_examples=300, deadline=None)
@given(x=vectors(4), p=st.sampled_from(P_VALUES), c=st.floats(1e-3, 1e3))
def test_duality_map_identities(x, p, c):
    s = SpaceSpec(4, p)
    nx = norm(s, x)
    Jx = duality_map(s, x)
    assert abs(pairing(x, Jx) - nx ** 2) <= 1e-10 * (1 + nx ** 2)
    assert abs(_pnorm(Jx, s.q) - nx) <= 1e-10 * (1 + nx)
    np.testing.assert_allclose(duality_map(s, c * x), c * Jx, rtol=1e-10, atol=1e-10)


# -- duality gap ---------------------------------------------------------------

def test_duality_gap_examples():
    s = SpaceSpec(2)
    assert duality_gap(s, [1, 2], [1, 2]) == 0.0
    assert duality_gap(s, [1, 0], [0, 0]) == 1.0


def test_duality_gap_random_pairs_p3():
    s = SpaceSpec(3, 3.0)
    rng = np.random.default_rng(11)
    x, y = rng.standard_normal((2, 10_000, 3)) * 5
    gap = duality_gap(s, x, y)
    assert np.all(gap >= -1e-10 * (1 + norm(s, x) ** 2 + norm(s, y) ** 2))


@settings(max_examples=300, deadline=None)
@given(x=vectors(3), y=vectors(3), p=st.sampled_from(P_VALUES))
def test_duality_gap_nonnegative(x, y, p):
    s = SpaceSpec(3, p)
    assert duality_gap(s, x, y) >= -1e-10 * (1 + norm(s, x) ** 2 + norm(s, y) ** 2)


# -- convexity gap and the fitted modulus ---------------------------------------

@settings(max_examples=200, deadline=None)
@given(x=vectors(3), y=vectors(3), t=st.floats(0, 1))
def test_xu_gap_hilbert_identity(x, y, t):
    # bounded inputs keep the absolute tolerance meaningful
    s = SpaceSpec(3)
    x, y = x / 1e3, y / 1e3
    assert abs(xu_gap(s, x, y, t, hilbert_modulus)) <= 1e-12


@pytest.mark.parametrize("t", [0.0, 1.0])
def test_xu_gap_endpoints(t):
    s = SpaceSpec(2, 3.0)
    g = lambda r: 7.0 * r ** 2  # any modulus: its term vanishes at the endpoints
    assert xu_gap(s, [0.3, -0.1], [-0.5, 0.2], t, g) == 0.0


def test_xu_gap_rejects_t_outside_unit_interval():
    with pytest.raises(ValueError):
        xu_gap(SpaceSpec(2), [0, 0], [1, 1], 1.5, hilbert_modulus)


def test_fitted_modulus_p3_on_fresh_samples():
    s = SpaceSpec(3, 3.0)
    g = estimate_g(s, 1.0, seed=1)
    x, y, t = sample_xu_triples(s, 1.0, 10_000, seed=2)
    assert np.min(xu_gap(s, x, y, t, g)) >= -1e-9


def test_fitted_modulus_p2_close_to_square():
    g = estimate_g(SpaceSpec(2), 1.0, seed=0)
    assert g(0.0) == 0.0
    # the first few geometric nodes sit below the sampling resolution; see README
    sel = g.nodes >= 0.01
    rel = np.abs(g.values[sel] - g.nodes[sel] ** 2) / g.nodes[sel] ** 2
    assert rel.max() <= 0.05


def test_fitted_modulus_p4_shape():
    g = estimate_g(SpaceSpec(2, 4.0), 1.0, seed=0)
    assert g(0.0) == 0.0
    assert g.is_nondecreasing() and g.is_convex()
    assert g(2.0) > 0


def test_modulus_for_hilbert_is_exact():
    assert modulus_for(SpaceSpec(2), 1.0) is hilbert_modulus


@pytest.mark.parametrize("kw", [dict(r=0), dict(samples=0), dict(nodes=1), dict(safety=1.5)])
def test_estimate_g_rejects_bad_arguments(kw):
    with pytest.raises(ConfigError):
        estimate_g(SpaceSpec(2, 3.0), **kw)
