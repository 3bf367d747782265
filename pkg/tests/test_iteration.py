import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sghybrid import (Ball, ConfigError, Identity, MetricProjection, Negation, Schedule,
                      SpaceSpec, WholeSpace, fejer_check, hilbert_modulus, ishikawa_step,
                      iterate, mann_step, residual_decay_check, validate_schedule, zoo_entry)
from sghybrid.mappings import metric_projection

R1, R2 = SpaceSpec(1), SpaceSpec(2)
NEG = Negation(WholeSpace(R1), [[0.0]])
ID2 = Identity(WholeSpace(R2), [[0.0, 0.0]])
PROJ = MetricProjection(WholeSpace(R2), Ball(R2, 1.0), [[0.6, 0.8]])


# -- single steps ----------------------------------------------------------------

def test_mann_step_examples():
    T = zoo_entry("affine-contraction").mapping
    x = np.array([3.0, -1.0])
    np.testing.assert_array_equal(mann_step(T, x, 1.0), x)
    np.testing.assert_array_equal(mann_step(T, x, 0.0), T(x))
    assert mann_step(NEG, [1.0], 0.5)[0] == 0.0


def test_ishikawa_step_examples():
    y, x1 = ishikawa_step(NEG, [1.0], 0.5, 0.5)
    assert y[0] == 0.0 and x1[0] == 0.5
    y, x1 = ishikawa_step(ID2, [1.0, 2.0], 0.3, 0.7)
    np.testing.assert_array_equal(y, [1.0, 2.0])
    np.testing.assert_array_equal(x1, [1.0, 2.0])


def test_ishikawa_step_rejects_bad_weights():
    with pytest.raises(ValueError):
        ishikawa_step(NEG, [1.0], 1.5, 0.5)


pt = arrays(np.float64, 2, elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=200, deadline=None)
# dyadic weights make 1 - (1 - g) == g, so the comparison can be exact
@given(x=pt, g=st.integers(1, 1024).map(lambda k: k / 1024))
def test_ishikawa_without_inner_step_is_mann(x, g):
    y, x1 = ishikawa_step(PROJ, x, 0.0, g)
    np.testing.assert_array_equal(y, x)
    np.testing.assert_array_equal(x1, mann_step(PROJ, x, 1.0 - g))


# -- schedules -----------------------------------------------------------------

def test_schedule_examples():
    lam = validate_schedule(Schedule.constant(0.5), "lambda")
    assert all(v.holds for v in lam)
    lam = validate_schedule(Schedule.harmonic(0.0, 1.0), "lambda")
    assert not lam[1].holds and "liminf" in lam[1].name
    assert all(v.holds for v in validate_schedule(Schedule.constant(1.0), "gamma"))


def test_schedule_families():
    h = Schedule.harmonic(0.25, 0.5)
    assert h(0) == 0.75 and h(1) == 0.5
    assert h.limit == 0.25 and h.infimum == 0.25 and h.supremum == 0.75
    t = Schedule.table([0.2, 0.9, 0.4])
    assert [t(n) for n in range(5)] == [0.2, 0.9, 0.4, 0.4, 0.4]
    assert t.infimum == 0.2 and t.limit == 0.4


def test_schedule_from_config():
    assert Schedule.from_config(0.3) == Schedule.constant(0.3)
    s = Schedule.from_config({"family": "harmonic", "a": 0.0, "b": 1.0,
                              "declared": {"liminf_positive_product": False}})
    assert s(3) == 0.25
    with pytest.raises(ConfigError):
        Schedule.from_config({"family": "harmonic", "a": 0.0, "b": 1.0,
                              "declared": {"liminf_positive_product": True}})
    with pytest.raises(ConfigError):
        Schedule.from_config({"family": "spiral"})


@settings(max_examples=100, deadline=None)
@given(vals=st.lists(st.floats(0, 1), min_size=1, max_size=10), n=st.integers(0, 50))
def test_table_schedule_bounds(vals, n):
    s = Schedule.table(vals)
    assert s.infimum <= s(n) <= s.supremum


# -- runs ----------------------------------------------------------------------

def test_negation_converges_by_halving():
    tr = iterate(NEG, [1.0], "ishikawa", lam=0.5, gam=0.5, residual_tol=1e-8)
    assert tr.stop_reason == "residual-tolerance"
    assert tr.steps <= 30
    np.testing.assert_array_equal(tr.iterates[:, 0], 2.0 ** -np.arange(tr.steps + 1))


def test_identity_stops_immediately():
    tr = iterate(ID2, [1.0, 2.0], "mann", alpha=0.5)
    assert tr.steps == 0 and tr.final_residual == 0.0


def test_projection_run_reaches_projection():
    x0 = np.array([3.0, 4.0])
    tr = iterate(PROJ, x0, "ishikawa", lam=0.5, gam=0.5)
    assert tr.stop_reason == "residual-tolerance"
    np.testing.assert_allclose(tr.final, metric_projection(Ball(R2, 1.0), x0), atol=1e-9)
    assert np.all(np.diff(tr.fixed_point_distances[0]) <= 0)
    assert fejer_check(tr, [0.6, 0.8]).passed


def test_max_iterations_stop():
    tr = iterate(NEG, [1.0], "picard", max_iter=7)
    assert tr.stop_reason == "max-iterations" and tr.steps == 7


def test_iterate_rejects_missing_schedules():
    with pytest.raises(ConfigError):
        iterate(NEG, [1.0], "ishikawa", lam=0.5)
    with pytest.raises(ConfigError):
        iterate(NEG, [1.0], "leapfrog")


def test_fejer_examples():
    tr = iterate(NEG, [1.0], "ishikawa", lam=0.5, gam=0.5)
    assert fejer_check(tr, [0.0]).passed
    const = iterate(ID2, [1.0, 1.0], "ishikawa", lam=0.5, gam=0.5)
    assert fejer_check(const, [0.0, 0.0]).passed
    tr.iterates[5] = [10.0]  # corrupt one step
    v = fejer_check(tr, [0.0])
    assert not v.passed and v.worst_index == 4


def test_residual_decay_examples():
    tr = iterate(NEG, [1.0], "ishikawa", lam=0.5, gam=0.5, residual_tol=1e-8)
    v = residual_decay_check(tr, [0.0], hilbert_modulus)
    assert v.status == "pass" and v.final_residual <= 1e-8
    # 1/2 * 1/4 * (2 x)^2 = x^2/2 is also the exact energy drop x^2 - x^2/4 minus x^2/4
    assert v.worst_excess <= 0
    tr = iterate(ID2, [1.0, 1.0], "ishikawa", lam=0.5, gam=0.5)
    assert residual_decay_check(tr, [0.0, 0.0], hilbert_modulus).status == "pass"


def test_residual_decay_reports_hypothesis_violation():
    tr = iterate(NEG, [1.0], "ishikawa", lam=Schedule.harmonic(0.0, 1.0), gam=0.5, max_iter=200)
    v = residual_decay_check(tr, [0.0], hilbert_modulus)
    assert v.status == "hypothesis-violated"


def test_trace_csv():
    tr = iterate(NEG, [1.0], "ishikawa", lam=0.5, gam=0.5, residual_tol=1e-3)
    buf = io.StringIO()
    tr.write_csv(buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert list(rows[0]) == ["n", "x0", "residual", "dist_q0"]
    assert len(rows) == tr.steps + 1
    dist = [float(r["dist_q0"]) for r in rows]
    assert dist == [2.0 ** -k for k in range(len(rows))]
    # round-trip is exact with 17 significant digits
    np.testing.assert_array_equal([float(r["x0"]) for r in rows], tr.iterates[:, 0])


def test_runs_are_deterministic():
    T = zoo_entry("rotation-plane").mapping
    a = iterate(T, [1.0, 2.0], "ishikawa", lam=0.3, gam=0.6)
    b = iterate(T, [1.0, 2.0], "ishikawa", lam=0.3, gam=0.6)
    np.testing.assert_array_equal(a.iterates, b.iterates)
