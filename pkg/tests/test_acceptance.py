"""Acceptance gate: one test per criterion, each at its stated tolerance."""
import time

import numpy as np

from sghybrid import experiments as ex
from sghybrid import iterate, validate_conditions, zoo_entry


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_duality_inequality_suite(criterion):
    with criterion(1, "duality-pairing inequality, 12 spaces x 1e4 pairs, < 5 s") as notes:
        res, secs = timed(ex.suite_duality, 0)
        notes.append(f"{secs:.2f} s")
        assert secs < 5
        grid = {(r["n"], r["p"]) for r in res["spaces"]}
        assert grid == {(n, p) for n in (1, 2, 8) for p in (1.5, 2.0, 3.0, 4.0)}
        for row in res["spaces"]:
            assert row["pairs"] == 10_000
            assert row["min_normalized_gap"] >= -1e-10
        assert res["passed"]


def test_uniform_convexity_suite(criterion):
    with criterion(2, "uniform convexity inequality: Hilbert identity and fitted moduli, < 30 s") as notes:
        res, secs = timed(ex.suite_uniform_convexity, 0)
        notes.append(f"{secs:.2f} s")
        assert secs < 30
        hil = [r for r in res["cases"] if r["modulus"] == "s^2"]
        fit = [r for r in res["cases"] if r["modulus"] == "fitted"]
        assert hil and all(r["max_abs_gap"] <= 1e-12 for r in hil)
        assert {r["p"] for r in fit} == {1.5, 3.0, 4.0}
        assert all(r["min_gap"] >= -1e-9 for r in fit)
        assert res["passed"]


def test_quasi_nonexpansive_suite(criterion):
    with criterion(3, "membership + c1, c2, c4 imply quasi-nonexpansive, < 10 s") as notes:
        res, secs = timed(ex.suite_quasi_nonexpansive, 0)
        notes.append(f"{secs:.2f} s, {res['qualifying_pairs']} qualifying pairs")
        assert secs < 10
        qualifying = [r for r in res["rows"] if "max_excess" in r]
        assert len(qualifying) == res["qualifying_pairs"] > 0
        assert all(r["max_excess"] <= 1e-9 for r in qualifying)
        grid = ex.param_grid()
        doubling = [r for r in res["rows"] if r["mapping"] == "doubling"]
        for r in doubling:
            if validate_conditions(grid[r["params"]]).quasi_nonexpansive_conditions:
                assert not r["member"]
        assert not res["negative_control_fit_feasible"]
        assert res["passed"]


def test_firmly_nonexpansive_embedding(criterion):
    with criterion(4, "firmly nonexpansive members satisfy all 15 embedding quadruples") as notes:
        res = ex.suite_firmly_nonexpansive(0)
        assert {"identity-box", "constant-ball", "projection-box",
                "projection-ball"} <= set(res["firmly_nonexpansive"])
        assert all(r["worst_violation"] <= 1e-9 for r in res["rows"])
        assert len(res["embedding"]) == 15
        for e in res["embedding"]:
            P = e["params"]
            assert P["alpha"] + 2 * P["beta"] + P["gamma"] == 0
            assert P["alpha"] + P["beta"] == e["zeta"] + e["eta"]
        notes.append(f"{len(res['rows'])} mappings")
        assert res["passed"]


def test_orbit_boundedness(criterion):
    with criterion(5, "bounded orbits of quasi-nonexpansive members; x+1 escapes") as notes:
        res = ex.suite_orbits(0)
        assert res["rows"]
        assert all(r["max_overshoot"] <= 1e-9 for r in res["rows"])
        for esc in res["fixed_point_free"]:
            assert esc["escaped"] and esc["exceeded_at"] <= esc["horizon"]
        notes.append(f"{len(res['rows'])} mappings")
        assert res["passed"]


def test_demiclosedness(criterion):
    with criterion(6, "Ishikawa limits are fixed points, ||Tu - u|| <= 1e-9") as notes:
        res = ex.suite_demiclosedness(0)
        names = {r["mapping"] for r in res["rows"]}
        assert "nonspreading-table" in names and len(names) >= 5
        assert all(r["worst_limit_residual"] <= 1e-9 for r in res["rows"])
        notes.append(f"{len(names)} mappings")
        assert res["passed"]


def test_ishikawa_convergence(criterion):
    with criterion(7, "Ishikawa convergence, Fejer, energy decay, closed form; < 30 s") as notes:
        res, secs = timed(ex.suite_ishikawa, 0)
        notes.append(f"{secs:.2f} s, {len(res['rows'])} runs")
        assert secs < 30
        assert {r["c"] for r in res["rows"]} == {0.25, 0.5, 0.75}
        for r in res["rows"]:
            assert r["steps"] <= 10_000 and r["final_residual"] <= 1e-10
            assert r["fejer"] and r["decay"]
        # independent closed form: ||x_n|| = 2^(1-n) ||x_1|| for the negation, c = 1/2
        T = zoo_entry("negation-line").mapping
        tr = iterate(T, [0.7], "ishikawa", lam=0.5, gam=0.5, residual_tol=0.0, max_iter=40)
        norms = np.abs(tr.iterates[1:, 0])
        n = np.arange(1, 41)
        assert np.max(np.abs(norms - 2.0 ** (1 - n) * norms[0]) / norms) <= 1e-12
        assert res["closed_form"]["passed"]
        assert res["passed"]


def test_cone_fitting_oracle(criterion):
    with criterion(8, "cone fit feasible for identity and negation; 2x infeasible, grid agrees"):
        res = ex.suite_cone(0)
        rows = {r["mapping"]: r for r in res["rows"]}
        for name in ("identity-box", "negation-line"):
            assert rows[name]["fit"]["feasible"]
            assert rows[name]["recheck_max_violation"] <= 1e-9
        dbl = rows["doubling"]
        assert not dbl["fit"]["feasible"] and dbl["fit"]["conditions_imposed"]
        assert dbl["grid_feasible_points"] == 0
        # positive control: on the pair (0, 0) every residual vanishes, so the
        # grid must report exactly the points that satisfy the side constraints
        steps = np.arange(-20, 21) / 2
        expected = sum(1 for a in steps for b in steps for g in steps for d in steps
                       if a + b == 1 and a + 2 * b + g >= 0 and b <= 0 and d >= 0)
        assert expected > 0
        assert ex.doubling_grid_search(np.zeros(1), np.zeros(1)) == expected
        assert res["passed"]


def test_verify_theorems_deterministic(criterion):
    with criterion(9, "verify-theorems reports are byte-identical across runs") as notes:
        a = ex.dumps(ex.verify_theorems("all", 0))
        b = ex.dumps(ex.verify_theorems("all", 0))
        notes.append(f"{len(a)} bytes")
        assert a == b
        assert '"all_passed": true' in a
