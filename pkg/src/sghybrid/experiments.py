"""Declarative experiments and the theorem-verification suites.

Every function here is deterministic in its seed: reports contain no
timings, and all randomness flows from ``numpy.random.SeedSequence``.
"""
from __future__ import annotations

import itertools
import json
import math
from pathlib import Path

import numpy as np

from .banach_space import (SpaceSpec, _pnorm, duality_gap, duality_map, estimate_g,
                           hilbert_modulus, norm, pairing, sample_xu_triples, xu_gap)
from .errors import ConfigError, DomainError
from .hybrid_class import (NAMED_CLASSES, SghParams, check_membership, fit_sgh_cone,
                           validate_conditions)
from .iteration import (Schedule, fejer_check, iterate, residual_decay_check,
                        validate_schedule)
from .mappings import (PointSet, fixed_points_bruteforce, mapping_from_dict, sample_pairs,
                       sample_points)
from .properties import (check_firmly_nonexpansive, check_quasi_nonexpansive,
                         demiclosedness_probe, firmly_ne_embedding_params,
                         orbit_boundedness_probe, picard_orbit)
from .zoo import builtin_zoo

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2

EMBEDDING_GRID = [(z, e) for z, e in itertools.product([0.0, 0.5, 1.0, 2.0], repeat=2) if z + e > 0]
EXTRA_PARAMS = {
    "half-contraction": SghParams(1, 0, -0.5, 0),
    "nonspreading-with-delta": SghParams(2, -1, 0, 0.5),
    "positive-beta": SghParams(1, 1, -3, 0),
}


def _seeds(seed: int, k: int) -> list[int]:
    ss = np.random.SeedSequence(seed).spawn(k)
    return [int(s.generate_state(1)[0]) for s in ss]


def param_grid() -> dict[str, SghParams]:
    grid = dict(NAMED_CLASSES)
    for z, e in EMBEDDING_GRID:
        grid[f"embedding({z:g},{e:g})"] = firmly_ne_embedding_params(z, e)
    grid.update(EXTRA_PARAMS)
    return grid


def to_jsonable(obj):
    """Plain-Python view of a report; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(report) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"


# -- theorem suites ------------------------------------------------------------

def suite_duality(seed: int, size: int = 10_000) -> dict:
    """Duality-map identities and the gap ||x||^2 - ||y||^2 - 2<x-y, Jy> >= 0."""
    rows, ok = [], True
    spaces = [SpaceSpec(n, p) for n in (1, 2, 8) for p in (1.5, 2.0, 3.0, 4.0)]
    for space, s in zip(spaces, _seeds(seed, len(spaces))):
        rng = np.random.default_rng(s)
        # magnitudes spread over several decades
        x = rng.standard_normal((size, space.n)) * 10 ** rng.uniform(-3, 1, (size, 1))
        y = rng.standard_normal((size, space.n)) * 10 ** rng.uniform(-3, 1, (size, 1))
        nx, ny = norm(space, x), norm(space, y)
        gap = duality_gap(space, x, y)
        worst_gap = float(np.min(gap / (1 + nx ** 2 + ny ** 2)))
        Jx = duality_map(space, x)
        pair_err = float(np.max(np.abs(pairing(x, Jx) - nx ** 2) / (1 + nx ** 2)))
        dual_err = float(np.max(np.abs(_pnorm(Jx, space.q) - nx) / (1 + nx)))
        passed = worst_gap >= -1e-10 and pair_err <= 1e-10 and dual_err <= 1e-10
        ok &= passed
        rows.append({"n": space.n, "p": space.p, "pairs": size, "min_normalized_gap": worst_gap,
                     "pairing_error": pair_err, "dual_norm_error": dual_err, "passed": passed})
    return {"passed": bool(ok), "spaces": rows}


def suite_uniform_convexity(seed: int, size: int = 10_000, train: int = 200_000) -> dict:
    """Hilbert identity for g(s) = s^2, and fitted moduli validated on fresh samples."""
    rows, ok = [], True
    s_hil, s_fit = _seeds(seed, 2)
    for n, s in zip((1, 2, 8), _seeds(s_hil, 3)):
        space = SpaceSpec(n, 2.0)
        x, y, t = sample_xu_triples(space, 1.0, size, s)
        err = float(np.max(np.abs(xu_gap(space, x, y, t, hilbert_modulus))))
        passed = err <= 1e-12
        ok &= passed
        rows.append({"n": n, "p": 2.0, "modulus": "s^2", "max_abs_gap": err, "passed": passed})
    cases = [(n, p) for p in (1.5, 3.0, 4.0) for n in (2, 8)]
    for (n, p), s in zip(cases, _seeds(s_fit, len(cases))):
        space = SpaceSpec(n, p)
        s_train, s_valid = _seeds(s, 2)
        g = estimate_g(space, 1.0, samples=train, seed=s_train)
        x, y, t = sample_xu_triples(space, 1.0, size, s_valid)
        worst = float(np.min(xu_gap(space, x, y, t, g)))
        passed = worst >= -1e-9 and g.is_nondecreasing() and g.is_convex() and g(0.0) == 0.0
        ok &= passed
        rows.append({"n": n, "p": p, "modulus": "fitted", "min_gap": worst, "g(1)": g(1.0),
                     "nondecreasing": g.is_nondecreasing(), "convex": g.is_convex(),
                     "passed": passed})
    return {"passed": bool(ok), "cases": rows}


def _members(seed: int):
    return [e for e in builtin_zoo(seed) if e.role == "member"]


def suite_quasi_nonexpansive(seed: int, size: int = 1000) -> dict:
    """Members satisfying c1, c2, c4 with a fixed point are quasi-nonexpansive."""
    grid = param_grid()
    rows, ok, qualifying = [], True, 0
    zoo = [e for e in builtin_zoo(seed) if e.role in ("member", "negative-control")]
    for entry, s in zip(zoo, _seeds(seed, len(zoo))):
        T = entry.mapping
        for pname, params in grid.items():
            cond = validate_conditions(params)
            mem = check_membership(T, params, size=size, seed=s)
            row = {"mapping": entry.name, "params": pname, "member": mem.member,
                   "max_violation": mem.max_violation,
                   "conditions": cond.quasi_nonexpansive_conditions}
            if entry.role == "negative-control" and cond.quasi_nonexpansive_conditions and mem.member:
                row["passed"] = False
                ok = False
            if mem.member and cond.quasi_nonexpansive_conditions and T.fixed_points:
                qualifying += 1
                q = check_quasi_nonexpansive(T, size=size, seed=s)
                row.update(max_excess=q.max_excess, passed=q.max_excess <= 1e-9)
                ok &= row["passed"]
            rows.append(row)
    neg = next(e for e in builtin_zoo(seed) if e.role == "negative-control").mapping
    fit = fit_sgh_cone(neg, impose_conditions=True, seed=seed, extra_pairs=([[1.0]], [[0.0]]))
    ok &= (not fit.feasible) and qualifying > 0
    return {"passed": bool(ok), "qualifying_pairs": qualifying,
            "negative_control_fit_feasible": fit.feasible, "rows": rows}


def suite_firmly_nonexpansive(seed: int, size: int = 1000) -> dict:
    """Firmly nonexpansive members satisfy every embedding quadruple."""
    rows, ok, fne_names = [], True, []
    emb = []
    for z, e in EMBEDDING_GRID:
        P = firmly_ne_embedding_params(z, e)
        statement = SghParams(2 * e + z, -e, -z, 0)   # roles of zeta and eta swapped
        exact = (P.alpha + 2 * P.beta + P.gamma == 0 and P.alpha + P.beta == z + e
                 and validate_conditions(P).all_hold
                 and firmly_ne_embedding_params(e, z) == SghParams(2 * z + e, -z, -e, 0)
                 and statement == P)
        ok &= exact
        emb.append({"zeta": z, "eta": e, "params": P.to_dict(), "exact": exact})
    members = _members(seed)
    for entry, s in zip(members, _seeds(seed, len(members))):
        T = entry.mapping
        fne = check_firmly_nonexpansive(T, size=size, seed=s)
        if not fne.passed:
            continue
        fne_names.append(entry.name)
        worst = -math.inf
        for z, e in EMBEDDING_GRID:
            mem = check_membership(T, firmly_ne_embedding_params(z, e), size=size, seed=s)
            worst = max(worst, mem.max_violation)
        passed = worst <= 1e-9
        ok &= passed
        rows.append({"mapping": entry.name, "firm_excess": fne.max_excess,
                     "worst_violation": worst, "passed": passed})
    required = {"identity-box", "constant-ball", "projection-box", "projection-ball"}
    ok &= required <= set(fne_names)
    return {"passed": bool(ok), "embedding": emb, "firmly_nonexpansive": fne_names, "rows": rows}


def suite_orbits(seed: int, starts: int = 20, horizon: int = 60) -> dict:
    """Orbits of quasi-nonexpansive members stay within ||x0 - q|| of q;
    a fixed-point-free shift escapes any bound."""
    rows, ok = [], True
    members = _members(seed)
    for entry, s in zip(members, _seeds(seed, len(members))):
        T = entry.mapping
        if not T.fixed_points or not check_quasi_nonexpansive(T, seed=s).passed:
            continue
        worst, probes_ok = -math.inf, True
        for x0 in sample_points(T.domain, starts, s):
            orbit = picard_orbit(T, x0, horizon)
            for q in T.fixed_points:
                r0 = float(_pnorm(x0 - q, T.space.p))
                worst = max(worst, float(np.max(_pnorm(orbit - q, T.space.p))) - r0)
            q = T.fixed_points[0]
            probe = orbit_boundedness_probe(T, x0, horizon, float(_pnorm(x0 - q, T.space.p)) + 1e-9,
                                            center=q)
            probes_ok &= probe.passed
        passed = worst <= 1e-9 and probes_ok
        ok &= passed
        rows.append({"mapping": entry.name, "max_overshoot": worst, "candidates_found": probes_ok,
                     "passed": passed})
    shift = next(e for e in builtin_zoo(seed) if e.role == "fixed-point-free").mapping
    escapes = []
    for bound in (10.0, 100.0, 1000.0):
        horizon = math.ceil(bound) + 1          # orbit of 0 is n, so n = ceil(bound) + 1 exceeds it
        probe = orbit_boundedness_probe(shift, [0.0], horizon, bound)
        esc = probe.details.get("bounded") is False
        ok &= esc
        escapes.append({"bound": bound, "horizon": horizon, "escaped": esc,
                        "exceeded_at": probe.details.get("exceeded_at")})
    return {"passed": bool(ok), "rows": rows, "fixed_point_free": escapes}


def condition_members(seed: int, size: int = 1000):
    """Zoo members with F(T) nonempty that pass membership for some grid
    quadruple satisfying all four conditions."""
    out = []
    grid = param_grid()
    members = _members(seed)
    for entry, s in zip(members, _seeds(seed, len(members))):
        T = entry.mapping
        if not T.fixed_points:
            continue
        for pname, P in grid.items():
            if validate_conditions(P).all_hold and check_membership(T, P, size=size, seed=s).member:
                out.append((entry, pname))
                break
    return out


def suite_demiclosedness(seed: int, starts: int = 5) -> dict:
    rows, ok = [], True
    for entry, pname in condition_members(seed):
        T = entry.mapping
        s = _seeds(seed, 1)[0]
        worst, verdicts = 0.0, []
        for x0 in sample_points(T.domain, starts, s):
            probe = demiclosedness_probe(T, x0=x0, tol=1e-10)
            verdicts.append(probe.verdict)
            worst = max(worst, probe.details.get("limit_residual", math.inf))
            if isinstance(T.domain, PointSet):
                fps = fixed_points_bruteforce(T)
                u = np.asarray(probe.details["limit"])
                if not any(np.allclose(u, f, atol=1e-12, rtol=0) for f in fps):
                    verdicts.append("limit-not-fixed")
        passed = all(v == "pass" for v in verdicts) and worst <= 1e-9
        ok &= passed
        rows.append({"mapping": entry.name, "params": pname, "worst_limit_residual": worst,
                     "passed": passed})
    return {"passed": bool(ok and rows), "rows": rows}


def suite_ishikawa(seed: int, starts: int = 3, weights=(0.25, 0.5, 0.75)) -> dict:
    """Convergence, Fejer monotonicity and per-step energy decrease of Ishikawa runs."""
    rows, ok = [], True
    moduli: dict = {}
    for entry, pname in condition_members(seed):
        T = entry.mapping
        if isinstance(T.domain, PointSet):
            continue
        s = _seeds(seed, 1)[0]
        for c in weights:
            for x0 in sample_points(T.domain, starts, s):
                tr = iterate(T, x0, "ishikawa", lam=c, gam=c, residual_tol=1e-10, max_iter=10_000)
                converged = tr.stop_reason == "residual-tolerance"
                fejer_ok, decay_ok = True, True
                for q in T.fixed_points:
                    slack = 1e-12 * (1 + float(_pnorm(x0 - q, T.space.p)))
                    fejer_ok &= fejer_check(tr, q, slack).passed
                    g = moduli_for_trace(T, tr, q, moduli)
                    decay_ok &= residual_decay_check(tr, q, g, slack=1e-9).passed
                passed = converged and fejer_ok and decay_ok
                ok &= passed
                rows.append({"mapping": entry.name, "c": c, "x0": list(x0), "steps": tr.steps,
                             "final_residual": tr.final_residual, "fejer": fejer_ok,
                             "decay": decay_ok, "passed": passed})
    # closed form: negation with weights 1/2 halves the iterate each step
    from .zoo import zoo_entry
    neg = zoo_entry("negation-line", seed).mapping
    tr = iterate(neg, [3.0], "ishikawa", lam=0.5, gam=0.5, residual_tol=0.0, max_iter=40)
    expect = 3.0 * 2.0 ** -np.arange(41)
    rel = float(np.max(np.abs(np.abs(tr.iterates[:, 0]) - expect) / expect))
    closed_ok = rel <= 1e-12 and tr.steps == 40
    ok &= closed_ok
    return {"passed": bool(ok and rows), "rows": rows,
            "closed_form": {"max_rel_error": rel, "steps": tr.steps, "passed": closed_ok}}


def moduli_for_trace(T, trace, q, cache: dict):
    """s^2 for p = 2; otherwise a modulus fitted on a ball holding every
    vector the energy estimate touches (x_n - q, Tx_n - q, y_n - q, Ty_n - q)."""
    if T.space.p == 2.0:
        return hilbert_modulus
    vecs = [trace.iterates, T(trace.iterates)]
    if trace.auxiliary is not None and len(trace.auxiliary):
        vecs += [trace.auxiliary, T(trace.auxiliary)]
    r = max(float(np.max(_pnorm(v - q, T.space.p))) for v in vecs)
    R = 2.0 ** math.ceil(math.log2(max(r, 1e-12)))
    key = (T.space, R)
    if key not in cache:
        cache[key] = estimate_g(T.space, R, seed=0)
    return cache[key]


def suite_cone(seed: int, size: int = 300) -> dict:
    from .zoo import zoo_entry
    rows, ok = [], True
    for name in ("identity-box", "negation-line", "projection-ball"):
        T = zoo_entry(name, seed).mapping
        fit = fit_sgh_cone(T, size=size, seed=seed)
        recheck = check_membership(T, fit.params, size=size, seed=seed) if fit.feasible else None
        passed = fit.feasible and recheck.member
        ok &= passed
        rows.append({"mapping": name, "fit": fit.to_dict(),
                     "recheck_max_violation": None if recheck is None else recheck.max_violation,
                     "passed": passed})
    T = zoo_entry("doubling", seed).mapping
    x, y = sample_pairs(T.domain, size, seed)
    x, y = np.vstack([x, [[1.0]]]), np.vstack([y, [[0.0]]])
    fit = fit_sgh_cone(T, (x, y), impose_conditions=True)
    hits = doubling_grid_search(x[:, 0], y[:, 0])
    passed = not fit.feasible and hits == 0
    ok &= passed
    rows.append({"mapping": "doubling", "fit": fit.to_dict(), "grid_feasible_points": hits,
                 "passed": passed})
    return {"passed": bool(ok), "rows": rows}


def doubling_grid_search(x: np.ndarray, y: np.ndarray, step: float = 0.5, box: float = 10.0) -> int:
    """Count grid quadruples in [-box, box]^4 satisfying c1 to c4,
    alpha + beta = 1 and the class inequality for T(x) = 2x on the given
    scalar pairs.  Residuals use the closed form, not the library."""
    axis = np.arange(-box, box + step / 2, step)
    a, b, g, d = (v.ravel() for v in np.meshgrid(axis, axis, axis, axis, indexing="ij"))
    keep = (a + b == 1) & (a + 2 * b + g >= 0) & (b <= 0) & (d >= 0)
    a, b, g, d = a[keep], b[keep], g[keep], d[keep]
    terms = np.stack([4 * (x - y) ** 2, (x - 2 * y) ** 2 + (2 * x - y) ** 2,
                      (x - y) ** 2, x ** 2 + y ** 2])
    worst = np.full(len(a), -np.inf)
    for lo in range(0, len(a), 4096):
        sl = slice(lo, lo + 4096)
        P = np.stack([a[sl], b[sl], g[sl], d[sl]], axis=1)
        worst[sl] = (P @ terms).max(axis=1)
    return int(np.sum(worst <= 0))


def suite_negative_control(seed: int, size: int = 1000) -> dict:
    from .zoo import zoo_entry
    T = zoo_entry("doubling", seed).mapping
    mem = check_membership(T, NAMED_CLASSES["nonexpansive"], size=size, seed=seed)
    x, y = (np.asarray(v) for v in mem.witness)
    ratio = mem.max_violation / float(np.sum((x - y) ** 2))
    qne = check_quasi_nonexpansive(T, size=size, seed=seed)
    detected = (not mem.member) and abs(ratio - 3.0) <= 1e-12 and not qne.passed
    return {"passed": bool(detected), "membership": mem.to_dict(), "violation_ratio": ratio,
            "quasi_nonexpansive": qne.to_dict()}


SUITES = {
    "thm2.1": suite_duality,
    "thm2.3": suite_uniform_convexity,
    "thm3.1": suite_quasi_nonexpansive,
    "thm3.2": suite_firmly_nonexpansive,
    "thm3.3": suite_orbits,
    "thm3.4": suite_demiclosedness,
    "thm3.5": suite_ishikawa,
    "cone": suite_cone,
    "negative-control": suite_negative_control,
}


def verify_theorems(suite: str = "all", seed: int = 0) -> dict:
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; choose from {['all', *SUITES]}")
    results = {name: SUITES[name](seed) for name in names}
    return {"seed": seed, "suite": suite, "results": results,
            "all_passed": all(r["passed"] for r in results.values())}


def format_matrix(report: dict) -> str:
    lines = [f"seed {report['seed']}"]
    for name, res in report["results"].items():
        lines.append(f"{name:<18} {'PASS' if res['passed'] else 'FAIL'}")
    lines.append(f"{'overall':<18} {'PASS' if report['all_passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


# -- config-driven commands ----------------------------------------------------

def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


class Experiment:
    """Resolved view of a config: space, mapping, parameters, samples."""

    def __init__(self, cfg: dict, seed: int | None = None):
        self.cfg = cfg
        if seed is None:
            if "seed" not in cfg:
                raise ConfigError("config needs a seed (or pass --seed)")
            seed = cfg["seed"]
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        self.seed = seed
        try:
            self.space = SpaceSpec.from_dict(cfg["space"])
            self.mapping = mapping_from_dict(cfg["mapping"], self.space, seed=seed)
        except KeyError as exc:
            raise ConfigError(f"config is missing {exc}") from exc
        samples = cfg.get("samples", {})
        self.pair_count = int(samples.get("pairs", 1000))
        self.point_count = int(samples.get("points", 1000))
        self.tol = float(cfg.get("tol", 1e-9))
        self.params = SghParams.from_config(cfg["params"]) if "params" in cfg else None
        extra = cfg.get("extra_pairs")
        self.extra_pairs = None
        if extra:
            try:
                self.extra_pairs = ([p[0] for p in extra], [p[1] for p in extra])
            except (TypeError, IndexError) as exc:
                raise ConfigError("extra_pairs must be a list of [x, y] pairs") from exc

    def echo(self) -> dict:
        return {"seed": self.seed, "space": self.space.to_dict(), "mapping": self.mapping.to_dict(),
                "params": None if self.params is None else self.params.to_dict(), "tol": self.tol,
                "samples": {"pairs": self.pair_count, "points": self.point_count}}


def _write(out: Path | None, name: str, text: str, manifest: list):
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    manifest.append(name)


def cmd_check_class(cfg: dict, *, seed: int | None = None, out: Path | None = None):
    exp = Experiment(cfg, seed)
    if exp.params is None:
        raise ConfigError("check-class needs params")
    cond = validate_conditions(exp.params)
    mem = check_membership(exp.mapping, exp.params, size=exp.pair_count, seed=exp.seed,
                           tol=exp.tol, keep_rows=bool(cfg.get("verbose")),
                           extra_pairs=exp.extra_pairs)
    report = {"config": exp.echo(), "conditions": cond.to_dict(), "membership": mem.to_dict()}
    passed = mem.member and cond.quasi_nonexpansive_conditions
    if exp.mapping.fixed_points:
        qne = check_quasi_nonexpansive(exp.mapping, size=exp.point_count, seed=exp.seed, tol=exp.tol)
        report["quasi_nonexpansive"] = qne.to_dict()
        passed &= qne.passed
    report["all_passed"] = bool(passed)
    manifest: list = []
    if cfg.get("verbose") and out is not None:
        import io
        buf = io.StringIO()
        mem.write_csv(buf, exp.space.n)
        _write(out, "membership.csv", buf.getvalue(), manifest)
    report["files"] = manifest + (["report.json"] if out is not None else [])
    _write(out, "report.json", dumps(report), [])
    return report, EXIT_OK if passed else EXIT_FAIL


def cmd_fit_cone(cfg: dict, *, seed: int | None = None, out: Path | None = None):
    exp = Experiment(cfg, seed)
    fit = fit_sgh_cone(exp.mapping, size=exp.pair_count, seed=exp.seed,
                       impose_conditions=bool(cfg.get("impose_conditions", False)),
                       extra_pairs=exp.extra_pairs)
    report = {"config": exp.echo(), "fit": fit.to_dict()}
    if fit.feasible:
        recheck = check_membership(exp.mapping, fit.params, size=exp.pair_count, seed=exp.seed,
                                   tol=exp.tol, extra_pairs=exp.extra_pairs)
        report["recheck"] = recheck.to_dict()
    report["files"] = ["report.json"] if out is not None else []
    _write(out, "report.json", dumps(report), [])
    return report, EXIT_OK if fit.feasible else EXIT_FAIL


def cmd_iterate(cfg: dict, *, seed: int | None = None, out: Path | None = None):
    exp = Experiment(cfg, seed)
    scheme = cfg.get("scheme", "ishikawa")
    sched_cfg = cfg.get("schedules", {})
    try:
        scheds = {role: Schedule.from_config(v) for role, v in sched_cfg.items()}
    except ConfigError:
        raise
    hyps = {role: [v.to_dict() for v in validate_schedule(s, role)] for role, s in scheds.items()}
    violated = [f"{role}: {h['condition']}" for role, hs in hyps.items() for h in hs if not h["holds"]]
    stop = cfg.get("stop", {})
    if "x0" not in cfg:
        raise ConfigError("iterate needs x0")
    try:
        trace = iterate(exp.mapping, cfg["x0"], scheme, lam=scheds.get("lambda"),
                        gam=scheds.get("gamma"), alpha=scheds.get("alpha"),
                        residual_tol=float(stop.get("residual_tol", 1e-10)),
                        max_iter=int(stop.get("max_iter", 10_000)))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    report = {"config": {**exp.echo(), "scheme": scheme, "x0": cfg["x0"],
                         "schedules": {k: v.to_dict() for k, v in scheds.items()}, "stop": stop},
              "hypotheses": hyps, "hypothesis_violations": violated, "trace": trace.summary()}
    passed = trace.stop_reason == "residual-tolerance"
    checks = []
    for j, q in enumerate(trace.fixed_points):
        slack = 1e-12 * (1 + float(_pnorm(trace.iterates[0] - q, exp.space.p)))
        fv = fejer_check(trace, q, slack)
        entry = {"fixed_point": q.tolist(), "fejer": fv.to_dict()}
        passed &= fv.passed
        if scheme == "ishikawa":
            g = moduli_for_trace(exp.mapping, trace, q, {})
            dv = residual_decay_check(trace, q, g)
            entry["residual_decay"] = dv.to_dict()
            passed &= dv.status != "fail"
        checks.append(entry)
    report["checks"] = checks
    report["all_passed"] = bool(passed)
    manifest: list = []
    if out is not None:
        import io
        buf = io.StringIO()
        trace.write_csv(buf)
        _write(out, "trace.csv", buf.getvalue(), manifest)
        manifest.append("summary.json")
    report["files"] = manifest
    _write(out, "summary.json", dumps(report), [])
    return report, EXIT_OK if passed else EXIT_FAIL
