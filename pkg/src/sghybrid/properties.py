"""Numeric checks of structural properties of mappings.

Quasi-nonexpansiveness, firm nonexpansiveness and its embedding in the
hybrid class, orbit boundedness, and demiclosedness of I - T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .banach_space import _pnorm, duality_map, pairing
from .errors import ConfigError, DomainError, PreconditionError
from .hybrid_class import DEFAULT_TOL, SghParams
from .iteration import iterate
from .mappings import FIXED_POINT_TOL, Mapping, PointSet, sample_pairs, sample_points

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class QuasiNeReport:
    max_excess: float
    witness: tuple[list, list]
    points_checked: int
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        return {"max_excess": self.max_excess, "witness": list(self.witness),
                "points_checked": self.points_checked,
                "verdict": PASS if self.passed else FAIL, "tol": self.tol}


@dataclass
class ProbeReport:
    name: str
    verdict: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {"probe": self.name, "verdict": self.verdict, **self.details}


def _verified_fixed_points(T: Mapping, fixed_points) -> list[np.ndarray]:
    fps = [T.space.vector(q) for q in fixed_points]
    if not fps:
        raise PreconditionError("quasi-nonexpansiveness needs a nonempty fixed-point set")
    for q in fps:
        if T.residual(q) > FIXED_POINT_TOL:
            raise PreconditionError(f"{q.tolist()} is not a fixed point (residual {T.residual(q):.3g})")
    return fps


def check_quasi_nonexpansive(T: Mapping, fixed_points=None, points=None, *, size: int = 1000,
                             seed: int = 0, tol: float = DEFAULT_TOL) -> QuasiNeReport:
    """max over q in F(T) and sampled y of ||q - Ty|| - ||q - y||."""
    fps = _verified_fixed_points(T, T.fixed_points if fixed_points is None else fixed_points)
    ys = sample_points(T.domain, size, seed) if points is None else np.atleast_2d(T.space.vector(points))
    Ty = T(ys)
    worst, witness = -math.inf, None
    for q in fps:
        excess = _pnorm(q - Ty, T.space.p) - _pnorm(q - ys, T.space.p)
        k = int(np.argmax(excess))
        if excess[k] > worst:
            worst, witness = float(excess[k]), (q.tolist(), ys[k].tolist())
    return QuasiNeReport(worst, witness, len(ys) * len(fps), worst <= tol, tol)


def firmly_ne_embedding_params(zeta: float, eta: float) -> SghParams:
    """Quadruple (zeta + 2 eta, -eta, -zeta, 0) satisfied by every firmly
    nonexpansive mapping, for zeta, eta >= 0 not both zero.

    zeta alone gives the nonexpansive class, eta alone the nonspreading one.
    """
    if zeta < 0 or eta < 0:
        raise ConfigError("zeta and eta must be nonnegative")
    if zeta + eta <= 0:
        raise ConfigError("zeta = eta = 0 gives alpha + beta = 0")
    return SghParams(zeta + 2 * eta, -eta, -zeta, 0.0)


@dataclass
class FirmlyNeReport:
    max_excess: float
    witness: tuple[list, list]
    pairs_checked: int
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        return {"max_excess": self.max_excess, "witness": list(self.witness),
                "pairs_checked": self.pairs_checked,
                "verdict": PASS if self.passed else FAIL, "tol": self.tol}


def check_firmly_nonexpansive(T: Mapping, pairs=None, *, size: int = 1000, seed: int = 0,
                              tol: float = 1e-10) -> FirmlyNeReport:
    """max over pairs of ||Tx - Ty||^2 - <x - y, J(Tx - Ty)>."""
    if pairs is None:
        x, y = sample_pairs(T.domain, size, seed)
    else:
        x, y = (np.atleast_2d(T.space.vector(v)) for v in pairs)
    d = T(x) - T(y)
    excess = _pnorm(d, T.space.p) ** 2 - pairing(x - y, duality_map(T.space, d))
    excess = np.atleast_1d(excess)
    k = int(np.argmax(excess))
    return FirmlyNeReport(float(excess[k]), (x[k].tolist(), y[k].tolist()), len(excess),
                          bool(excess[k] <= tol), tol)


def picard_orbit(T: Mapping, x0, horizon: int) -> np.ndarray:
    """x0, Tx0, ..., T^horizon x0 as rows."""
    x = T.space.vector(x0)
    orbit = [x]
    for _ in range(horizon):
        x = T(x)
        orbit.append(x)
    return np.array(orbit)


def orbit_boundedness_probe(T: Mapping, x0, horizon: int, bound: float, *, center=None,
                            tol: float = DEFAULT_TOL) -> ProbeReport:
    """Follow T^n x0 and look for a fixed-point candidate when it stays bounded.

    A bounded orbit implies F(T) is nonempty for the class under its
    conditions.  Picard orbits need not converge (negation oscillates), so
    the candidate search also runs averaged iterates x <- (x + T((x + Tx)/2))/2
    from x0 and keeps whichever point has the smaller residual.

    Verdicts: pass (bounded and a candidate with residual <= tol found),
    fail (bounded, no such candidate), inconclusive (orbit exceeded
    ``bound``, so the hypothesis is not met).
    """
    if horizon < 1:
        raise ConfigError("horizon must be at least 1")
    x0 = T.space.vector(x0)
    c = T.space.zeros() if center is None else T.space.vector(center)
    details: dict = {"horizon": horizon, "bound": bound}
    try:
        orbit = picard_orbit(T, x0, horizon)
    except DomainError as exc:
        details["error"] = str(exc)
        return ProbeReport("orbit-boundedness", FAIL, details)
    dist = _pnorm(orbit - c, T.space.p)
    details["sup_distance"] = float(dist.max())
    above = np.nonzero(dist > bound)[0]
    if len(above):
        details.update(bounded=False, exceeded_at=int(above[0]))
        return ProbeReport("orbit-boundedness", INCONCLUSIVE, details)

    res = T.residual(orbit)
    k = int(np.argmin(res))
    cand, cand_res = orbit[k], float(res[k])
    if cand_res > tol and not isinstance(T.domain, PointSet):
        trace = iterate(T, x0, "ishikawa", lam=0.5, gam=0.5, residual_tol=tol)
        if trace.residuals[-1] < cand_res:
            cand, cand_res = trace.iterates[-1], float(trace.residuals[-1])
    details.update(bounded=True, candidate=cand.tolist(), candidate_residual=cand_res)
    return ProbeReport("orbit-boundedness", PASS if cand_res <= tol else FAIL, details)


def ishikawa_generator(T: Mapping, x0, *, residual_tol: float = 1e-10, max_iter: int = 10_000):
    """Default sequence for the demiclosedness probe.

    Weights 1/2 on convex domains.  On a finite point set the only weights
    that keep iterates inside are lambda = gamma = 1, i.e. x <- T(T x).
    """
    w = 1.0 if isinstance(T.domain, PointSet) else 0.5
    trace = iterate(T, x0, "ishikawa", lam=w, gam=w, residual_tol=residual_tol, max_iter=max_iter)
    return trace.iterates


def demiclosedness_probe(T: Mapping, sequence: Iterable | None = None, *, x0=None,
                         limit=None, tol: float = 1e-10) -> ProbeReport:
    """If x_n -> u and ||x_n - Tx_n|| -> 0, check that u is fixed.

    ``sequence`` is the generated sequence (rows); without one, Ishikawa
    iterates from ``x0`` are used.  ``limit`` defaults to the last element.
    A sequence whose own residuals do not reach ``tol`` is reported as
    inconclusive rather than as a counterexample.
    """
    if sequence is None:
        if x0 is None:
            raise ConfigError("need a sequence or a starting point")
        sequence = ishikawa_generator(T, x0, residual_tol=tol)
    xs = np.atleast_2d(T.space.vector(np.asarray(list(sequence), dtype=float)))
    u = xs[-1] if limit is None else T.space.vector(limit)
    res = np.atleast_1d(T.residual(xs))
    details = {"length": len(xs), "final_sequence_residual": float(res[-1]),
               "limit": u.tolist(), "limit_gap": float(_pnorm(xs[-1] - u, T.space.p))}
    if res[-1] > tol:
        details["reason"] = "sequence residuals do not vanish"
        return ProbeReport("demiclosedness", INCONCLUSIVE, details)
    if details["limit_gap"] > 10 * tol:
        details["reason"] = "sequence does not approach the recorded limit"
        return ProbeReport("demiclosedness", INCONCLUSIVE, details)
    lim_res = T.residual(u)
    details["limit_residual"] = float(lim_res)
    return ProbeReport("demiclosedness", PASS if lim_res <= 10 * tol else FAIL, details)
