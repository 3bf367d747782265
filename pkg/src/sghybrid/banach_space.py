"""Finite-dimensional l^p geometry.

Vectors are plain numpy arrays of shape ``(n,)``; most functions also accept a
batch of shape ``(m, n)`` and then reduce over the last axis.  The space they
live in is described by a :class:`SpaceSpec`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DimensionError

__all__ = [
    "SpaceSpec",
    "norm",
    "norm_sq",
    "pairing",
    "duality_map",
    "duality_gap",
    "xu_gap",
    "hilbert_modulus",
    "PiecewiseLinearModulus",
    "sample_xu_triples",
    "estimate_g",
    "modulus_for",
]


@dataclass(frozen=True)
class SpaceSpec:
    """The space l^p(n), 1 < p < inf.

    Every such space is uniformly convex and satisfies Opial's condition, so
    both flags are fixed to True; they are kept as fields so that reports
    can echo them.
    """

    n: int
    p: float = 2.0
    opial: bool = field(default=True, init=False)
    uniformly_convex: bool = field(default=True, init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.n!r}")
        if not (np.isfinite(self.p) and self.p > 1):
            raise ConfigError(f"exponent must satisfy 1 < p < inf, got {self.p!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))

    @property
    def q(self) -> float:
        """Conjugate exponent, 1/p + 1/q = 1."""
        return self.p / (self.p - 1.0)

    def vector(self, x) -> np.ndarray:
        """Coerce ``x`` to a float array of shape ``(n,)`` or ``(m, n)``."""
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0 and self.n == 1:
            arr = arr.reshape(1)
        if arr.ndim not in (1, 2) or arr.shape[-1] != self.n:
            raise DimensionError(f"expected trailing dimension {self.n}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DimensionError("vector has non-finite entries")
        return arr

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "opial": self.opial,
                "uniformly_convex": self.uniformly_convex}

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceSpec":
        try:
            return cls(n=d["n"], p=d.get("p", 2.0))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad space spec {d!r}") from exc


def _pnorm(arr: np.ndarray, p: float) -> np.ndarray:
    # scaled by the max entry so |x_i|^p neither overflows nor underflows
    a = np.abs(arr)
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    out = safe[..., 0] * np.sum((a / safe) ** p, axis=-1) ** (1.0 / p)
    return np.where(m[..., 0] > 0, out, 0.0)


def norm(space: SpaceSpec, x) -> float | np.ndarray:
    """(sum |x_i|^p)^(1/p)."""
    out = _pnorm(space.vector(x), space.p)
    return float(out) if out.ndim == 0 else out


def norm_sq(space: SpaceSpec, x) -> float | np.ndarray:
    return norm(space, x) ** 2


def pairing(x, f) -> float | np.ndarray:
    """Duality pairing <x, f> between a vector and a functional (coefficient form)."""
    out = np.sum(np.asarray(x, dtype=float) * np.asarray(f, dtype=float), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def duality_map(space: SpaceSpec, x) -> np.ndarray:
    """Normalized duality map, (Jx)_i = ||x||^(2-p) |x_i|^(p-1) sign(x_i).

    J0 = 0.  The result satisfies <x, Jx> = ||x||^2 and ||Jx||_q = ||x||_p.
    """
    arr = space.vector(x)
    nrm = np.asarray(_pnorm(arr, space.p))[..., None]
    # ||x|| * |u_i|^(p-1) sign(u_i) with u = x/||x||; entries of u lie in [-1, 1]
    u = arr / np.where(nrm > 0, nrm, 1.0)
    return np.sign(u) * np.abs(u) ** (space.p - 1.0) * nrm


def duality_gap(space: SpaceSpec, x, y) -> float | np.ndarray:
    """||x||^2 - ||y||^2 - 2<x - y, Jy>; nonnegative for every pair."""
    x = space.vector(x)
    y = space.vector(y)
    return norm(space, x) ** 2 - norm(space, y) ** 2 - 2.0 * pairing(x - y, duality_map(space, y))


def xu_gap(space: SpaceSpec, x, y, t, g: Callable) -> float | np.ndarray:
    """t||x||^2 + (1-t)||y||^2 - t(1-t) g(||x-y||) - ||tx + (1-t)y||^2.

    ``t`` may be a scalar or an array broadcasting against the batch of pairs.
    """
    x = space.vector(x)
    y = space.vector(y)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    tc = t[..., None] if t.ndim and x.ndim == 2 else t
    mix = tc * x + (1.0 - tc) * y
    out = (t * norm(space, x) ** 2 + (1.0 - t) * norm(space, y) ** 2
           - t * (1.0 - t) * np.asarray(g(norm(space, x - y)), dtype=float)
           - norm(space, mix) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def hilbert_modulus(s):
    """Exact modulus for p = 2: g(s) = s^2."""
    return np.asarray(s, dtype=float) ** 2


@dataclass(frozen=True)
class PiecewiseLinearModulus:
    """Nondecreasing convex piecewise-linear function with g(0) = 0.

    Defined on ``[0, nodes[-1]]``; held constant beyond the last node, which
    is placed at the diameter 2r of the ball it was fitted on.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __call__(self, s):
        out = np.interp(np.asarray(s, dtype=float), self.nodes, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) >= -tol))

    def is_convex(self, tol: float = 1e-12) -> bool:
        slopes = np.diff(self.values) / np.diff(self.nodes)
        return bool(np.all(np.diff(slopes) >= -tol * (1.0 + np.abs(slopes[1:]))))


def _unit_directions(space: SpaceSpec, rng: np.random.Generator, m: int) -> np.ndarray:
    u = rng.standard_normal((m, space.n))
    # a third of the directions are sparse: the flat spots of the l^p unit sphere
    sparse = rng.random(m) < 1.0 / 3.0
    if space.n > 1 and sparse.any():
        keep = rng.random((int(sparse.sum()), space.n)) < 1.0 / space.n
        keep[np.arange(keep.shape[0]), rng.integers(0, space.n, keep.shape[0])] = True
        u[sparse] *= keep
    return u / _pnorm(u, space.p)[:, None]


def sample_xu_triples(space: SpaceSpec, r: float, size: int, seed: int,
                      s_min: float | None = None):
    """Random (x, y, t) with ||x||, ||y|| <= r, spread over a log range of ||x - y||.

    Four generators are mixed: midpoint-centred pairs with a prescribed
    distance, independent points of the ball, pairs pinned to the sphere,
    and sphere points moved along a single coordinate (where the l^p sphere
    is flattest for p > 2).  Returns ``(x, y, t)`` arrays of shapes
    ``(m, n), (m, n), (m,)``.
    """
    if size < 1:
        raise ConfigError("sampling plan is empty")
    rng = np.random.default_rng(seed)
    s_min = 1e-3 * r if s_min is None else s_min
    k = size // 4
    parts = [k, k, k, size - 3 * k]

    # midpoint construction: ||m +- s u / 2|| <= ||m|| + s/2 <= r
    m0 = parts[0]
    s = np.exp(rng.uniform(np.log(s_min), np.log(2 * r), m0))
    u = _unit_directions(space, rng, m0)
    mid = _unit_directions(space, rng, m0) * ((r - s / 2) * rng.random(m0) ** (1.0 / space.n))[:, None]
    x1 = mid - 0.5 * s[:, None] * u
    y1 = mid + 0.5 * s[:, None] * u

    m1 = parts[1]
    x2 = _unit_directions(space, rng, m1) * (r * rng.random(m1) ** (1.0 / space.n))[:, None]
    y2 = _unit_directions(space, rng, m1) * (r * rng.random(m1) ** (1.0 / space.n))[:, None]

    # sphere-pinned: x on the sphere, y pulled back onto it radially
    m2 = parts[2]
    x3 = _unit_directions(space, rng, m2) * r
    s = np.exp(rng.uniform(np.log(s_min), np.log(2 * r), m2))
    y3 = x3 + s[:, None] * _unit_directions(space, rng, m2)

    m3 = parts[3]
    x4 = _unit_directions(space, rng, m3) * r
    y4 = x4.copy()
    j = rng.integers(0, space.n, m3)
    shift = np.exp(rng.uniform(np.log(s_min), np.log(2 * r), m3)) * rng.choice([-1.0, 1.0], m3)
    y4[np.arange(m3), j] += shift

    x = np.vstack([x1, x2, x3, x4])
    y = np.vstack([y1, y2, y3, y4])
    # radial pull-back onto the ball (also clips float overshoot)
    for arr in (x, y):
        nrm = _pnorm(arr, space.p)
        over = nrm > r
        arr[over] *= (r / nrm[over])[:, None]
    t = rng.uniform(0.0, 1.0, size)
    t[: size // 10] = 0.5
    return x, y, t


def estimate_g(space: SpaceSpec, r: float = 1.0, *, samples: int = 200_000,
               nodes: int = 400, seed: int = 0, s_min: float | None = None,
               safety: float | None = None) -> PiecewiseLinearModulus:
    """Fit a modulus g with xu_gap(x, y, t, g) >= 0 over sampled triples in B_r.

    For every sample the largest admissible value of g at s = ||x - y|| is

        v = (t||x||^2 + (1-t)||y||^2 - ||tx + (1-t)y||^2) / (t(1-t)).

    Samples are bucketed on a geometric grid of s.  The value at node k+1 is
    the smallest v seen in any bucket at or beyond bucket k; since g is
    nondecreasing this bounds g on the whole bucket, not only at its node.
    The greatest convex minorant through the origin of those node values,
    scaled by ``safety``, is returned.

    Sampled minima are only estimates of the infimum over the ball: for
    p != 2 fresh samples can land a few percent below them, so ``safety``
    defaults to 0.5 there.  For p = 2, v equals s^2 for every sample and the
    default is 1.
    """
    if safety is None:
        safety = 1.0 if space.p == 2.0 else 0.5
    if not 0 < safety <= 1:
        raise ConfigError("safety factor must lie in (0, 1]")
    if r <= 0:
        raise ConfigError("radius must be positive")
    if samples < 1 or nodes < 2:
        raise ConfigError("degenerate sampling grid")
    s_min = 1e-3 * r if s_min is None else s_min
    x, y, t = sample_xu_triples(space, r, samples, seed, s_min=s_min)
    ok = (t > 1e-3) & (t < 1 - 1e-3)
    x, y, t = x[ok], y[ok], t[ok]
    mix = t[:, None] * x + (1 - t)[:, None] * y
    v = (t * _pnorm(x, space.p) ** 2 + (1 - t) * _pnorm(y, space.p) ** 2
         - _pnorm(mix, space.p) ** 2) / (t * (1 - t))
    s = _pnorm(x - y, space.p)

    grid = np.concatenate([[0.0], np.geomspace(s_min, 2 * r, nodes - 1)])
    idx = np.searchsorted(grid, s, side="right") - 1
    idx = np.clip(idx, 0, len(grid) - 2)
    bucket_min = np.full(len(grid) - 1, np.inf)
    np.minimum.at(bucket_min, idx, v)
    # suffix minimum enforces monotonicity; empty buckets inherit from the right
    tail = np.minimum.accumulate(bucket_min[::-1])[::-1]
    raw = np.concatenate([[0.0], np.maximum(tail, 0.0)])
    if not np.isfinite(raw).all():
        # nothing sampled beyond some bucket: hold the last finite value
        finite = np.isfinite(raw)
        last = np.max(np.nonzero(finite)[0])
        raw[last + 1:] = raw[last]
    values = safety * _lower_convex_hull(grid, raw)
    return PiecewiseLinearModulus(grid, values)


def _lower_convex_hull(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    hull: list[int] = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (xs[i1] - xs[i0]) * (ys[i] - ys[i0]) - (ys[i1] - ys[i0]) * (xs[i] - xs[i0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(xs, xs[hull], ys[hull])


def modulus_for(space: SpaceSpec, r: float = 1.0, **kwargs) -> Callable:
    """s -> s^2 in the Hilbert case, a fitted modulus otherwise."""
    if space.p == 2.0:
        return hilbert_modulus
    return estimate_g(space, r, **kwargs)
