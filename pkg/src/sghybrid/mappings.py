"""Convex domains and a closed family of self-maps on them.

Every mapping is immutable once built.  Construction samples the domain
(seeded) and refuses mappings whose images leave it, and refuses declared
fixed points that are not fixed to 1e-12.
"""
from __future__ import annotations

import itertools

import numpy as np

from .banach_space import SpaceSpec, _pnorm
from .errors import ConfigError, DomainError

FIXED_POINT_TOL = 1e-12
SELF_MAP_SAMPLES = 1000
WHOLE_SPACE_RADIUS = 10.0


# -- domains -----------------------------------------------------------------

class Domain:
    kind = "abstract"

    def __init__(self, space: SpaceSpec):
        self.space = space

    def contains(self, x, tol: float = 0.0) -> bool | np.ndarray:
        raise NotImplementedError

    def nearby(self, x, tol: float = 1e-12):
        """Return ``x`` pulled back into the domain if it sits within ``tol``
        of it, otherwise None."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check(self, x) -> np.ndarray:
        return self.space.vector(x)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


class WholeSpace(Domain):
    """All of l^p(n).  Sampling draws from the cube [-10, 10]^n."""

    kind = "whole-space"

    def __init__(self, space: SpaceSpec, sample_radius: float = WHOLE_SPACE_RADIUS):
        super().__init__(space)
        self.sample_radius = float(sample_radius)

    def contains(self, x, tol=0.0):
        x = self._check(x)
        return True if x.ndim == 1 else np.ones(len(x), dtype=bool)

    def nearby(self, x, tol=1e-12):
        return self._check(x)

    def sample(self, rng, m):
        return rng.uniform(-self.sample_radius, self.sample_radius, (m, self.space.n))

    def to_dict(self):
        return {"kind": self.kind}


class Box(Domain):
    kind = "box"

    def __init__(self, space: SpaceSpec, lo, hi):
        super().__init__(space)
        self.lo = space.vector(np.broadcast_to(np.asarray(lo, dtype=float), (space.n,))).copy()
        self.hi = space.vector(np.broadcast_to(np.asarray(hi, dtype=float), (space.n,))).copy()
        if np.any(self.lo > self.hi):
            raise ConfigError("box bounds must satisfy lo <= hi")

    def contains(self, x, tol=0.0):
        x = self._check(x)
        inside = np.all((x >= self.lo - tol) & (x <= self.hi + tol), axis=-1)
        return bool(inside) if x.ndim == 1 else inside

    def nearby(self, x, tol=1e-12):
        x = self._check(x)
        if not self.contains(x, tol):
            return None
        return np.clip(x, self.lo, self.hi)

    def sample(self, rng, m):
        return rng.uniform(self.lo, self.hi, (m, self.space.n))

    def bounding_box(self):
        return self.lo, self.hi

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class Ball(Domain):
    """Closed l^p ball of the ambient space."""

    kind = "ball"

    def __init__(self, space: SpaceSpec, radius: float, center=None):
        super().__init__(space)
        if not radius > 0:
            raise ConfigError("ball radius must be positive")
        self.radius = float(radius)
        self.center = space.zeros() if center is None else space.vector(center).copy()

    def _dist(self, x):
        return _pnorm(x - self.center, self.space.p)

    def contains(self, x, tol=0.0):
        x = self._check(x)
        inside = self._dist(x) <= self.radius + tol
        return bool(inside) if x.ndim == 1 else inside

    def nearby(self, x, tol=1e-12):
        x = self._check(x)
        d = float(self._dist(x))
        if d <= self.radius:
            return x
        if d > self.radius + tol:
            return None
        return self.center + (x - self.center) * (self.radius / d)

    def sample(self, rng, m):
        u = rng.standard_normal((m, self.space.n))
        u /= _pnorm(u, self.space.p)[:, None]
        rad = self.radius * rng.random(m) ** (1.0 / self.space.n)
        return self.center + u * rad[:, None]

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def to_dict(self):
        return {"kind": self.kind, "radius": self.radius, "center": self.center.tolist()}


class PointSet(Domain):
    """A finite set of points.  Not convex; only table mappings live here."""

    kind = "finite-point-set"

    def __init__(self, space: SpaceSpec, points):
        super().__init__(space)
        pts = np.atleast_2d(space.vector(np.asarray(points, dtype=float).reshape(-1, space.n)))
        if len(pts) == 0:
            raise ConfigError("finite point set must be nonempty")
        self.points = pts

    def index_of(self, x, tol: float = FIXED_POINT_TOL) -> int | None:
        d = _pnorm(self.points - x, self.space.p)
        i = int(np.argmin(d))
        return i if d[i] <= tol else None

    def contains(self, x, tol=0.0):
        x = self._check(x)
        tol = max(tol, FIXED_POINT_TOL)
        if x.ndim == 1:
            return self.index_of(x, tol) is not None
        return np.array([self.index_of(row, tol) is not None for row in x])

    def nearby(self, x, tol=1e-12):
        i = self.index_of(self._check(x), tol)
        return None if i is None else self.points[i].copy()

    def sample(self, rng, m):
        return self.points[rng.integers(0, len(self.points), m)]

    def bounding_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def to_dict(self):
        return {"kind": self.kind, "points": self.points.tolist()}


def domain_from_dict(d: dict, space: SpaceSpec) -> Domain:
    try:
        kind = d["kind"]
        if kind == "whole-space":
            return WholeSpace(space)
        if kind == "box":
            return Box(space, d["lo"], d["hi"])
        if kind == "ball":
            return Ball(space, d["radius"], d.get("center"))
        if kind == "finite-point-set":
            return PointSet(space, d["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad domain spec {d!r}: {exc}") from exc
    raise ConfigError(f"unknown domain kind {d.get('kind')!r}")


def metric_projection(C: Domain, x) -> np.ndarray:
    """Nearest point of a box or ball in a Hilbert (p = 2) space.

    Boxes clamp componentwise; balls scale radially towards their centre.
    """
    if C.space.p != 2.0:
        raise ConfigError("metric projection is only supported for p = 2")
    x = C.space.vector(x)
    if isinstance(C, Box):
        return np.clip(x, C.lo, C.hi)
    if isinstance(C, Ball):
        d = x - C.center
        nrm = np.atleast_1d(_pnorm(d, 2.0))
        scale = C.radius / np.maximum(nrm, C.radius)
        return C.center + d * (scale[:, None] if x.ndim == 2 else scale[0])
    raise ConfigError(f"cannot project onto a {C.kind} domain")


# -- mappings ----------------------------------------------------------------

class Mapping:
    """Self-map T of a domain C.

    Subclasses implement ``_apply`` on a batch of shape ``(m, n)``; calling
    the mapping checks that inputs lie in the domain.
    """

    kind = "abstract"

    def __init__(self, domain: Domain, fixed_points=None, *, seed: int = 0,
                 check_samples: int = SELF_MAP_SAMPLES):
        self.domain = domain
        self.space = domain.space
        fps = [] if fixed_points is None else [self.space.vector(q).copy() for q in fixed_points]
        self.fixed_points = fps
        self._verify(seed, check_samples)

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        x = self.space.vector(x)
        inside = self.domain.contains(x, FIXED_POINT_TOL)
        if not np.all(inside):
            raise DomainError(f"point outside the domain of {self.kind} mapping")
        if x.ndim == 1:
            return self._apply(x[None, :])[0]
        return self._apply(x)

    def residual(self, x) -> float | np.ndarray:
        """||x - Tx||."""
        x = self.space.vector(x)
        out = _pnorm(x - self(x), self.space.p)
        return float(out) if np.ndim(out) == 0 else out

    def _verify(self, seed: int, m: int):
        if isinstance(self.domain, PointSet):
            pts = self.domain.points
        else:
            pts = self.domain.sample(np.random.default_rng(seed), m)
        images = self._apply(pts)
        ok = self.domain.contains(images, FIXED_POINT_TOL)
        if not np.all(ok):
            bad = pts[int(np.argmin(ok))]
            raise ConfigError(f"{self.kind} mapping is not a self-map: image of {bad.tolist()} leaves the domain")
        for q in self.fixed_points:
            if not self.domain.contains(q, FIXED_POINT_TOL):
                raise ConfigError(f"declared fixed point {q.tolist()} is outside the domain")
            if self.residual(q) > FIXED_POINT_TOL:
                raise ConfigError(f"declared fixed point {q.tolist()} has residual {self.residual(q):.3g}")

    def _params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "domain": self.domain.to_dict(), **self._params()}
        if self.fixed_points:
            d["fixed_points"] = [q.tolist() for q in self.fixed_points]
        return d

    def __repr__(self):
        return f"{type(self).__name__}({self._params()}, domain={self.domain.kind})"


class Identity(Mapping):
    kind = "identity"

    def _apply(self, x):
        return x.copy()


class Constant(Mapping):
    kind = "constant"

    def __init__(self, domain, value, fixed_points=None, **kw):
        self.value = domain.space.vector(value).copy()
        super().__init__(domain, fixed_points, **kw)

    def _apply(self, x):
        return np.broadcast_to(self.value, x.shape).copy()

    def _params(self):
        return {"value": self.value.tolist()}


class Scaling(Mapping):
    """x -> c x."""

    kind = "scaling"

    def __init__(self, domain, factor: float, fixed_points=None, **kw):
        self.factor = float(factor)
        super().__init__(domain, fixed_points, **kw)

    def _apply(self, x):
        return self.factor * x

    def _params(self):
        return {"factor": self.factor}


class Negation(Mapping):
    kind = "negation"

    def _apply(self, x):
        return -x


class Affine(Mapping):
    """x -> A x + b."""

    kind = "affine"

    def __init__(self, domain, A, b=None, fixed_points=None, **kw):
        n = domain.space.n
        self.A = np.asarray(A, dtype=float).reshape(n, n).copy()
        self.b = np.zeros(n) if b is None else domain.space.vector(b).copy()
        super().__init__(domain, fixed_points, **kw)

    def _apply(self, x):
        return x @ self.A.T + self.b

    def _params(self):
        return {"A": self.A.tolist(), "b": self.b.tolist()}


class MetricProjection(Mapping):
    """Hilbert-space projection onto a box or ball contained in the domain."""

    kind = "metric-projection"

    def __init__(self, domain, target: Domain, fixed_points=None, **kw):
        if domain.space.p != 2.0:
            raise ConfigError("metric projection is only supported for p = 2")
        if not isinstance(target, (Box, Ball)):
            raise ConfigError("projection target must be a box or a ball")
        self.target = target
        super().__init__(domain, fixed_points, **kw)

    def _apply(self, x):
        return metric_projection(self.target, x)

    def _params(self):
        return {"target": self.target.to_dict()}


class Table(Mapping):
    """Mapping given pointwise on a finite point set."""

    kind = "table"

    def __init__(self, domain: PointSet, images, fixed_points=None, **kw):
        if not isinstance(domain, PointSet):
            raise ConfigError("table mappings need a finite-point-set domain")
        imgs = np.asarray(images, dtype=float).reshape(-1, domain.space.n)
        if len(imgs) != len(domain.points):
            raise ConfigError("table must list one image per domain point")
        self.images = imgs
        super().__init__(domain, fixed_points, **kw)

    def _apply(self, x):
        out = np.empty_like(x)
        for k, row in enumerate(x):
            i = self.domain.index_of(row)
            if i is None:
                raise DomainError(f"{row.tolist()} is not in the table")
            out[k] = self.images[i]
        return out

    def _params(self):
        return {"images": self.images.tolist()}


def mapping_from_dict(d: dict, space: SpaceSpec, *, seed: int = 0) -> Mapping:
    """Build a mapping from its JSON form (``"kind"`` discriminated)."""
    try:
        kind = d["kind"]
        domain = domain_from_dict(d.get("domain", {"kind": "whole-space"}), space)
        fps = d.get("fixed_points")
        kw = {"seed": seed}
        if kind == "identity":
            return Identity(domain, fps, **kw)
        if kind == "constant":
            return Constant(domain, d["value"], fps, **kw)
        if kind == "scaling":
            return Scaling(domain, d["factor"], fps, **kw)
        if kind == "negation":
            return Negation(domain, fps, **kw)
        if kind == "affine":
            return Affine(domain, d["A"], d.get("b"), fps, **kw)
        if kind == "metric-projection":
            return MetricProjection(domain, domain_from_dict(d["target"], space), fps, **kw)
        if kind == "table":
            return Table(domain, d["images"], fps, **kw)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad mapping spec {d!r}: {exc}") from exc
    raise ConfigError(f"unknown mapping kind {d.get('kind')!r}")


def _linear_part(T: Mapping):
    """(A, b) when T is affine in disguise, else None."""
    n = T.space.n
    if isinstance(T, Affine):
        return T.A, T.b
    if isinstance(T, Identity):
        return np.eye(n), np.zeros(n)
    if isinstance(T, Scaling):
        return T.factor * np.eye(n), np.zeros(n)
    if isinstance(T, Negation):
        return -np.eye(n), np.zeros(n)
    return None


def fixed_points_bruteforce(T: Mapping, tol: float = FIXED_POINT_TOL, *,
                            grid: int | None = None, bounds=None) -> list[np.ndarray]:
    """All sampled points x with ||Tx - x|| <= tol.

    Finite point sets are scanned exhaustively.  Otherwise a grid with
    ``grid`` points per axis is laid over the domain's bounding box (or
    ``bounds=(lo, hi)`` for the whole space).  Affine maps with A - I
    nonsingular additionally contribute the solution of (A - I)x = -b.
    """
    found: list[np.ndarray] = []
    lin = _linear_part(T)
    direct = False
    if lin is not None:
        A, b = lin
        M = A - np.eye(T.space.n)
        if np.linalg.matrix_rank(M) == T.space.n:
            direct = True
            x = np.linalg.solve(M, -b)
            if T.domain.contains(x, FIXED_POINT_TOL):
                found.append(x)

    if isinstance(T.domain, PointSet):
        cands = T.domain.points
    elif grid is not None:
        if bounds is None:
            bounds = T.domain.bounding_box()
        if bounds is None:
            raise ConfigError("whole-space domain needs explicit grid bounds")
        lo, hi = (np.broadcast_to(np.asarray(v, dtype=float), (T.space.n,)) for v in bounds)
        axes = [np.linspace(lo[i], hi[i], grid) for i in range(T.space.n)]
        cands = np.array(list(itertools.product(*axes)))
        cands = cands[np.asarray(T.domain.contains(cands), dtype=bool)]
    elif direct:
        return found
    else:
        raise ConfigError("no grid given for a continuous domain")

    if len(cands):
        res = T.residual(cands)
        for x in cands[np.atleast_1d(res) <= tol]:
            if not any(_pnorm(x - f, T.space.p) <= tol for f in found):
                found.append(x.copy())
    return found


def sample_points(domain: Domain, size: int, seed: int) -> np.ndarray:
    """Seeded points of the domain; a finite set is returned whole."""
    if isinstance(domain, PointSet):
        return domain.points.copy()
    if size < 1:
        raise ConfigError("sampling plan is empty")
    return domain.sample(np.random.default_rng(seed), size)


def sample_pairs(domain: Domain, size: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded pairs (x, y) of domain points; finite sets give every ordered pair."""
    if isinstance(domain, PointSet):
        pts = domain.points
        i, j = np.meshgrid(np.arange(len(pts)), np.arange(len(pts)), indexing="ij")
        return pts[i.ravel()], pts[j.ravel()]
    if size < 1:
        raise ConfigError("sampling plan is empty")
    rng = np.random.default_rng(seed)
    return domain.sample(rng, size), domain.sample(rng, size)
