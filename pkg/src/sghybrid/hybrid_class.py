"""The (alpha, beta, gamma, delta) symmetric generalized hybrid inequality.

A mapping T is a member of the class for a quadruple when

    alpha ||Tx-Ty||^2 + beta (||x-Ty||^2 + ||Tx-y||^2) + gamma ||x-y||^2
        + delta (||x-Tx||^2 + ||y-Ty||^2) <= 0

for every pair x, y of its domain.  The left side is linear in the four
parameters, which is what :func:`fit_sgh_cone` exploits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .banach_space import _pnorm
from .errors import ConfigError, SolverError
from .mappings import Mapping, sample_pairs

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SghParams:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ConfigError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.delta])

    def scaled(self, c: float) -> "SghParams":
        return SghParams(*(c * self.as_array()))

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta}

    @classmethod
    def from_config(cls, obj) -> "SghParams":
        """Accept a class name or an {"alpha": ..., ...} object."""
        if isinstance(obj, str):
            return named_class(obj)
        try:
            return cls(obj["alpha"], obj["beta"], obj["gamma"], obj["delta"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad parameter spec {obj!r}") from exc


NAMED_CLASSES = {
    "nonexpansive": SghParams(1, 0, -1, 0),
    "nonspreading": SghParams(2, -1, 0, 0),
    "hybrid": SghParams(3, -1, -1, 0),
}


def named_class(name: str) -> SghParams:
    try:
        return NAMED_CLASSES[name]
    except KeyError:
        raise ConfigError(f"unknown class {name!r}; expected one of {sorted(NAMED_CLASSES)}") from None


@dataclass(frozen=True)
class ConditionReport:
    """Parameter conditions used by the convergence theory.

    c1: alpha + 2 beta + gamma >= 0, c2: alpha + beta > 0, c3: beta <= 0,
    c4: delta >= 0.  ``contraction_ratio`` is -(beta + gamma)/(alpha + beta),
    defined when c2 holds; c1 and c2 together bound it above by 1.
    """

    c1: bool
    c2: bool
    c3: bool
    c4: bool
    contraction_ratio: float | None

    @property
    def quasi_nonexpansive_conditions(self) -> bool:
        return self.c1 and self.c2 and self.c4

    @property
    def all_hold(self) -> bool:
        return self.c1 and self.c2 and self.c3 and self.c4

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
                "contraction_ratio": self.contraction_ratio}


def validate_conditions(params: SghParams) -> ConditionReport:
    a, b, g, d = params.as_array()
    c2 = a + b > 0
    return ConditionReport(
        c1=bool(a + 2 * b + g >= 0),
        c2=bool(c2),
        c3=bool(b <= 0),
        c4=bool(d >= 0),
        contraction_ratio=float(-(b + g) / (a + b)) if c2 else None,
    )


def residual_terms(T: Mapping, x, y) -> np.ndarray:
    """Coefficients of the four parameters in the residual, shape ``(..., 4)``.

    Columns: ||Tx-Ty||^2, ||x-Ty||^2 + ||Tx-y||^2, ||x-y||^2,
    ||x-Tx||^2 + ||y-Ty||^2.
    """
    x = T.space.vector(x)
    y = T.space.vector(y)
    Tx, Ty = T(x), T(y)
    p = T.space.p

    def sq(v):
        return _pnorm(v, p) ** 2

    return np.stack([
        sq(Tx - Ty),
        sq(x - Ty) + sq(Tx - y),
        sq(x - y),
        sq(x - Tx) + sq(y - Ty),
    ], axis=-1)


def sgh_residual(T: Mapping, params: SghParams, x, y) -> float | np.ndarray:
    """Left side of the class inequality; membership means <= 0 for all pairs."""
    a, b, g, d = params.as_array()
    t = residual_terms(T, x, y)
    out = a * t[..., 0] + b * t[..., 1] + g * t[..., 2] + d * t[..., 3]
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class MembershipReport:
    max_violation: float
    witness: tuple[list, list]
    pairs_checked: int
    member: bool
    tol: float
    rows: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"max_violation": self.max_violation, "witness": list(self.witness),
                "pairs_checked": self.pairs_checked,
                "verdict": "member" if self.member else "violated", "tol": self.tol}

    def write_csv(self, fh, n: int):
        """One row per pair: x components, y components, residual."""
        if self.rows is None:
            raise ValueError("report was built without keep_rows=True")
        fh.write(",".join([f"x{i}" for i in range(n)] + [f"y{i}" for i in range(n)] + ["residual"]) + "\n")
        for row in self.rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _pairs(T: Mapping, pairs, size: int, seed: int):
    if pairs is None:
        return sample_pairs(T.domain, size, seed)
    x, y = (np.atleast_2d(T.space.vector(v)) for v in pairs)
    if len(x) == 0 or len(x) != len(y):
        raise ConfigError("pair list is empty or ragged")
    return x, y


def check_membership(T: Mapping, params: SghParams, pairs=None, *, size: int = 1000,
                     seed: int = 0, tol: float = DEFAULT_TOL, keep_rows: bool = False,
                     extra_pairs=None) -> MembershipReport:
    """Evaluate the residual over a pair sample and report the worst pair.

    ``pairs`` is an explicit ``(X, Y)`` batch; otherwise ``size`` pairs are
    drawn from the domain with ``seed`` (a finite domain gives all pairs).
    ``extra_pairs`` are appended to whichever sample is used.
    """
    x, y = _pairs(T, pairs, size, seed)
    if extra_pairs is not None:
        ex, ey = (np.atleast_2d(T.space.vector(v)) for v in extra_pairs)
        x, y = np.vstack([x, ex]), np.vstack([y, ey])
    res = np.atleast_1d(sgh_residual(T, params, x, y))
    k = int(np.argmax(res))
    worst = float(res[k])
    rows = np.column_stack([x, y, res]) if keep_rows else None
    return MembershipReport(worst, (x[k].tolist(), y[k].tolist()), len(res), worst <= tol, tol, rows)


@dataclass
class ConeFit:
    """Outcome of the parameter feasibility LP.

    When infeasible, ``min_max_violation`` certifies it: no quadruple on the
    slice alpha + beta = 1 inside the box keeps every sampled residual below
    that positive value.
    """

    feasible: bool
    params: SghParams | None
    radius: float | None
    min_max_violation: float | None
    pairs_used: int
    conditions_imposed: bool

    def to_dict(self) -> dict:
        return {"feasible": self.feasible,
                "params": None if self.params is None else self.params.to_dict(),
                "chebyshev_radius": self.radius,
                "min_max_violation": self.min_max_violation,
                "pairs_used": self.pairs_used,
                "conditions_imposed": self.conditions_imposed}


def fit_sgh_cone(T: Mapping, pairs=None, *, size: int = 500, seed: int = 0,
                 impose_conditions: bool = False, box: float = 10.0,
                 extra_pairs=None) -> ConeFit:
    """Find a quadruple making T a member over the sampled pairs.

    Solves {residual(x_i, y_i) <= 0, alpha + beta = 1, delta >= 0} (plus
    alpha + 2 beta + gamma >= 0 and beta <= 0 when ``impose_conditions``)
    inside the box [-box, box]^4 and returns its Chebyshev centre.  Radii
    are measured within the slice alpha + beta = 1.
    """
    x, y = _pairs(T, pairs, size, seed)
    if extra_pairs is not None:
        ex, ey = (np.atleast_2d(T.space.vector(v)) for v in extra_pairs)
        x, y = np.vstack([x, ex]), np.vstack([y, ey])
    rows = residual_terms(T, x, y)
    # residuals are quadratic in the coordinates; normalise rows for conditioning
    scale = np.abs(rows).max(axis=1, keepdims=True)
    rows = rows / np.where(scale > 0, scale, 1.0)
    rows = rows[np.any(rows != 0, axis=1)]
    A = [rows]
    if impose_conditions:
        A.append(np.array([[-1.0, -2.0, -1.0, 0.0],    # alpha + 2 beta + gamma >= 0
                           [0.0, 1.0, 0.0, 0.0]]))     # beta <= 0
    A.append(np.array([[0.0, 0.0, 0.0, -1.0]]))        # delta >= 0
    A_ub = np.vstack(A)
    b_ub = np.zeros(len(A_ub))
    A_eq = np.array([[1.0, 1.0, 0.0, 0.0]])
    b_eq = np.array([1.0])

    # the Chebyshev ball must also stay inside the box
    faces = np.vstack([np.eye(4), -np.eye(4)])
    A_cheb = np.vstack([A_ub, faces])
    b_cheb = np.r_[b_ub, np.full(8, box)]
    # distance within the slice uses the component orthogonal to (1, 1, 0, 0)
    e = A_eq[0] / np.linalg.norm(A_eq[0])
    tangential = np.linalg.norm(A_cheb - np.outer(A_cheb @ e, e), axis=1)
    c = np.zeros(5)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A_cheb, tangential[:, None]]), b_ub=b_cheb,
                  A_eq=np.hstack([A_eq, [[0.0]]]), b_eq=b_eq,
                  bounds=[(-box, box)] * 4 + [(0, None)], method="highs")
    n_pairs = len(x)
    if res.status == 0:
        return ConeFit(True, SghParams(*(res.x[:4] + 0.0)), float(res.x[4]), None, n_pairs, impose_conditions)
    if res.status != 2:
        raise SolverError(f"LP solver failed: {res.message}")

    # smallest achievable worst residual (on the normalised rows)
    m = len(rows)
    c2 = np.zeros(5)
    c2[-1] = 1.0
    A2 = np.hstack([A_ub, np.r_[-np.ones(m), np.zeros(len(A_ub) - m)][:, None]])
    res2 = linprog(c2, A_ub=A2, b_ub=b_ub, A_eq=np.hstack([A_eq, [[0.0]]]), b_eq=b_eq,
                   bounds=[(-box, box)] * 4 + [(None, None)], method="highs")
    if res2.status != 0:
        raise SolverError(f"certificate LP failed: {res2.message}")
    return ConeFit(False, None, None, float(res2.x[4]), n_pairs, impose_conditions)
