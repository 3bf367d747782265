"""Picard, Mann and Ishikawa iterations with traces and convergence checks.

Ishikawa weights follow the convention

    y_n     = (1 - lambda_n) x_n + lambda_n T x_n
    x_{n+1} = (1 - gamma_n) x_n + gamma_n T y_n

so lambda_n = 0 is a Mann step with weight 1 - gamma_n on x_n.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .banach_space import _pnorm
from .errors import ConfigError, DomainError, PreconditionError
from .mappings import FIXED_POINT_TOL, Mapping

DEFAULT_MAX_ITER = 10_000
DEFAULT_RESIDUAL_TOL = 1e-10
SCHEMES = ("picard", "mann", "ishikawa")


# -- schedules -----------------------------------------------------------------

@dataclass(frozen=True)
class Schedule:
    """A step-weight sequence indexed from n = 0.

    Families: ``constant`` (value c), ``harmonic`` (a + b/(n + 1)) and
    ``table`` (listed values, the last one repeated forever).  All flags
    are derived from the parameters, never from a finite prefix.
    """

    family: str
    params: tuple

    def __post_init__(self):
        fam, prm = self.family, tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", prm)
        if fam == "constant" and len(prm) != 1:
            raise ConfigError("constant schedule takes one value")
        elif fam == "harmonic" and len(prm) != 2:
            raise ConfigError("harmonic schedule takes (a, b)")
        elif fam == "table" and len(prm) < 1:
            raise ConfigError("table schedule needs at least one value")
        elif fam not in ("constant", "harmonic", "table"):
            raise ConfigError(f"unknown schedule family {fam!r}")
        if not all(np.isfinite(prm)):
            raise ConfigError("schedule parameters must be finite")

    @classmethod
    def constant(cls, c: float) -> "Schedule":
        return cls("constant", (c,))

    @classmethod
    def harmonic(cls, a: float, b: float) -> "Schedule":
        return cls("harmonic", (a, b))

    @classmethod
    def table(cls, values: Sequence[float]) -> "Schedule":
        return cls("table", tuple(values))

    def __call__(self, n: int) -> float:
        if self.family == "constant":
            return self.params[0]
        if self.family == "harmonic":
            a, b = self.params
            return a + b / (n + 1)
        return self.params[min(n, len(self.params) - 1)]

    # analytic properties
    @property
    def infimum(self) -> float:
        if self.family == "constant":
            return self.params[0]
        if self.family == "harmonic":
            a, b = self.params
            return min(a, a + b)
        return min(self.params)

    @property
    def supremum(self) -> float:
        if self.family == "constant":
            return self.params[0]
        if self.family == "harmonic":
            a, b = self.params
            return max(a, a + b)
        return max(self.params)

    @property
    def limit(self) -> float:
        if self.family == "harmonic":
            return self.params[0]
        return self.params[-1]

    @property
    def in_unit_interval(self) -> bool:
        return 0.0 <= self.infimum and self.supremum <= 1.0

    @property
    def bounded_below_by(self) -> float | None:
        """Largest a with a <= s_n for all n, when positive."""
        return self.infimum if self.infimum > 0 else None

    @property
    def liminf_positive_product(self) -> bool:
        """liminf s_n (1 - s_n) > 0; every family here converges, so this is
        a statement about the limit."""
        lim = self.limit
        return 0.0 < lim < 1.0

    def flags(self) -> dict:
        return {"in_unit_interval": self.in_unit_interval,
                "bounded_below_by": self.bounded_below_by,
                "liminf_positive_product": self.liminf_positive_product}

    def to_dict(self) -> dict:
        d: dict = {"family": self.family}
        if self.family == "constant":
            d["c"] = self.params[0]
        elif self.family == "harmonic":
            d["a"], d["b"] = self.params
        else:
            d["values"] = list(self.params)
        return d

    @classmethod
    def from_config(cls, obj) -> "Schedule":
        """Accept a bare number or {"family": ..., ...}; any ``declared``
        flags must agree with the analytic ones."""
        if isinstance(obj, Schedule):
            return obj
        if isinstance(obj, (int, float)):
            return cls.constant(obj)
        try:
            fam = obj["family"]
            if fam == "constant":
                s = cls.constant(obj["c"])
            elif fam == "harmonic":
                s = cls.harmonic(obj["a"], obj["b"])
            elif fam == "table":
                s = cls.table(obj["values"])
            else:
                raise ConfigError(f"unknown schedule family {fam!r}")
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad schedule spec {obj!r}") from exc
        actual = s.flags()
        for key, declared in obj.get("declared", {}).items():
            if key not in actual:
                raise ConfigError(f"unknown schedule flag {key!r}")
            if declared != actual[key]:
                raise ConfigError(f"declared {key}={declared!r} contradicts the schedule ({actual[key]!r})")
        return s


@dataclass(frozen=True)
class ConditionVerdict:
    name: str
    holds: bool
    detail: str

    def to_dict(self) -> dict:
        return {"condition": self.name, "holds": self.holds, "detail": self.detail}


def validate_schedule(s: Schedule, role: str) -> list[ConditionVerdict]:
    """Convergence hypotheses for a schedule used as ``lambda``, ``gamma``
    or ``alpha`` (Mann weight)."""
    out = [ConditionVerdict("0 <= s_n <= 1", s.in_unit_interval,
                            f"inf={s.infimum:g}, sup={s.supremum:g}")]
    if role == "lambda":
        lim = s.limit
        out.append(ConditionVerdict("liminf s_n(1 - s_n) > 0", s.liminf_positive_product,
                                    f"liminf = {lim * (1 - lim):g}"))
    elif role == "gamma":
        out.append(ConditionVerdict("0 < a <= s_n", s.bounded_below_by is not None,
                                    f"a = {s.infimum:g}"))
    elif role != "alpha":
        raise ConfigError(f"unknown schedule role {role!r}")
    return out


def _as_schedule(s) -> Schedule | None:
    return None if s is None else Schedule.from_config(s)


# -- steps ---------------------------------------------------------------------

def mann_step(T: Mapping, x, alpha: float, Tx=None) -> np.ndarray:
    """alpha x + (1 - alpha) T x."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Mann weight {alpha} outside [0, 1]")
    x = T.space.vector(x)
    Tx = T(x) if Tx is None else Tx
    return alpha * x + (1.0 - alpha) * Tx


def _pull_in(T: Mapping, z: np.ndarray, what: str) -> np.ndarray:
    if T.domain.contains(z):
        return z
    near = T.domain.nearby(z, FIXED_POINT_TOL)
    if near is None:
        raise DomainError(f"{what} left the domain")
    return near


def ishikawa_step(T: Mapping, x, lam: float, gam: float, Tx=None) -> tuple[np.ndarray, np.ndarray]:
    """Return (y_n, x_{n+1}) for weights lambda_n in [0, 1], gamma_n in (0, 1]."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda_n = {lam} outside [0, 1]")
    if not 0.0 < gam <= 1.0:
        raise ValueError(f"gamma_n = {gam} outside (0, 1]")
    x = T.space.vector(x)
    Tx = T(x) if Tx is None else Tx
    y = _pull_in(T, (1.0 - lam) * x + lam * Tx, "auxiliary iterate")
    x_next = (1.0 - gam) * x + gam * T(y)
    return y, x_next


# -- traces --------------------------------------------------------------------

@dataclass
class IterationTrace:
    scheme: str
    iterates: np.ndarray                 # (N+1, n): x_0 ... x_N
    residuals: np.ndarray                # (N+1,): ||x_k - T x_k||
    fixed_points: list[np.ndarray]
    fixed_point_distances: np.ndarray    # (len(fixed_points), N+1)
    stop_reason: str
    residual_tol: float
    schedules: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)   # role -> (N,) weights used
    auxiliary: np.ndarray | None = None  # (N, n): y_0 ... y_{N-1}
    p: float = 2.0

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def final_residual(self) -> float:
        return float(self.residuals[-1])

    def write_csv(self, fh):
        """Columns n, x0..x{d-1}, residual, dist_q0, ...; 17 significant digits."""
        d = self.iterates.shape[1]
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", *(f"x{i}" for i in range(d)), "residual",
                    *(f"dist_q{j}" for j in range(len(self.fixed_points)))])
        for k in range(len(self.iterates)):
            w.writerow([k, *(f"{v:.17g}" for v in self.iterates[k]), f"{self.residuals[k]:.17g}",
                        *(f"{v:.17g}" for v in self.fixed_point_distances[:, k])])

    def summary(self) -> dict:
        return {"scheme": self.scheme, "iterations": self.steps,
                "final_iterate": self.final.tolist(), "final_residual": self.final_residual,
                "stop_reason": self.stop_reason, "residual_tol": self.residual_tol,
                "schedules": {k: v.to_dict() for k, v in self.schedules.items()}}


def iterate(T: Mapping, x0, scheme: str = "ishikawa", *, lam=None, gam=None, alpha=None,
            residual_tol: float = DEFAULT_RESIDUAL_TOL, max_iter: int = DEFAULT_MAX_ITER,
            fixed_points=None) -> IterationTrace:
    """Run an iteration from x0 until ||x_n - Tx_n|| <= residual_tol or
    ``max_iter`` steps.

    Schedules may be :class:`Schedule` objects, config dicts or plain
    numbers (constants).  Ishikawa needs ``lam`` and ``gam``; Mann needs
    ``alpha``.  Iterates that leave a box or ball by at most 1e-12 are pulled
    back; a larger exit ends the run with stop reason ``domain-exit``.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    schedules: dict[str, Schedule] = {}
    if scheme == "ishikawa":
        if lam is None or gam is None:
            raise ConfigError("ishikawa needs both lambda and gamma schedules")
        schedules = {"lambda": _as_schedule(lam), "gamma": _as_schedule(gam)}
    elif scheme == "mann":
        if alpha is None:
            raise ConfigError("mann needs an alpha schedule")
        schedules = {"alpha": _as_schedule(alpha)}
    for role, s in schedules.items():
        if not s.in_unit_interval:
            raise ConfigError(f"{role} schedule leaves [0, 1]")
    if scheme == "ishikawa" and schedules["gamma"].bounded_below_by is None:
        raise ConfigError("gamma schedule must stay positive")

    fps = [T.space.vector(q) for q in (T.fixed_points if fixed_points is None else fixed_points)]
    x = T.space.vector(x0)
    if not T.domain.contains(x):
        raise DomainError("starting point outside the domain")

    xs, res, ys = [x], [], []
    weights: dict[str, list] = {role: [] for role in schedules}
    stop = "max-iterations"
    for n in range(max_iter + 1):
        Tx = T(x)
        r = float(_pnorm(x - Tx, T.space.p))
        res.append(r)
        if r <= residual_tol:
            stop = "residual-tolerance"
            break
        if n == max_iter:
            break
        try:
            if scheme == "picard":
                x_next = Tx
            elif scheme == "mann":
                a = schedules["alpha"](n)
                x_next = mann_step(T, x, a, Tx)
                weights["alpha"].append(a)
            else:
                lam_n, gam_n = schedules["lambda"](n), schedules["gamma"](n)
                y, x_next = ishikawa_step(T, x, lam_n, gam_n, Tx)
                weights["lambda"].append(lam_n)
                weights["gamma"].append(gam_n)
                ys.append(y)
            x = _pull_in(T, x_next, "iterate")
        except DomainError:
            for w in weights.values():
                del w[n:]
            del ys[n:]
            stop = "domain-exit"
            break
        xs.append(x)

    iterates = np.array(xs)
    dists = (np.array([_pnorm(iterates - q, T.space.p) for q in fps]) if fps
             else np.zeros((0, len(iterates))))
    return IterationTrace(
        scheme=scheme, iterates=iterates, residuals=np.array(res), fixed_points=fps,
        fixed_point_distances=dists, stop_reason=stop, residual_tol=residual_tol,
        schedules=schedules, weights={k: np.array(v) for k, v in weights.items()},
        auxiliary=np.array(ys) if scheme == "ishikawa" and ys else None, p=T.space.p)


# -- checks --------------------------------------------------------------------

@dataclass
class FejerVerdict:
    passed: bool
    worst_index: int | None
    worst_excess: float

    def to_dict(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail",
                "worst_index": self.worst_index, "worst_excess": self.worst_excess}


def fejer_check(trace: IterationTrace, q, slack: float = 0.0) -> FejerVerdict:
    """||x_{n+1} - q|| <= ||x_n - q|| + slack for every recorded n."""
    q = np.asarray(q, dtype=float)
    d = _pnorm(trace.iterates - q, trace.p)
    if len(d) < 2:
        return FejerVerdict(True, None, -np.inf)
    inc = np.diff(d)
    k = int(np.argmax(inc))
    return FejerVerdict(bool(inc[k] <= slack), k, float(inc[k]))


@dataclass
class DecayVerdict:
    status: str                      # pass | fail | hypothesis-violated
    worst_index: int | None
    worst_excess: float
    final_residual: float
    hypotheses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"verdict": self.status, "worst_index": self.worst_index,
                "worst_excess": self.worst_excess, "final_residual": self.final_residual,
                "hypotheses": [h.to_dict() for h in self.hypotheses]}


def residual_decay_check(trace: IterationTrace, q, g: Callable, slack: float = 1e-9) -> DecayVerdict:
    """Per-step energy decrease of an Ishikawa run towards a fixed point q:

        a lambda_n (1 - lambda_n) g(||x_n - T x_n||) <= ||x_n - q||^2 - ||x_{n+1} - q||^2

    with a the analytic lower bound of the gamma schedule.  The verdict is
    ``hypothesis-violated`` when the schedules fail the convergence
    hypotheses (the run is then not a counterexample), ``fail`` when the
    inequality breaks or the final residual misses the stop tolerance.
    """
    if trace.scheme != "ishikawa":
        raise PreconditionError("residual decay applies to ishikawa traces")
    hyps = (validate_schedule(trace.schedules["lambda"], "lambda")
            + validate_schedule(trace.schedules["gamma"], "gamma"))
    a = trace.schedules["gamma"].infimum
    lam = trace.weights["lambda"]
    q = np.asarray(q, dtype=float)
    d2 = _pnorm(trace.iterates - q, trace.p) ** 2
    N = trace.steps
    lhs = a * lam * (1 - lam) * np.asarray(g(trace.residuals[:N]), dtype=float)
    excess = lhs - (d2[:N] - d2[1:])
    if N:
        k = int(np.argmax(excess))
        worst_k, worst = k, float(excess[k])
    else:
        worst_k, worst = None, -np.inf
    final = trace.final_residual
    if not all(h.holds for h in hyps):
        status = "hypothesis-violated"
    elif worst > slack or final > trace.residual_tol:
        status = "fail"
    else:
        status = "pass"
    return DecayVerdict(status, worst_k, worst, final, hyps)
