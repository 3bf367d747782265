"""Built-in example mappings used by the theorem suites and the CLI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banach_space import SpaceSpec
from .mappings import (Affine, Ball, Box, Constant, Identity, Mapping, MetricProjection,
                       Negation, PointSet, Scaling, Table, WholeSpace)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    mapping: Mapping
    role: str = "member"      # member | negative-control | fixed-point-free


def builtin_zoo(seed: int = 0) -> list[ZooEntry]:
    R1 = SpaceSpec(1, 2.0)
    R2 = SpaceSpec(2, 2.0)
    L3 = SpaceSpec(2, 3.0)
    L4 = SpaceSpec(2, 4.0)
    L15 = SpaceSpec(3, 1.5)
    kw = {"seed": seed}

    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    line = PointSet(R1, [[0.0], [1.0], [2.0], [2.5]])

    return [
        ZooEntry("identity-box", Identity(Box(R2, -1, 1), [[0, 0], [0.5, -0.5]], **kw)),
        ZooEntry("constant-ball", Constant(Ball(R2, 1.0), [0.3, -0.2], [[0.3, -0.2]], **kw)),
        ZooEntry("projection-box", MetricProjection(Box(R2, -3, 3), Box(R2, 0, 1),
                                                    [[0.5, 0.5], [0, 0], [1, 1]], **kw)),
        ZooEntry("projection-ball", MetricProjection(WholeSpace(R2), Ball(R2, 1.0),
                                                     [[0.6, 0.8], [0, 0]], **kw)),
        ZooEntry("halving-line", Scaling(WholeSpace(R1), 0.5, [[0.0]], **kw)),
        ZooEntry("negation-line", Negation(WholeSpace(R1), [[0.0]], **kw)),
        ZooEntry("negation-l3", Negation(Ball(L3, 2.0), [[0, 0]], **kw)),
        ZooEntry("rotation-plane", Affine(WholeSpace(R2), rot, None, [[0, 0]], **kw)),
        ZooEntry("swap-l4", Affine(WholeSpace(L4), swap, None, [[0, 0], [1, 1]], **kw)),
        ZooEntry("halving-l1.5", Scaling(Box(L15, -2, 2), 0.5, [[0, 0, 0]], **kw)),
        ZooEntry("affine-contraction", Affine(WholeSpace(R2), np.diag([0.5, 1 / 3]), [1, 1],
                                              [[2.0, 1.5]], **kw)),
        # 0, 1, 2 -> 0 and 2.5 -> 1: nonspreading, not nonexpansive (|T2.5 - T2| = 1 > 0.5)
        ZooEntry("nonspreading-table", Table(line, [[0.0], [0.0], [0.0], [1.0]], [[0.0]], **kw)),
        ZooEntry("doubling", Scaling(WholeSpace(R1), 2.0, [[0.0]], **kw), "negative-control"),
        ZooEntry("shift", Affine(WholeSpace(R1), [[1.0]], [1.0], **kw), "fixed-point-free"),
    ]


def zoo_entry(name: str, seed: int = 0) -> ZooEntry:
    for e in builtin_zoo(seed):
        if e.name == name:
            return e
    raise KeyError(name)
