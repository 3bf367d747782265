"""Symmetric generalized hybrid mappings in finite-dimensional l^p spaces."""
from .banach_space import (PiecewiseLinearModulus, SpaceSpec, duality_gap, duality_map,
                           estimate_g, hilbert_modulus, modulus_for, norm, norm_sq, pairing,
                           xu_gap)
from .errors import ConfigError, DimensionError, DomainError, PreconditionError, SolverError
from .hybrid_class import (NAMED_CLASSES, ConditionReport, ConeFit, MembershipReport, SghParams,
                           check_membership, fit_sgh_cone, named_class, sgh_residual,
                           validate_conditions)
from .iteration import (IterationTrace, Schedule, fejer_check, ishikawa_step, iterate, mann_step,
                        residual_decay_check, validate_schedule)
from .mappings import (Affine, Ball, Box, Constant, Identity, Mapping, MetricProjection, Negation,
                       PointSet, Scaling, Table, WholeSpace, fixed_points_bruteforce,
                       mapping_from_dict)
from .properties import (check_firmly_nonexpansive, check_quasi_nonexpansive,
                         demiclosedness_probe, firmly_ne_embedding_params,
                         orbit_boundedness_probe)
from .zoo import builtin_zoo, zoo_entry

__all__ = [name for name in dir() if not name.startswith("_")]
