"""
几何模块
镜像映射、约束集合、正则项与两类内层求解
"""

from .mirror_maps import (
    EuclideanMap,
    MirrorMap,
    NegEntropyMap,
    PNormSqMap,
    bregman,
    make_mirror_map,
    separate_convexity_check,
)
from .constraint_sets import Box, ConstraintSet, EuclideanBall, Simplex, make_constraint_set, project_simplex
from .regularizers import Regularizer, make_regularizer, soft_threshold
from .inner_solvers import (
    constrained_prox,
    dual_averaging_projection,
    dual_optimality_residual,
    mirror_step,
    optimality_residual,
)

__all__ = [
    'MirrorMap',
    'EuclideanMap',
    'NegEntropyMap',
    'PNormSqMap',
    'make_mirror_map',
    'bregman',
    'separate_convexity_check',
    'ConstraintSet',
    'Box',
    'EuclideanBall',
    'Simplex',
    'make_constraint_set',
    'project_simplex',
    'Regularizer',
    'make_regularizer',
    'soft_threshold',
    'constrained_prox',
    'mirror_step',
    'dual_averaging_projection',
    'optimality_residual',
    'dual_optimality_residual',
]
