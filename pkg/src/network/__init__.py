"""
网络模型模块
"""

from .topology import (
    SingleAgentSchedule,
    TopologySchedule,
    WeightMatrix,
    generate_schedule,
    is_window_connected,
    metropolis_weights,
    sinkhorn_repair,
    validate_schedule,
    weight_matrix_at,
)
from .mixing import MixingConstants, lemma1_violations, mixing_constants, transition_product


__all__ = [
    'SingleAgentSchedule',
    'TopologySchedule',
    'WeightMatrix',
    'generate_schedule',
    'weight_matrix_at',
    'is_window_connected',
    'metropolis_weights',
    'sinkhorn_repair',
    'validate_schedule',
    'MixingConstants',
    'mixing_constants',
    'transition_product',
    'lemma1_violations',
]
