"""
实验模块
配置解析、实验执行、验收实验、产物写出与命令行子命令
"""

from .config import ACCEPTANCE_NAMES, ExperimentConfig, SimConfig
from .artifacts import ArtifactWriter, numeric_digest
from .runner import ExperimentResult, run_experiment
from .acceptance import ACCEPTANCE_EXPERIMENTS, brute_force_argmin, run_acceptance
from .commands import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    cmd_run,
    cmd_sweep,
    cmd_verify,
    default_jobs,
    parse_values,
)

__all__ = [
    'ACCEPTANCE_NAMES',
    'ExperimentConfig',
    'SimConfig',
    'ArtifactWriter',
    'numeric_digest',
    'ExperimentResult',
    'run_experiment',
    'ACCEPTANCE_EXPERIMENTS',
    'brute_force_argmin',
    'run_acceptance',
    'EXIT_OK',
    'EXIT_CHECK_FAILED',
    'EXIT_VALIDATION',
    'EXIT_RUNTIME',
    'cmd_run',
    'cmd_verify',
    'cmd_sweep',
    'default_jobs',
    'parse_values',
]
