"""
工具模块
"""

from .timer import BudgetTimer, Timer
from .logger import ComponentLogger, Logger, default_logger, get_logger
from . import errors, rng

__all__ = [
    'Timer',
    'BudgetTimer',
    'Logger',
    'ComponentLogger',
    'default_logger',
    'get_logger',
    'errors',
    'rng',
]
