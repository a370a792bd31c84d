"""
算法模块
DSCMD-N 与 DSCDA-N 的单步更新、运行引擎与轨迹记录
"""

from .stepsize import StepsizeSchedule, alpha
from .state import AgentState, NetworkState, initial_state
from .context import METHOD_VARIANT, METHODS, RunConfig, RunContext, query_sup_norm
from .dscmd import dscmd_step, noisy_mix
from .dscda import dscda_step
from .recorder import RunTrace, TraceRecorder, checkpoint_grid
from .factory import ExperimentFactory
from .engine import SimulationEngine, run, run_ensemble, run_trial
from .twin import centralized_twin, projected_subgradient_reference

__all__ = [
    'StepsizeSchedule',
    'alpha',
    'AgentState',
    'NetworkState',
    'initial_state',
    'METHODS',
    'METHOD_VARIANT',
    'RunConfig',
    'RunContext',
    'query_sup_norm',
    'dscmd_step',
    'dscda_step',
    'noisy_mix',
    'RunTrace',
    'TraceRecorder',
    'checkpoint_grid',
    'ExperimentFactory',
    'SimulationEngine',
    'run',
    'run_trial',
    'run_ensemble',
    'centralized_twin',
    'projected_subgradient_reference',
]
