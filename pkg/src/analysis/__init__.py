"""
分析模块
试验集合统计、理论界求值、速率拟合与检查报告
"""

from .constants import BoundConstants, compute_bound_constants, psi_gap
from .bounds import (
    RegimeBound,
    corollary1_bound,
    corollary1_constant,
    corollary2_bound,
    corollary2_constant,
    corollary3_bound,
    corollary3_constant,
    corollary3_prime_bound,
    corollary3_prime_constant,
    corollary3_rate,
    corollary4_regime,
    lemma4_bound,
    lemma5_bound,
    lemma10_bound,
    mixed_tail,
    proposition1_bound,
    proposition2_bound,
    proposition3_bound,
    theorem1_bound,
    theorem1_sum_bound,
    theorem2_bound,
    theorem3_bound,
    theorem3_sum_bound,
    theorem4_bound,
)
from .ensemble import ErrorCurve, TrialEnsemble, expected_error_curve
from .rates import RateFit, fit_rate, regime_check, tail_window
from .checks import (
    CheckReport,
    almost_sure_diagnostics,
    disagreement_report,
    domination_check,
    expected_bound,
    high_prob_check,
    lemma4_report,
    lemma7_report,
)

__all__ = [
    'BoundConstants',
    'compute_bound_constants',
    'psi_gap',
    'RegimeBound',
    'corollary1_bound',
    'corollary1_constant',
    'corollary2_bound',
    'corollary2_constant',
    'corollary3_bound',
    'corollary3_constant',
    'corollary3_prime_bound',
    'corollary3_prime_constant',
    'corollary3_rate',
    'corollary4_regime',
    'lemma4_bound',
    'lemma5_bound',
    'lemma10_bound',
    'mixed_tail',
    'proposition1_bound',
    'proposition2_bound',
    'proposition3_bound',
    'theorem1_bound',
    'theorem1_sum_bound',
    'theorem2_bound',
    'theorem3_bound',
    'theorem3_sum_bound',
    'theorem4_bound',
    'ErrorCurve',
    'TrialEnsemble',
    'expected_error_curve',
    'RateFit',
    'fit_rate',
    'regime_check',
    'tail_window',
    'CheckReport',
    'almost_sure_diagnostics',
    'disagreement_report',
    'domination_check',
    'expected_bound',
    'high_prob_check',
    'lemma4_report',
    'lemma7_report',
]
