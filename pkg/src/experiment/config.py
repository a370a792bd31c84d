"""
实验配置模块
定义全部配置键的默认值、取值范围与基准预设，并负责合并与校验
"""

import copy
import json
import os

from algorithms.context import METHOD_VARIANT
from geometry.constraint_sets import SET_KINDS
from geometry.mirror_maps import MAP_KINDS
from geometry.regularizers import REGULARIZER_KINDS
from network.topology import TopologySchedule
from noise.sampler import LinkNoiseSampler
from problems.benchmarks import BENCHMARK_PROBLEMS
from problems.objectives import OBJECTIVE_KINDS
from utils.errors import ConfigMismatch, ValidationError

ACCEPTANCE_NAMES = (
    "corollary1_rate", "corollary4_regimes", "lemma1_mixing", "theorem_domination", "lemma_invariants",
    "inner_solver_oracle", "high_prob_dscmd", "high_prob_dscda", "degeneracy", "determinism",
)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _int_at_least(lower):
    return lambda v: _is_int(v) and v >= lower


def _number_in(lower, upper, lower_open=False, upper_open=False):
    def check(v):
        if not _is_number(v):
            return False
        if lower is not None and (v <= lower if lower_open else v < lower):
            return False
        if upper is not None and (v >= upper if upper_open else v > upper):
            return False
        return True
    return check


def _one_of(options):
    return lambda v: v in options


def _optional(check):
    return lambda v: v is None or check(v)


def _level_name(v):
    return isinstance(v, str) and v.upper() in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _is_bool(v):
    return isinstance(v, bool)


def _is_dict(v):
    return isinstance(v, dict)


class SimConfig:
    """
    仿真配置类
    """
    # 网络配置
    N_AGENTS = 10
    WINDOW_B = 1
    THETA = 0.05
    TOPOLOGY_KIND = "static_ring"
    TOPOLOGY_SEED = 0
    EDGE_PROB = 0.3

    # 链路噪声配置
    NOISE_NU = 0.01
    NOISE_KAPPA2 = 1.0
    NOISE_DIST = "uniform_ball"
    NOISE_ZERO_MEAN = True
    NOISE_SEED = 0

    # 几何配置
    MIRROR_MAP = "euclidean_half_sq_norm"
    PROXIMAL_PSI = "euclidean_half_sq_norm"
    ENTROPY_FLOOR = 1e-12
    P_NORM = 1.5

    # 问题配置
    PROBLEM_VARIANT = "problem1"
    OBJECTIVE_KIND = "least_abs_dev"
    DIM = 5
    SAMPLES_PER_AGENT = 20
    DATA_SEED = 0
    SET_KIND = "box"
    SET_PARAMS = {}
    REGULARIZER_LOCAL = "l1"
    REGULARIZER_GLOBAL = "zero"
    LAMBDA1 = 0.01
    LAMBDA2 = 0.0
    GRAD_NOISE_SIGMA = 0.1
    GRAD_BOUNDED = False

    # 算法配置
    METHOD = "dscmd_n"
    HORIZON_T = 1000
    KAPPA1 = 0.5
    CHECKPOINTS = {"per_decade": 40, "cap": 200, "spacing": "log"}
    INIT_OVERRIDE = None
    MASTER_SEED = 0
    TRACK_MIN = True

    # 分析配置
    TRIALS_M = 20
    DELTA = 0.1
    FIT_WINDOW = None
    THRESHOLDS = {}

    # 命令行配置
    BENCHMARK = None
    OUTPUT_DIR = "results"
    PLOT = False
    VERIFY = None
    LOG_LEVEL = "INFO"

    # 键 -> (检查函数, 允许范围描述)
    SCHEMA = {
        "n_agents": (_int_at_least(1), ">= 1"),
        "window_B": (_int_at_least(1), ">= 1"),
        "theta": (_number_in(0.0, 1.0, lower_open=True, upper_open=True), "(0, 1/N]"),
        "topology_kind": (_one_of(TopologySchedule.KINDS), str(list(TopologySchedule.KINDS))),
        "topology_seed": (_int_at_least(0), ">= 0"),
        "edge_prob": (_number_in(0.0, 1.0, lower_open=True), "(0, 1]"),
        "noise_nu": (_number_in(0.0, None), "[0, inf)"),
        "noise_kappa2": (_number_in(0.0, 1.0, lower_open=True), "(0, 1]"),
        "noise_dist": (_one_of(LinkNoiseSampler.DISTS), str(list(LinkNoiseSampler.DISTS))),
        "noise_zero_mean": (_is_bool, "true / false"),
        "noise_seed": (_int_at_least(0), ">= 0"),
        "mirror_map": (_one_of(MAP_KINDS), str(list(MAP_KINDS))),
        "proximal_psi": (_one_of(MAP_KINDS), str(list(MAP_KINDS))),
        "entropy_floor": (_number_in(0.0, 1e-3, lower_open=True), "(0, 1e-3]"),
        "p_norm": (_number_in(1.0, 2.0, lower_open=True), "(1, 2]"),
        "problem_variant": (_one_of(("problem1", "problem2")), "['problem1', 'problem2']"),
        "objective_kind": (_one_of(OBJECTIVE_KINDS), str(list(OBJECTIVE_KINDS))),
        "dim": (_int_at_least(1), ">= 1"),
        "samples_per_agent": (_int_at_least(1), ">= 1"),
        "data_seed": (_int_at_least(0), ">= 0"),
        "set_kind": (_one_of(SET_KINDS), str(list(SET_KINDS))),
        "set_params": (_is_dict, "object"),
        "regularizer_local": (_one_of(REGULARIZER_KINDS), str(list(REGULARIZER_KINDS))),
        "regularizer_global": (_one_of(REGULARIZER_KINDS), str(list(REGULARIZER_KINDS))),
        "lambda1": (_number_in(0.0, None), "[0, inf)"),
        "lambda2": (_number_in(0.0, None), "[0, inf)"),
        "grad_noise_sigma": (_number_in(0.0, None), "[0, inf)"),
        "grad_bounded": (_is_bool, "true / false"),
        "method": (_one_of(("dscmd_n", "dscda_n")), "['dscmd_n', 'dscda_n']"),
        "horizon_T": (_int_at_least(0), ">= 0"),
        "kappa1": (_number_in(0.0, 1.0, lower_open=True, upper_open=True), "(0, 1)"),
        "checkpoints": (_is_dict, "object with per_decade, cap, spacing"),
        "init_override": (_optional(lambda v: isinstance(v, list)), "null or N x dim array"),
        "master_seed": (_int_at_least(0), ">= 0"),
        "track_min": (_is_bool, "true / false"),
        "trials_M": (_int_at_least(1), ">= 1"),
        "delta": (_number_in(0.0, 1.0, lower_open=True), "(0, 1]"),
        "fit_window": (_optional(lambda v: isinstance(v, list) and len(v) == 2), "null or [lower, upper]"),
        "thresholds": (_is_dict, "object"),
        "benchmark": (_optional(_one_of(tuple(BENCHMARK_PROBLEMS))), str(sorted(BENCHMARK_PROBLEMS))),
        "output_dir": (lambda v: isinstance(v, str) and v != "", "non-empty path"),
        "plot": (_is_bool, "true / false"),
        "verify": (_optional(_is_dict), "null or object with name and expect"),
        "log_level": (_level_name, "DEBUG..CRITICAL, any case"),
    }

    # 配置文件与 sweep 轴可用的简写
    ALIASES = {"kappa2": "noise_kappa2", "nu": "noise_nu", "N": "n_agents"}

    SWEEP_AXES = ("kappa1", "noise_kappa2", "noise_nu", "n_agents")

    # 基准实例的非问题部分；问题部分取自 BENCHMARK_PROBLEMS
    BENCHMARK_PRESETS = {
        "a": {
            "method": "dscmd_n",
            "mirror_map": "euclidean_half_sq_norm",
            "n_agents": 10,
            "theta": 0.05,
            "topology_kind": "random_B_connected",
            "window_B": 2,
            "noise_dist": "uniform_ball",
            "noise_nu": 0.01,
            "grad_noise_sigma": 0.1,
        },
        "b": {
            "method": "dscda_n",
            "proximal_psi": "euclidean_half_sq_norm",
            "n_agents": 10,
            "theta": 0.05,
            "topology_kind": "periodic_partition",
            "window_B": 2,
            "noise_dist": "uniform_ball",
            "noise_nu": 0.01,
            "grad_noise_sigma": 0.1,
        },
        "c": {
            "method": "dscmd_n",
            "mirror_map": "neg_entropy",
            "n_agents": 4,
            "theta": 0.1,
            "topology_kind": "static_ring",
            "window_B": 1,
            "noise_dist": "zero",
            "grad_noise_sigma": 0.0,
        },
    }

    @classmethod
    def get_defaults(cls):
        """
        获取全部键的默认值

        Returns:
            dict: 默认配置（深拷贝）
        """
        return {key: copy.deepcopy(getattr(cls, key.upper())) for key in cls.SCHEMA}

    @classmethod
    def get_benchmark_settings(cls, name):
        """
        获取基准实例的完整预设

        Args:
            name (str): a / b / c

        Returns:
            dict: 预设键值
        """
        if name not in cls.BENCHMARK_PRESETS:
            raise ValidationError(f"unknown benchmark {name!r}", key="benchmark",
                                  admissible=str(sorted(cls.BENCHMARK_PRESETS)))
        settings = copy.deepcopy(BENCHMARK_PROBLEMS[name])
        settings.update(copy.deepcopy(cls.BENCHMARK_PRESETS[name]))
        return settings

    @classmethod
    def canonical_key(cls, key):
        return cls.ALIASES.get(key, key)


class ExperimentConfig:
    """
    解析并校验后的实验配置

    合并顺序：默认值 <- 基准预设 <- 文件键 <- 命令行覆盖。
    """
    def __init__(self, params, source=None):
        self.params = params
        self.source = source

    @classmethod
    def from_dict(cls, data, overrides=None, source=None):
        """
        由字典构造

        Args:
            data (dict): 配置键值（允许简写）
            overrides (dict): 命令行覆盖
            source (str): 来源路径，仅作记录

        Returns:
            ExperimentConfig: 已校验的配置

        Raises:
            ValidationError: 未知键、类型或取值不合法
        """
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object", key="<root>")
        given = cls._normalize(data)
        extra = cls._normalize(overrides or {})
        params = SimConfig.get_defaults()
        benchmark = extra.get("benchmark", given.get("benchmark"))
        if benchmark is not None:
            params.update(SimConfig.get_benchmark_settings(benchmark))
        params.update(given)
        params.update(extra)
        if "problem_variant" not in given and "problem_variant" not in extra:
            # 未显式给出时随方法取对应的问题形式
            params["problem_variant"] = METHOD_VARIANT.get(params["method"], params["problem_variant"])
        cls._validate(params)
        return cls(params, source)

    @classmethod
    def from_file(cls, path, overrides=None):
        """
        读取 JSON 配置文件
        """
        if not os.path.isfile(path):
            raise ValidationError(f"config file {path!r} not found", key="config")
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ValidationError(f"config file {path!r} is not valid JSON: {e}", key="config") from e
        return cls.from_dict(data, overrides, source=path)

    @staticmethod
    def _normalize(data):
        out = {}
        for key, value in data.items():
            canonical = SimConfig.canonical_key(key)
            if canonical not in SimConfig.SCHEMA:
                raise ValidationError(f"unknown config key {key!r}", key=key)
            out[canonical] = copy.deepcopy(value)
        return out

    @staticmethod
    def _validate(params):
        for key, (check, admissible) in SimConfig.SCHEMA.items():
            if not check(params[key]):
                raise ValidationError(f"invalid value {params[key]!r}", key=key, admissible=admissible)

        n = params["n_agents"]
        if n >= 2 and params["theta"] > 1.0 / n:
            raise ValidationError(f"theta={params['theta']} exceeds 1/N", key="theta", admissible=f"(0, {1.0 / n:g}]")
        expected = METHOD_VARIANT[params["method"]]
        if params["problem_variant"] != expected:
            raise ConfigMismatch(f"{params['method']} runs on {expected}", key="problem_variant", admissible=expected)
        if params["method"] == "dscmd_n" and params["mirror_map"] == "p_norm_sq":
            raise ValidationError("dscmd_n needs a mirror map with finite gradient Lipschitz constant",
                                  key="mirror_map", admissible="euclidean_half_sq_norm, neg_entropy")
        geometry_key = "mirror_map" if params["method"] == "dscmd_n" else "proximal_psi"
        if params[geometry_key] == "neg_entropy" and params["set_kind"] != "simplex":
            raise ValidationError(f"neg_entropy is only defined on the simplex, got set_kind={params['set_kind']!r}",
                                  key=geometry_key, admissible="simplex")
        if params["noise_dist"] != "zero" and not params["noise_nu"] > 0.0:
            raise ValidationError("noise second-moment bound must be positive", key="noise_nu", admissible="(0, inf)")

        cp = params["checkpoints"]
        unknown = set(cp) - {"per_decade", "cap", "spacing", "count"}
        if unknown:
            raise ValidationError(f"unknown checkpoint keys {sorted(unknown)}", key="checkpoints")
        cp.setdefault("per_decade", SimConfig.CHECKPOINTS["per_decade"])
        cp.setdefault("cap", SimConfig.CHECKPOINTS["cap"])
        cp.setdefault("spacing", "log")
        if "count" in cp:
            cp["cap"] = cp.pop("count")
        if not (_is_int(cp["per_decade"]) and cp["per_decade"] >= 1 and _is_int(cp["cap"]) and cp["cap"] >= 1):
            raise ValidationError("checkpoint density must be positive integers", key="checkpoints",
                                  admissible="per_decade >= 1, cap >= 1")
        if cp["spacing"] != "log":
            raise ValidationError(f"unsupported spacing {cp['spacing']!r}", key="checkpoints", admissible="log")

        window = params["fit_window"]
        if window is not None and not (_is_int(window[0]) and _is_int(window[1]) and 1 <= window[0] < window[1]):
            raise ValidationError(f"bad fit window {window}", key="fit_window", admissible="1 <= lower < upper")
        for name, value in params["thresholds"].items():
            if not _is_number(value):
                raise ValidationError(f"threshold {name!r} must be a number", key="thresholds")

        verify = params["verify"]
        if verify is not None:
            if verify.get("name") not in ACCEPTANCE_NAMES:
                raise ValidationError(f"unknown acceptance experiment {verify.get('name')!r}", key="verify",
                                      admissible=str(list(ACCEPTANCE_NAMES)))
            if not isinstance(verify.get("expect", {}), dict):
                raise ValidationError("verify.expect must be an object", key="verify")
        params["log_level"] = params["log_level"].upper()

    def __getitem__(self, key):
        return self.params[SimConfig.canonical_key(key)]

    def get(self, key, default=None):
        return self.params.get(SimConfig.canonical_key(key), default)

    def with_updates(self, **updates):
        """
        返回更新若干键后重新校验的新配置
        """
        data = copy.deepcopy(self.params)
        data.update(self._normalize(updates))
        self._validate(data)
        return ExperimentConfig(data, self.source)

    def resolved(self):
        """
        完整解析后的配置（写入 manifest）
        """
        return copy.deepcopy(self.params)

    def to_json(self):
        return json.dumps(self.params, indent=2, sort_keys=True)
