"""
实验工厂模块
负责按解析后的配置创建一次运行所需的各个部件
"""

from algorithms.context import RunConfig, RunContext, query_sup_norm
from algorithms.stepsize import StepsizeSchedule
from geometry.mirror_maps import make_mirror_map
from network.topology import SingleAgentSchedule, generate_schedule
from noise.decay import NoiseDecay
from noise.sampler import LinkNoiseSampler
from problems.benchmarks import build_problem
from problems.oracle import StochasticSubgradientOracle
from problems.reference import solve_reference
from utils.rng import STREAM_ORACLE, derive_seed


class ExperimentFactory:
    """
    实验工厂类
    拓扑与问题数据在各次试验间固定，链路噪声与预言机随 (master_seed, trial) 变化
    """

    def __init__(self, params):
        """
        初始化实验工厂

        Args:
            params (dict): 已校验的扁平配置
        """
        self.params = params

    @property
    def n_agents(self):
        return int(self.params["n_agents"])

    @property
    def noise_nu(self):
        """
        实际生效的 ν；噪声分布为 zero 时取 0
        """
        return 0.0 if self.params["noise_dist"] == "zero" else float(self.params["noise_nu"])

    def create_schedule(self):
        """
        创建拓扑序列

        Returns:
            TopologySchedule: N = 1 时为退化序列
        """
        p = self.params
        if self.n_agents == 1:
            return SingleAgentSchedule()
        return generate_schedule(p["n_agents"], p["window_B"], p["theta"], p["topology_kind"],
                                 p["topology_seed"], p.get("edge_prob", 0.3))

    def create_decay(self):
        return NoiseDecay(self.params["noise_kappa2"])

    def create_stepsize(self):
        return StepsizeSchedule(self.params["kappa1"])

    def create_sampler(self, trial):
        """
        创建第 trial 次试验的链路噪声采样器
        """
        p = self.params
        seed = derive_seed(p["noise_seed"], p["master_seed"], trial)
        return LinkNoiseSampler(self.noise_nu, p["noise_dist"], p["noise_zero_mean"], seed, self.n_agents)

    def create_oracle(self, trial):
        p = self.params
        seed = derive_seed(p["master_seed"], trial, STREAM_ORACLE)
        return StochasticSubgradientOracle(p["grad_noise_sigma"], p["grad_bounded"], seed, self.n_agents)

    def create_geometry(self):
        """
        DSCMD-N 用 mirror_map 作 Φ，DSCDA-N 用 proximal_psi 作 Ψ

        Returns:
            MirrorMap: 距离生成函数
        """
        p = self.params
        kind = p["mirror_map"] if p["method"] == "dscmd_n" else p["proximal_psi"]
        return make_mirror_map(kind, p.get("entropy_floor", 1e-12), p.get("p_norm", 1.5))

    def create_problem(self, solve=True):
        """
        创建问题实例，并按需求参考解

        Args:
            solve (bool): 是否调用 solve_reference

        Returns:
            CompositeProblem: 问题实例
        """
        problem = build_problem(self.params)
        if solve:
            solve_reference(problem, seed=self.params["data_seed"])
        return problem

    def create_run_config(self, trial):
        p = self.params
        checkpoints = p.get("checkpoints") or {}
        return RunConfig(
            p["method"], p["horizon_T"], p["master_seed"], trial,
            per_decade=checkpoints.get("per_decade", 40),
            cap=checkpoints.get("cap", 200),
            track_min=p.get("track_min", True),
            init_override=p.get("init_override"),
        )

    def create_context(self, trial, problem, schedule=None):
        """
        创建第 trial 次试验的运行上下文

        Args:
            trial (int): 试验编号
            problem (CompositeProblem): 已求参考解的问题（各试验共享）
            schedule (TopologySchedule): 可复用的拓扑序列

        Returns:
            RunContext: 运行上下文
        """
        oracle = self.create_oracle(trial)
        G_guard = None
        if oracle.bounded:
            sup = query_sup_norm(self.params["method"], problem.cset, self.noise_nu)
            G_guard = oracle.adjusted_G(problem.G_f(sup), problem.dim)
        return RunContext(
            self.create_run_config(trial),
            schedule if schedule is not None else self.create_schedule(),
            self.create_decay(),
            self.create_sampler(trial),
            self.create_stepsize(),
            problem,
            oracle,
            self.create_geometry(),
            G_guard=G_guard,
        )

    def create_all_modules(self, trial=0, problem=None):
        """
        创建一次试验的全部部件

        Returns:
            dict: 包含全部部件的字典
        """
        if problem is None:
            problem = self.create_problem()
        context = self.create_context(trial, problem)
        return {
            'context': context,
            'schedule': context.schedule,
            'problem': problem,
            'sampler': context.sampler,
            'oracle': context.oracle,
            'geometry': context.geometry,
        }
