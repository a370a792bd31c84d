"""
界常数模块
从运行上下文中的模块字段汇总全部理论界所需的常数
"""

import numpy as np

from algorithms.context import query_sup_norm
from geometry.inner_solvers import dual_averaging_projection
from geometry.regularizers import Regularizer
from network.mixing import MixingConstants, mixing_constants


class BoundConstants:
    """
    理论界常数

    基本量：N, B, θ, Θ, γ, G_f, G_χ, G_η, σ_Φ, σ_Ψ, L_Φ, ν, D_X, D²_{Φ,X}, Ψ(x*), ‖x⁰‖；
    C1..C6 由基本量按 DSCMD-N 期望界的公式导出。

    G_f 取随机次梯度范数的上界（精确次梯度上界加上预言机扰动）。
    """
    BASE_FIELDS = (
        "N", "B", "theta", "Theta", "gamma", "G_f", "G_chi", "G_eta", "sigma_phi", "sigma_psi",
        "L_phi", "nu", "D_X", "D_phi_sq", "psi_star", "x0_norm",
    )

    def __init__(self, N, B, theta, Theta, gamma, G_f, G_chi=0.0, G_eta=0.0, sigma_phi=1.0, sigma_psi=1.0,
                 L_phi=1.0, nu=0.0, D_X=0.0, D_phi_sq=0.0, psi_star=0.0, x0_norm=0.0):
        self.N = int(N)
        self.B = int(B)
        self.theta = float(theta)
        self.Theta = float(Theta)
        self.gamma = float(gamma)
        self.G_f = float(G_f)
        self.G_chi = float(G_chi)
        self.G_eta = float(G_eta)
        self.sigma_phi = float(sigma_phi)
        self.sigma_psi = float(sigma_psi)
        self.L_phi = float(L_phi)
        self.nu = float(nu)
        self.D_X = float(D_X)
        self.D_phi_sq = float(D_phi_sq)
        self.psi_star = float(psi_star)
        self.x0_norm = float(x0_norm)

    @property
    def mix(self):
        # NΘ/(1-γ)
        return self.N * self.Theta / (1.0 - self.gamma)

    @property
    def grad_sum(self):
        # (N+1)G_f + NG_χ
        return (self.N + 1) * self.G_f + self.N * self.G_chi

    @property
    def disagreement_factor(self):
        # 4N + 2N²Θ/(1-γ)
        return 4.0 * self.N + 2.0 * self.N * self.mix

    @property
    def C1(self):
        return 2.0 * self.mix * self.grad_sum * self.x0_norm

    @property
    def C2(self):
        return self.N * self.D_phi_sq

    @property
    def C3(self):
        first = (self.disagreement_factor * self.grad_sum + self.N * self.G_chi) * (self.G_f + self.G_chi) / self.sigma_phi
        return first + self.N * self.G_f ** 2 / (2.0 * self.sigma_phi)

    @property
    def C4(self):
        sqrt_nu = np.sqrt(self.nu)
        return (self.disagreement_factor * self.grad_sum * self.N * sqrt_nu
                + (self.G_f + self.G_chi) * self.N ** 2 * sqrt_nu)

    @property
    def C5(self):
        if self.nu == 0.0:
            return 0.0
        return np.sqrt(2.0 / self.sigma_phi) * np.sqrt(self.D_phi_sq) * self.L_phi * self.N * np.sqrt(self.nu)

    @property
    def C6(self):
        if self.nu == 0.0:
            return 0.0
        return self.N * self.L_phi * self.nu

    @property
    def K(self):
        """
        对偶平均各项的公共系数 (3G_f + G_η)/σ_Ψ
        """
        return (3.0 * self.G_f + self.G_eta) / self.sigma_psi

    def as_tuple(self):
        return self.C1, self.C2, self.C3, self.C4, self.C5, self.C6

    def to_dict(self):
        data = {name: getattr(self, name) for name in self.BASE_FIELDS}
        data.update({f"C{k}": float(v) for k, v in enumerate(self.as_tuple(), start=1)})
        data["K"] = float(self.K)
        return data

    @classmethod
    def zeros(cls, N=2):
        """
        全部常数为零的实例（γ 取 0 使 1/(1-γ) 有定义）
        """
        return cls(N, 1, 0.0, 0.0, 0.0, 0.0)


def _single_agent_mixing():
    # P^t = [1] 时取 N = 1、θ = 1、B = 1 代入同一公式
    base = 1.0 - 1.0 / 4.0
    return MixingConstants(base ** -2, base)


def psi_gap(psi, cset, x_star):
    """
    Ψ(x*) - min_𝒳 Ψ
    """
    x_min = dual_averaging_projection(psi, cset, Regularizer("zero"), np.zeros(cset.dim), 0, 1.0)
    return float(max(psi.value(np.asarray(x_star)) - psi.value(x_min), 0.0))


def compute_bound_constants(ctx, x0=None):
    """
    由运行上下文计算界常数

    Args:
        ctx (RunContext): 运行上下文（问题需已求参考解）
        x0 (np.ndarray): 初始点 (N, dim)，用于 ‖x_j⁰‖；缺省取集合中心

    Returns:
        BoundConstants: 常数
    """
    problem = ctx.problem
    cset = problem.cset
    schedule = ctx.schedule
    n = ctx.n_agents
    if n == 1:
        mix = _single_agent_mixing()
    else:
        mix = mixing_constants(n, schedule.theta, schedule.B)
    nu = ctx.sampler.nu if not ctx.sampler.is_zero else 0.0
    sup = query_sup_norm(ctx.config.method, cset, nu)
    G_f = ctx.oracle.adjusted_G(problem.G_f(sup), problem.dim)
    if x0 is None:
        x0 = np.tile(cset.center(), (n, 1))
    x0_norm = float(np.max(np.linalg.norm(np.atleast_2d(x0), axis=1)))

    geometry = ctx.geometry
    if ctx.config.method == "dscmd_n":
        return BoundConstants(
            n, schedule.B, schedule.theta, mix.Theta, mix.gamma, G_f,
            G_chi=problem.G_chi(), sigma_phi=geometry.sigma_phi, L_phi=geometry.L_phi, nu=nu,
            D_X=cset.diameter, D_phi_sq=cset.bregman_diameter_sq(geometry), x0_norm=x0_norm,
        )
    return BoundConstants(
        n, schedule.B, schedule.theta, mix.Theta, mix.gamma, G_f,
        G_eta=problem.G_eta(), sigma_psi=geometry.sigma_phi, nu=nu, D_X=cset.diameter,
        psi_star=psi_gap(geometry, cset, problem.x_star), x0_norm=x0_norm,
    )
