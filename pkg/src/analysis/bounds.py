"""
理论界模块
期望界与高概率界的闭式与有限和求值，α_t = 1/(t+1)^κ1，r_t = 1/(t+1)^κ2

有限和形式对任意 T >= 1 与任意指数对成立，供检查点支配检查使用；
闭式形式按指数所在区间分支，被排除的指数组合抛出 ExcludedExponent。
T 可为标量或整数数组，返回值形状与之相同。
"""

import numpy as np
from scipy.signal import lfilter

from utils.errors import ExcludedExponent, ValidationError

EXPONENT_TOL = 1e-12


def _horizons(T, minimum=1):
    arr = np.atleast_1d(np.asarray(T, dtype=int))
    if arr.size == 0 or np.any(arr < minimum):
        raise ValidationError(f"horizon must be at least {minimum}", key="horizon_T", admissible=f">= {minimum}")
    return arr


def _shaped(values, T):
    return float(values[0]) if np.ndim(T) == 0 else values


def _power_series(kappa, horizon):
    # 下标 0..horizon
    return 1.0 / (np.arange(horizon + 1) + 1.0) ** kappa


def _check_kappa(kappa1, kappa2):
    if not 0.0 < kappa1 < 1.0:
        raise ValidationError(f"kappa1={kappa1} outside (0, 1)", key="kappa1", admissible="(0, 1)")
    if not 0.0 < kappa2 <= 1.0:
        raise ValidationError(f"kappa2={kappa2} outside (0, 1]", key="kappa2", admissible="(0, 1]")


def _excluded(value, target, label):
    if abs(value - target) < EXPONENT_TOL:
        raise ExcludedExponent(f"{label} = {target} is excluded", key="kappa2", admissible=f"{label} != {target}")


def _log_term(delta):
    if not 0.0 < delta <= 1.0:
        raise ValidationError(f"delta={delta} outside (0, 1]", key="delta", admissible="(0, 1]")
    return float(np.log(1.0 / delta))


def mixed_tail(gamma, r):
    """
    S_t = Σ_{s=1}^{t-1} r_{s-1} γ^{t-s-1}，按 S_1 = 0、S_{t+1} = γS_t + r_{t-1} 递推

    Args:
        gamma (float): γ ∈ (0, 1)
        r (np.ndarray): r_0..r_H

    Returns:
        np.ndarray: 下标 t 处为 S_t（下标 0 不使用，置 0）
    """
    y = lfilter([0.0, 1.0], [1.0, -gamma], r)
    return np.concatenate(([0.0], y))[: len(r)]


# ---------------------------------------------------------------- DSCMD-N


def theorem1_sum_bound(c, kappa1, kappa2, T):
    """
    期望界的有限和形式
    C1/T + C2/(Tα_T) + (C3/T)Σα_t + (C4/T)Σr_t + (C5/T)Σr_t/α_t + (C6/T)Σr_t²/α_t，求和 t = 0..T
    """
    Ts = _horizons(T)
    H = int(Ts.max())
    a = _power_series(kappa1, H)
    r = _power_series(kappa2, H)
    sa, sr = np.cumsum(a)[Ts], np.cumsum(r)[Ts]
    s_ratio, s_sq = np.cumsum(r / a)[Ts], np.cumsum(r ** 2 / a)[Ts]
    values = (c.C1 + c.C2 / a[Ts] + c.C3 * sa + c.C4 * sr + c.C5 * s_ratio + c.C6 * s_sq) / Ts
    return _shaped(values, T)


def high_prob_term_dscmd(c, delta, T):
    """
    2√2 G_f D_X N √log(1/δ) / √T
    """
    Ts = _horizons(T)
    return _shaped(2.0 * np.sqrt(2.0) * c.G_f * c.D_X * c.N * np.sqrt(_log_term(delta)) / np.sqrt(Ts), T)


def theorem2_bound(c, kappa1, kappa2, T, delta):
    """
    高概率界：期望界有限和形式加上鞅差项
    """
    return theorem1_sum_bound(c, kappa1, kappa2, T) + high_prob_term_dscmd(c, delta, T)


def proposition1_bound(c, kappa1, kappa2, T):
    """
    幂律步长与噪声衰减下的闭式期望界，要求 0 < κ1 < κ2 <= 1

    Args:
        c (BoundConstants): 常数
        kappa1 (float): 步长指数
        kappa2 (float): 噪声衰减指数
        T (int | np.ndarray): 步数

    Returns:
        float | np.ndarray: 界值
    """
    _check_kappa(kappa1, kappa2)
    if kappa1 >= kappa2:
        raise ExcludedExponent("the closed form needs kappa1 < kappa2", key="kappa2", admissible="(kappa1, 1]")
    Ts = _horizons(T).astype(float)
    C1, C2, C3, C4, C5, C6 = c.as_tuple()
    k1, k2 = kappa1, kappa2
    if k2 == 1.0:
        values = (
            (C1 + (2.0 - k1) / (1.0 - k1) * C6) / Ts
            + (2.0 ** k1 * C2 + 2.0 ** k1 * C5 / k1) / Ts ** (1.0 - k1)
            + 2.0 ** (1.0 - k1) * C3 / (1.0 - k1) / Ts ** k1
            + 4.0 * C4 * np.log(Ts) / Ts
        )
        return _shaped(values, T)
    e = 2.0 * k2 - k1
    _excluded(e, 1.0, "2*kappa2 - kappa1")
    d = k2 - k1
    values = (
        (C1 + abs((1.0 - 2.0 * e) / (1.0 - e)) * C6) / Ts
        + 2.0 ** k1 * C2 / Ts ** (1.0 - k1)
        + 2.0 ** (1.0 - k1) * C3 / (1.0 - k1) / Ts ** k1
        + 2.0 ** (1.0 - k2) * C4 / (1.0 - k2) / Ts ** k2
        + 2.0 ** (1.0 - d) * C5 / (1.0 - d) / Ts ** d
        + C6 / abs(1.0 - e) / Ts ** e
    )
    return _shaped(values, T)


theorem1_bound = proposition1_bound


def corollary1_constant(c):
    """
    C = max{C1 + 3C6, 4C4, √2C2 + 2√2C3 + 2√2C5}
    """
    C1, C2, C3, C4, C5, C6 = c.as_tuple()
    s2 = np.sqrt(2.0)
    return float(max(C1 + 3.0 * C6, 4.0 * C4, s2 * C2 + 2.0 * s2 * C3 + 2.0 * s2 * C5))


def corollary1_bound(c, T):
    """
    κ1 = 1/2、κ2 = 1 时的 3C/√T，T >= 3
    """
    Ts = _horizons(T, minimum=3)
    return _shaped(3.0 * corollary1_constant(c) / np.sqrt(Ts), T)


def proposition2_bound(c, T, delta):
    """
    κ1 = 1/2、κ2 = 1 时的高概率闭式界，T >= 3
    """
    Ts = _horizons(T, minimum=3).astype(float)
    C1, C2, C3, C4, C5, C6 = c.as_tuple()
    s2 = np.sqrt(2.0)
    head = s2 * C2 + 2.0 * s2 * C3 + 2.0 * s2 * C5 + 2.0 * s2 * c.G_f * c.D_X * c.N * np.sqrt(_log_term(delta))
    values = (C1 + 3.0 * C6) / Ts + 4.0 * C4 * np.log(Ts) / Ts + head / np.sqrt(Ts)
    return _shaped(values, T)


def corollary2_constant(c, delta):
    C1, C2, C3, C4, C5, C6 = c.as_tuple()
    s2 = np.sqrt(2.0)
    third = s2 * C2 + 2.0 * s2 * C3 + 2.0 * s2 * C5 + 2.0 * s2 * c.G_f * c.D_X * c.N * np.sqrt(_log_term(delta))
    return float(max(C1 + 3.0 * C6, 4.0 * C4, third))


def corollary2_bound(c, T, delta):
    Ts = _horizons(T, minimum=3)
    return _shaped(3.0 * corollary2_constant(c, delta) / np.sqrt(Ts), T)


# ---------------------------------------------------------------- DSCDA-N


def _dual_head(c):
    # K(NΘ/(1-γ) + 2)G_f + G_f²
    return c.K * (c.mix + 2.0) * c.G_f + c.G_f ** 2


def _dual_sums(c, kappa1, kappa2, Ts):
    H = int(Ts.max())
    a = _power_series(kappa1, H)
    r = _power_series(kappa2, H)
    S = mixed_tail(c.gamma, r)
    r_prev = np.concatenate(([0.0], r[:-1]))
    # t = 0 项在以 t = 1 起算的和中置零
    mask = np.ones(H + 1)
    mask[0] = 0.0
    return {
        "a": a,
        "sum_a": np.cumsum(a)[Ts],
        "sum_aS": np.cumsum(mask * a * S)[Ts],
        "sum_a_rprev": np.cumsum(mask * a * r_prev)[Ts],
        "sum_a_r2": np.cumsum(a * r ** 2)[Ts],
        "sum_r": np.cumsum(mask * r)[Ts],
        "sum_r2": np.cumsum(mask * r ** 2)[Ts],
    }


def _theorem3_core(c, sums, Ts):
    sqrt_nu = np.sqrt(c.nu)
    return (
        _dual_head(c) * sums["sum_a"]
        + c.K * c.Theta * c.N ** 2 * sqrt_nu * sums["sum_aS"]
        + 2.0 * c.K * c.N * sqrt_nu * sums["sum_a_rprev"]
        + c.psi_star / sums["a"][Ts]
        + c.N * c.nu * sums["sum_a_r2"]
    ) / Ts


def theorem3_sum_bound(c, kappa1, kappa2, T):
    """
    DSCDA-N 期望界的有限和形式

    以 K = (3G_f + G_η)/σ_Ψ，
    [K(NΘ/(1-γ)+2)G_f + G_f²](1/T)Σ_{0..T}α_t + KΘN²√ν(1/T)Σ_{1..T}α_t S_t
    + 2KN√ν(1/T)Σ_{1..T}α_t r_{t-1} + Ψ(x*)/(Tα_T) + (Nν/T)Σ_{0..T}α_t r_t² + (√ν D_X/T)Σ_{1..T}r_t
    """
    Ts = _horizons(T)
    sums = _dual_sums(c, kappa1, kappa2, Ts)
    values = _theorem3_core(c, sums, Ts) + np.sqrt(c.nu) * c.D_X * sums["sum_r"] / Ts
    return _shaped(values, T)


def theorem4_bound(c, kappa1, kappa2, T, delta):
    """
    DSCDA-N 高概率界：有限和核心项加两项 Azuma 型偏差

    偏差项 √2 N√ν D_X (Σ_{1..T} r_t²)^{1/2} √log(2/δ)/√T 按定理陈述取因子 N。
    """
    Ts = _horizons(T)
    sums = _dual_sums(c, kappa1, kappa2, Ts)
    log2 = np.sqrt(_log_term(delta) + np.log(2.0))
    deviation = (
        2.0 * np.sqrt(2.0) * c.G_f * c.D_X * log2
        + np.sqrt(2.0) * c.N * np.sqrt(c.nu) * c.D_X * np.sqrt(sums["sum_r2"]) * log2
    ) / np.sqrt(Ts)
    return _shaped(_theorem3_core(c, sums, Ts) + deviation, T)


def proposition3_bound(c, kappa1, kappa2, T):
    """
    DSCDA-N 幂律参数下的闭式期望界，κ2 < 1 与 κ2 = 1 两个分支

    Args:
        c (BoundConstants): 常数
        kappa1 (float): κ1 ∈ (0, 1)
        kappa2 (float): κ2 ∈ (0, 1]，κ2 < 1 时要求 κ1+κ2 ≠ 1 且 κ1+2κ2 ≠ 1
        T (int | np.ndarray): 步数，T >= 2

    Returns:
        float | np.ndarray: 界值
    """
    _check_kappa(kappa1, kappa2)
    Ts = _horizons(T, minimum=2).astype(float)
    k1, k2 = kappa1, kappa2
    K, N = c.K, c.N
    sqrt_nu = np.sqrt(c.nu)
    mixing = c.Theta * N ** 2 * sqrt_nu / (1.0 - c.gamma)
    if k2 == 1.0:
        lead = K * ((c.mix + 2.0) * c.G_f + mixing) + c.G_f ** 2
        values = (
            lead * 2.0 ** (1.0 - k1) / (1.0 - k1) / Ts ** k1
            + K * 2.0 * N * sqrt_nu / k1 / Ts ** (k1 + 1.0)
            + c.psi_star * 2.0 ** k1 / Ts ** (1.0 - k1)
            + N * c.nu / (k1 + 1.0) / Ts ** (k1 + 2.0)
            + 2.0 * sqrt_nu * c.D_X * np.log(Ts) / Ts
            + (K * 2.0 * N * sqrt_nu * (k1 + 1.0) / k1 + N * c.nu * (k1 + 2.0) / (k1 + 1.0)) / Ts
        )
        return _shaped(values, T)
    s1, s2 = k1 + k2, k1 + 2.0 * k2
    _excluded(s1, 1.0, "kappa1 + kappa2")
    _excluded(s2, 1.0, "kappa1 + 2*kappa2")
    km = min(k1, k2)
    values = (
        _dual_head(c) * 2.0 ** (1.0 - k1) / (1.0 - k1) / Ts ** k1
        + K * mixing * 2.0 ** (1.0 - km) / (1.0 - km) / Ts ** km
        + K * 2.0 * N * sqrt_nu / abs(1.0 - s1) / Ts ** s1
        + c.psi_star * 2.0 ** k1 / Ts ** (1.0 - k1)
        + N * c.nu / abs(1.0 - s2) / Ts ** s2
        + sqrt_nu * c.D_X * 2.0 ** (1.0 - k2) / (1.0 - k2) / Ts ** k2
        + (K * 2.0 * N * sqrt_nu * s1 / abs(1.0 - s1) + N * c.nu * s2 / abs(1.0 - s2)) / Ts
    )
    return _shaped(values, T)


theorem3_bound = proposition3_bound


def _noise_tail_coefficient(c, kappa2):
    # c(κ2)
    if kappa2 == 1.0:
        return 2.0 * np.sqrt(c.nu) * c.D_X
    return np.sqrt(c.nu) * c.D_X * 2.0 ** (1.0 - kappa2) / (1.0 - kappa2)


def corollary3_rate(kappa1, kappa2):
    """
    κ̄ = min{κ1, κ2, 1-κ1, 1}
    """
    _check_kappa(kappa1, kappa2)
    return float(min(kappa1, kappa2, 1.0 - kappa1, 1.0))


def corollary3_constant(c, kappa1, kappa2):
    """
    一般指数对下的公共常数 C̄，界为 7C̄/T^κ̄
    """
    _check_kappa(kappa1, kappa2)
    s1, s2 = kappa1 + kappa2, kappa1 + 2.0 * kappa2
    _excluded(s1, 1.0, "kappa1 + kappa2")
    _excluded(s2, 1.0, "kappa1 + 2*kappa2")
    K, N = c.K, c.N
    sqrt_nu = np.sqrt(c.nu)
    km = min(kappa1, kappa2)
    items = (
        _dual_head(c) * 2.0 ** (1.0 - kappa1) / (1.0 - kappa1),
        K * c.Theta * N ** 2 * sqrt_nu / (1.0 - c.gamma) * 2.0 ** (1.0 - km) / (1.0 - km),
        K * 2.0 * N * sqrt_nu / abs(1.0 - s1),
        c.psi_star * 2.0 ** kappa1,
        N * c.nu / abs(1.0 - s2),
        _noise_tail_coefficient(c, kappa2),
        K * 2.0 * N * sqrt_nu * s1 / abs(1.0 - s1) + N * c.nu * s2 / abs(1.0 - s2),
    )
    return float(max(items))


def corollary3_bound(c, kappa1, kappa2, T):
    Ts = _horizons(T, minimum=2)
    rate = corollary3_rate(kappa1, kappa2)
    return _shaped(7.0 * corollary3_constant(c, kappa1, kappa2) / Ts.astype(float) ** rate, T)


def corollary3_prime_constant(c, kappa2):
    """
    κ1 = 1/2、κ2 ∈ (1/2, 1] 时的 C̄'，界为 6C̄'/√T
    """
    if not 0.5 < kappa2 <= 1.0:
        raise ExcludedExponent("C-bar-prime needs kappa2 in (1/2, 1]", key="kappa2", admissible="(0.5, 1]")
    K, N = c.K, c.N
    sqrt_nu = np.sqrt(c.nu)
    mixing = c.Theta * N ** 2 * sqrt_nu / (1.0 - c.gamma)
    items = (
        (K * ((c.mix + 2.0) * c.G_f + mixing) + c.G_f ** 2) * 2.0 * np.sqrt(2.0),
        K * 2.0 * N * sqrt_nu / (kappa2 - 0.5),
        c.psi_star * np.sqrt(2.0),
        N * c.nu / (2.0 * kappa2 - 0.5),
        _noise_tail_coefficient(c, kappa2),
        K * 2.0 * N * sqrt_nu * (kappa2 + 0.5) / (kappa2 - 0.5) + N * c.nu * (2.0 * kappa2 + 0.5) / (2.0 * kappa2 - 0.5),
    )
    return float(max(items))


def corollary3_prime_bound(c, kappa2, T):
    Ts = _horizons(T, minimum=2)
    return _shaped(6.0 * corollary3_prime_constant(c, kappa2) / np.sqrt(Ts), T)


class RegimeBound:
    """
    α_t = 1/√(t+1) 时 DSCDA-N 高概率界的三个区间

    Attributes:
        regime (str): slow（κ2 < 1/2）、critical（κ2 = 1/2）、fast（κ2 > 1/2）
        constant (float): 该区间的 C̄(δ)
        multiplier (float): 3、4 或 2
        exponent (float): T 的衰减阶（critical 另含 √lnT）
    """
    def __init__(self, regime, constant, multiplier, exponent):
        self.regime = regime
        self.constant = float(constant)
        self.multiplier = float(multiplier)
        self.exponent = float(exponent)

    def evaluate(self, T):
        Ts = _horizons(T, minimum=3).astype(float)
        values = self.multiplier * self.constant / Ts ** self.exponent
        if self.regime == "critical":
            values = values * np.sqrt(np.log(Ts))
        return _shaped(values, T)

    def to_dict(self):
        return {"regime": self.regime, "constant": self.constant, "multiplier": self.multiplier,
                "exponent": self.exponent}


def corollary4_regime(c, kappa2, delta):
    """
    按 κ2 选择区间并给出 C̄1(δ) / C̄2(δ) / C̄3(δ)

    Returns:
        RegimeBound: 区间界
    """
    if not 0.0 < kappa2 <= 1.0:
        raise ValidationError(f"kappa2={kappa2} outside (0, 1]", key="kappa2", admissible="(0, 1]")
    K, N = c.K, c.N
    sqrt_nu = np.sqrt(c.nu)
    s2 = np.sqrt(2.0)
    log2 = np.sqrt(_log_term(delta) + np.log(2.0))
    mixing = c.Theta * N ** 2 * sqrt_nu / (1.0 - c.gamma)
    base = c.psi_star * s2 + 2.0 * s2 * c.G_f * c.D_X * log2

    if kappa2 < 0.5:
        _excluded(kappa2, 0.25, "kappa2")
        items = (
            _dual_head(c) * 2.0 * s2 + base,
            K * mixing * 2.0 ** (1.0 - kappa2) / (1.0 - kappa2) + N * sqrt_nu * c.D_X * 2.0 ** (1.0 - kappa2) * log2,
            K * 2.0 * N * sqrt_nu / (0.5 - kappa2) + N * c.nu / abs(0.5 - 2.0 * kappa2),
        )
        return RegimeBound("slow", max(items), 3.0, kappa2)

    lead = (K * ((c.mix + 2.0) * c.G_f + mixing) + c.G_f ** 2) * 2.0 * s2 + base
    if kappa2 == 0.5:
        items = (lead, 3.0 * N * c.nu, K * 4.0 * N * sqrt_nu, 2.0 * N * sqrt_nu * c.D_X * log2)
        return RegimeBound("critical", max(items), 4.0, 0.5)

    items = (
        lead + s2 * N * sqrt_nu * c.D_X / np.sqrt(2.0 * kappa2 - 1.0) * log2,
        K * 2.0 * N * sqrt_nu * (kappa2 + 0.5) / (kappa2 - 0.5) + N * c.nu * (2.0 * kappa2 + 0.5) / (2.0 * kappa2 - 0.5),
    )
    return RegimeBound("fast", max(items), 2.0, 0.5)


# ---------------------------------------------------------------- 引理


def lemma4_bound(c, kappa1, t):
    """
    单步位移 E‖x_i^{t+1} - y_i^t‖ <= ((G_f + G_χ)/σ_Φ) α_t
    """
    t = np.asarray(t, dtype=float)
    return (c.G_f + c.G_chi) / c.sigma_phi / (t + 1.0) ** kappa1


def lemma5_bound(c, kappa1, kappa2, T):
    """
    累积不一致度 Σ_{t=1}^T Σ_i E‖x_i^t - x_j^t‖ 的上界

    (2NΘ/(1-γ))‖x_j⁰‖ + (4N + 2N²Θ/(1-γ)) Σ_{t=0}^T [((G_f+G_χ)/σ_Φ)α_t + N√ν r_t]
    """
    Ts = _horizons(T)
    H = int(Ts.max())
    per_step = (c.G_f + c.G_chi) / c.sigma_phi * _power_series(kappa1, H) + c.N * np.sqrt(c.nu) * _power_series(kappa2, H)
    values = 2.0 * c.mix * c.x0_norm + c.disagreement_factor * np.cumsum(per_step)[Ts]
    return _shaped(values, T)


def lemma10_bound(c, kappa2, T):
    """
    对偶变量偏差 ‖z_i^t - z̄^t‖ 的上界（t >= 1）

    (NΘ/(1-γ) + 2)G_f + ΘN²√ν S_t + 2N√ν r_{t-1}
    """
    Ts = _horizons(T)
    r = _power_series(kappa2, int(Ts.max()))
    S = mixed_tail(c.gamma, r)
    sqrt_nu = np.sqrt(c.nu)
    values = (c.mix + 2.0) * c.G_f + c.Theta * c.N ** 2 * sqrt_nu * S[Ts] + 2.0 * c.N * sqrt_nu * r[Ts - 1]
    return _shaped(values, T)
