"""
异常定义模块
仿真器各层共用的异常层级
"""


class NoisyOptError(Exception):
    """
    所有项目异常的基类
    """


class ValidationError(NoisyOptError):
    """
    输入或配置不合法，命令行映射为退出码 2

    Args:
        message (str): 描述
        key (str): 出错的配置键
        admissible (str): 允许的取值范围描述
    """
    def __init__(self, message, key=None, admissible=None):
        self.key = key
        self.admissible = admissible
        if key is not None and admissible is not None:
            message = f"{message} (key '{key}', admissible {admissible})"
        elif key is not None:
            message = f"{message} (key '{key}')"
        super().__init__(message)


class InfeasibleTheta(ValidationError):
    """权重下界 θ 超过 1/N，无法构造双随机矩阵"""


class InvalidWindow(ValidationError):
    """连通窗口 B < 1"""


class InvalidAgentCount(ValidationError):
    """智能体数量不满足要求"""


class IndexOrder(ValidationError):
    """转移矩阵乘积的下标顺序错误 (t < s - 1)"""


class ExcludedExponent(ValidationError):
    """速率公式被排除的指数组合"""


class ConfigMismatch(ValidationError):
    """实验配置不满足某项检查的前提（例如高概率检查缺少有界性）"""


class DomainViolation(NoisyOptError):
    """点不在镜像映射的定义域内"""


class InnerSolverFailure(NoisyOptError):
    """
    内层 argmin 数值求解在迭代预算内未达到容差

    Args:
        message (str): 描述
        agent (int): 出错的智能体编号
        t (int): 出错的轮次
        residual (float): 最终的最优性残差
    """
    def __init__(self, message, agent=None, t=None, residual=None):
        self.agent = agent
        self.t = t
        self.residual = residual
        super().__init__(message)

    def tagged(self, agent, t):
        """
        返回带 (agent, t) 标签的新异常

        Returns:
            InnerSolverFailure: 新异常
        """
        return InnerSolverFailure(
            f"agent {agent}, t={t}: {self.args[0]}", agent=agent, t=t, residual=self.residual
        )


class ReferenceSolveUnverified(NoisyOptError):
    """参考解的多起点复核不一致"""


class DegenerateFit(NoisyOptError):
    """拟合窗口内出现非正误差或点数不足"""


class StepFailure(NoisyOptError):
    """
    运行在某一步失败，保留失败前的轨迹

    Args:
        message (str): 描述
        trace (RunTrace): 截至失败时记录的轨迹
    """
    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)
