"""
计时器工具模块
记录实验耗时，并按预算报告是否超时
"""

import time


class Timer:
    """
    计时器类
    """
    def __init__(self):
        self.start_time = 0.0
        self.elapsed_time = 0.0
        self.running = False

    def start(self):
        """
        开始计时（暂停后再次调用为继续计时）
        """
        if not self.running:
            self.start_time = time.perf_counter() - self.elapsed_time
            self.running = True

    def pause(self):
        if self.running:
            self.elapsed_time = time.perf_counter() - self.start_time
            self.running = False

    def reset(self):
        self.start_time = 0.0
        self.elapsed_time = 0.0
        self.running = False

    def restart(self):
        self.reset()
        self.start()

    def get_elapsed(self):
        """
        获取已经过的时间

        Returns:
            float: 已经过的时间（秒）
        """
        if self.running:
            return time.perf_counter() - self.start_time
        return self.elapsed_time

    def is_running(self):
        return self.running

    def format_time(self):
        """
        格式化为 HH:MM:SS.mmm

        Returns:
            str: 格式化后的时间字符串
        """
        elapsed = self.get_elapsed()
        hours = int(elapsed // 3600)
        minutes = int((elapsed % 3600) // 60)
        seconds = int(elapsed % 60)
        milliseconds = int((elapsed % 1) * 1000)
        return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{milliseconds:03d}"

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.pause()
        return False


class BudgetTimer(Timer):
    """
    带运行预算的计时器

    预算只用于报告，不会中断计算。
    """
    def __init__(self, budget_seconds=None):
        """
        初始化预算计时器

        Args:
            budget_seconds (float): 预算（秒），None 表示不设预算
        """
        super().__init__()
        self.budget_seconds = budget_seconds

    def get_remaining(self):
        """
        Returns:
            float: 剩余预算（秒），无预算时为 None
        """
        if self.budget_seconds is None:
            return None
        return max(0.0, self.budget_seconds - self.get_elapsed())

    def is_over_budget(self):
        if self.budget_seconds is None:
            return False
        return self.get_elapsed() > self.budget_seconds

    def report(self):
        """
        生成耗时报告

        Returns:
            dict: 耗时、预算与是否超时
        """
        return {
            "elapsed_seconds": round(self.get_elapsed(), 3),
            "elapsed": self.format_time(),
            "budget_seconds": self.budget_seconds,
            "within_budget": not self.is_over_budget(),
        }
