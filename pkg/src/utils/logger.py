"""
日志工具模块
记录仿真、分析与命令行运行过程中的日志信息
"""

import os
import sys
import time


class Logger:
    """
    日志记录器类

    控制台输出写到 stderr，stdout 留给命令结果；可选追加写入日志文件。
    """
    def __init__(self, log_file=None, log_level="INFO", stream=None):
        """
        初始化日志记录器

        Args:
            log_file (str): 日志文件路径，如果为None则只输出到控制台
            log_level (str): 日志级别，可选值：DEBUG, INFO, WARNING, ERROR, CRITICAL
            stream: 控制台输出流，默认 sys.stderr
        """
        self.log_file = None
        self.log_level = log_level.upper()
        self.stream = stream

        # 日志级别映射
        self.level_map = {
            "DEBUG": 0,
            "INFO": 1,
            "WARNING": 2,
            "ERROR": 3,
            "CRITICAL": 4
        }

        if log_file:
            self._prepare_file(log_file)

    def _prepare_file(self, log_file):
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        self.log_file = log_file

    def _should_log(self, level):
        """
        检查是否应该记录该级别的日志

        Args:
            level (str): 日志级别

        Returns:
            bool: 是否应该记录
        """
        current_level = self.level_map.get(self.log_level, 1)
        log_level = self.level_map.get(level.upper(), 1)
        return log_level >= current_level

    def log(self, message, level="INFO", component=None):
        """
        记录日志

        Args:
            message (str): 日志消息
            level (str): 日志级别
            component (str): 组件名，出现在级别之后，便于按模块过滤
        """
        level = level.upper()

        if not self._should_log(level):
            return

        timestamp = time.strftime("%Y-%m-%d %H:%M:%S")
        if component:
            log_message = f"[{timestamp}] [{level}] [{component}] {message}"
        else:
            log_message = f"[{timestamp}] [{level}] {message}"

        stream = self.stream if self.stream is not None else sys.stderr
        print(log_message, file=stream)

        if self.log_file:
            try:
                with open(self.log_file, "a", encoding="utf-8") as f:
                    f.write(log_message + "\n")
            except OSError as e:
                print(f"Failed to write to log file: {e}", file=stream)

    def debug(self, message, component=None):
        self.log(message, level="DEBUG", component=component)

    def info(self, message, component=None):
        self.log(message, level="INFO", component=component)

    def warning(self, message, component=None):
        self.log(message, level="WARNING", component=component)

    def error(self, message, component=None):
        self.log(message, level="ERROR", component=component)

    def critical(self, message, component=None):
        self.log(message, level="CRITICAL", component=component)

    def is_enabled_for(self, level):
        """
        判断某级别当前是否会被输出，供热循环里跳过字符串格式化

        Args:
            level (str): 日志级别

        Returns:
            bool: 是否输出
        """
        return self._should_log(level)

    def set_log_level(self, level):
        """
        设置日志级别

        Args:
            level (str): 日志级别
        """
        if level.upper() in self.level_map:
            self.log_level = level.upper()
            self.log(f"Log level set to {self.log_level}", level="DEBUG")
        else:
            self.log(f"Invalid log level: {level}", level="WARNING")

    def set_log_file(self, log_file):
        """
        设置日志文件，传 None 关闭文件输出

        Args:
            log_file (str): 日志文件路径
        """
        if log_file:
            self._prepare_file(log_file)
        else:
            self.log_file = None
        self.log(f"Log file set to {self.log_file}", level="DEBUG")

    def get_log_level(self):
        return self.log_level

    def get_log_file(self):
        return self.log_file


class ComponentLogger:
    """
    带组件前缀的日志代理

    共享默认记录器的级别与文件设置，只在消息里加上组件名。
    """
    def __init__(self, component, base=None):
        self.component = component
        self.base = base

    @property
    def _logger(self):
        return self.base if self.base is not None else default_logger

    def log(self, message, level="INFO"):
        self._logger.log(message, level=level, component=self.component)

    def debug(self, message):
        self.log(message, level="DEBUG")

    def info(self, message):
        self.log(message, level="INFO")

    def warning(self, message):
        self.log(message, level="WARNING")

    def error(self, message):
        self.log(message, level="ERROR")

    def critical(self, message):
        self.log(message, level="CRITICAL")

    def is_enabled_for(self, level):
        return self._logger.is_enabled_for(level)


# 创建默认的日志记录器实例
default_logger = Logger()


def get_logger(component=None):
    """
    获取默认的日志记录器

    Args:
        component (str): 组件名；给出时返回带前缀的代理

    Returns:
        Logger | ComponentLogger: 日志记录器
    """
    if component is None:
        return default_logger
    return ComponentLogger(component)
