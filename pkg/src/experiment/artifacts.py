"""
实验产物模块
负责输出目录下 manifest、CSV 序列与 summary 的写出
"""

import csv
import hashlib
import json
import os

import numpy as np

from utils.logger import get_logger

SERIES_COLUMNS = ("T", "agent", "mean_err", "stderr", "bound", "disagreement", "disagreement_bound")
TRIAL_COLUMNS = ("trial", "T", "agent", "err_hat", "err_last", "min_err", "dist_hat")
COMPARISON_COLUMNS = ("value", "T", "mean_err", "stderr", "bound", "slope")


def format_number(value):
    """
    CSV 数值格式：浮点用最短往返表示，整数原样
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def to_jsonable(value):
    """
    把 numpy 类型递归转成 JSON 可写的值，非有限浮点写成 null
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


class ArtifactWriter:
    """
    产物写出器
    每个文件只由一个写出器写，路径都在 output_dir 之下
    """
    def __init__(self, output_dir):
        """
        初始化写出器

        Args:
            output_dir (str): 输出目录，不存在时创建
        """
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)
        self.logger = get_logger("artifacts")
        self.written = []

    def path(self, name):
        return os.path.join(self.output_dir, name)

    def _record(self, path):
        self.written.append(os.path.basename(path))
        self.logger.info(f"wrote {path}")
        return path

    def write_json(self, name, payload):
        """
        写出 UTF-8 JSON（键排序，便于比较）
        """
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(to_jsonable(payload), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        return self._record(path)

    def write_csv(self, name, headers, rows):
        """
        写出 RFC-4180 CSV

        Args:
            name (str): 文件名
            headers (tuple): 列名
            rows (iterable): 每行一个序列
        """
        path = self.path(name)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(headers)
            for row in rows:
                writer.writerow([format_number(v) for v in row])
        return self._record(path)

    def write_manifest(self, config, constants=None, problem=None, extra=None):
        """
        manifest.json：完整解析后的配置、导出常数与数据来源

        Args:
            config (ExperimentConfig): 配置
            constants (BoundConstants): 界常数
            problem (CompositeProblem): 问题实例（记录数据种子、形状与校验和）
            extra (dict): 其它条目
        """
        manifest = {"config": config.resolved(), "source": config.source}
        if constants is not None:
            manifest["constants"] = constants.to_dict()
        if problem is not None:
            manifest["problem"] = problem.to_dict()
        manifest.update(extra or {})
        return self.write_json("manifest.json", manifest)

    def write_series(self, ensemble, bound=None, disagreement=None, name="series.csv"):
        """
        逐检查点、逐智能体的均值误差及对应的界

        Args:
            ensemble (TrialEnsemble): 试验集合
            bound (np.ndarray): 每个检查点的期望界
            disagreement (CheckReport): disagreement_report 的结果
        """
        K = len(ensemble.checkpoints)
        bound = np.full(K, np.nan) if bound is None else np.asarray(bound, dtype=float)
        dis = np.full(K, np.nan) if disagreement is None else np.asarray(disagreement.measured, dtype=float)
        dis_bound = np.full(K, np.nan) if disagreement is None else np.asarray(disagreement.expected, dtype=float)
        rows = []
        for agent in range(ensemble.n_agents):
            curve = ensemble.mean_curve("err_hat", agent)
            for k, T in enumerate(ensemble.checkpoints):
                rows.append((int(T), agent, curve.mean[k], curve.stderr[k], bound[k], dis[k], dis_bound[k]))
        return self.write_csv(name, SERIES_COLUMNS, rows)

    def write_trials(self, traces, name="trials.csv"):
        """
        每个试验的原始检查点记录（不含耗时）
        """
        rows = []
        for tr in traces:
            for k, T in enumerate(np.asarray(tr.checkpoints)):
                for agent in range(tr.n_agents):
                    rows.append((tr.trial, int(T), agent, tr.err_hat[k][agent], tr.err_last[k][agent],
                                 tr.min_err[k][agent], tr.dist_hat[k][agent]))
        return self.write_csv(name, TRIAL_COLUMNS, rows)

    def write_comparison(self, rows, name="comparison.csv"):
        return self.write_csv(name, COMPARISON_COLUMNS, rows)

    def write_summary(self, summary):
        return self.write_json("summary.json", summary)


def numeric_digest(path):
    """
    CSV 文件的 sha256，用于确定性比对
    """
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        digest.update(f.read())
    return digest.hexdigest()
