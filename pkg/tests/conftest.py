"""
测试公共配置：把 src 加入导入路径，并提供小规模实验配置
"""

import json
import os
import sys

import pytest

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SRC_DIR = os.path.join(ROOT_DIR, "src")
for path in (SRC_DIR, ROOT_DIR):
    if path not in sys.path:
        sys.path.insert(0, path)

from experiment.config import ExperimentConfig  # noqa: E402
from utils.logger import get_logger  # noqa: E402

SMALL_PARAMS = {
    "n_agents": 3,
    "dim": 2,
    "samples_per_agent": 5,
    "theta": 0.1,
    "horizon_T": 60,
    "trials_M": 2,
    "noise_nu": 0.01,
}


@pytest.fixture(autouse=True)
def _detach_log_file():
    # 命令会把默认日志器指向临时目录，测试结束后还原
    base = get_logger()
    level = base.get_log_level()
    yield
    base.log_file = None
    base.log_level = level


@pytest.fixture
def small_params(tmp_path):
    params = dict(SMALL_PARAMS)
    params["output_dir"] = str(tmp_path / "out")
    return params


@pytest.fixture
def make_config(small_params):
    """
    返回一个构造器：在小规模参数上叠加覆盖后生成已校验的配置
    """
    def make(**updates):
        data = dict(small_params)
        data.update(updates)
        return ExperimentConfig.from_dict(data)
    return make


@pytest.fixture
def write_config(tmp_path, small_params):
    """
    把小规模参数（叠加覆盖）写成 JSON 配置文件，返回路径
    """
    def write(name="config.json", base=True, **updates):
        data = dict(small_params) if base else {}
        data.update(updates)
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return write
