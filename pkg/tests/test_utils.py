"""
工具模块测试：日志、计时、随机流与错误格式
"""

import io
import re

import numpy as np
import pytest

from utils.errors import ConfigMismatch, InnerSolverFailure, ValidationError
from utils.logger import ComponentLogger, Logger
from utils.rng import STREAM_LINK_NOISE, STREAM_ORACLE, counter_generator, derive_seed, philox_key
from utils.timer import BudgetTimer, Timer


def test_logger_filters_by_level_and_writes_file(tmp_path):
    stream = io.StringIO()
    log_file = tmp_path / "logs" / "run.log"
    logger = Logger(log_file=str(log_file), log_level="warning", stream=stream)
    logger.info("hidden")
    logger.warning("shown")

    console = stream.getvalue()
    assert "hidden" not in console
    assert re.search(r"^\[\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\] \[WARNING\] shown$", console, re.M)
    assert log_file.read_text(encoding="utf-8").strip().endswith("[WARNING] shown")


def test_component_logger_prefixes_messages():
    stream = io.StringIO()
    base = Logger(log_level="DEBUG", stream=stream)
    ComponentLogger("engine", base).debug("step 3")
    assert "[DEBUG] [engine] step 3" in stream.getvalue()
    assert ComponentLogger("engine", base).is_enabled_for("DEBUG")


def test_invalid_level_is_ignored():
    stream = io.StringIO()
    logger = Logger(stream=stream)
    logger.set_log_level("LOUD")
    assert logger.get_log_level() == "INFO"
    assert "Invalid log level" in stream.getvalue()


def test_timer_accumulates_and_formats():
    with Timer() as timer:
        sum(range(1000))
    assert not timer.is_running()
    assert timer.get_elapsed() >= 0.0
    assert re.fullmatch(r"\d{2}:\d{2}:\d{2}\.\d{3}", timer.format_time())


def test_budget_timer_report():
    unlimited = BudgetTimer()
    unlimited.start()
    unlimited.pause()
    assert unlimited.get_remaining() is None
    assert unlimited.report()["within_budget"]

    exhausted = BudgetTimer(budget_seconds=-1.0)
    exhausted.start()
    exhausted.pause()
    assert exhausted.is_over_budget()
    assert exhausted.report()["within_budget"] is False


def test_derive_seed_is_order_sensitive():
    assert derive_seed(7, 3) == derive_seed(7, 3)
    assert derive_seed(7, 3) != derive_seed(3, 7)
    assert 0 <= derive_seed(1, 2, 3) < 2 ** 64


def test_counter_generator_streams_are_addressable():
    key = philox_key(123)
    a = counter_generator(key, STREAM_LINK_NOISE, t=5, lane=2).standard_normal(4)
    b = counter_generator(key, STREAM_LINK_NOISE, t=5, lane=2).standard_normal(4)
    np.testing.assert_array_equal(a, b)

    other_round = counter_generator(key, STREAM_LINK_NOISE, t=6, lane=2).standard_normal(4)
    other_stream = counter_generator(key, STREAM_ORACLE, t=5, lane=2).standard_normal(4)
    assert not np.allclose(a, other_round)
    assert not np.allclose(a, other_stream)


def test_validation_error_names_key_and_range():
    err = ValidationError("invalid value 1.5", key="noise_kappa2", admissible="(0, 1]")
    assert "noise_kappa2" in str(err)
    assert "(0, 1]" in str(err)
    assert err.key == "noise_kappa2"
    assert isinstance(ConfigMismatch("x", key="problem_variant"), ValidationError)


def test_inner_solver_failure_tagging():
    err = InnerSolverFailure("no convergence", residual=1e-3).tagged(4, 17)
    assert err.agent == 4
    assert err.t == 17
    with pytest.raises(InnerSolverFailure):
        raise err
