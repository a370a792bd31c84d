"""
命令模块
run / verify / sweep 三个子命令，返回进程退出码
"""

import json
import os

from analysis.rates import regime_check
from experiment.acceptance import run_acceptance
from experiment.artifacts import ArtifactWriter
from experiment.config import ACCEPTANCE_NAMES, ExperimentConfig, SimConfig
from experiment.plots import plot_sweep
from experiment.runner import run_experiment
from utils.errors import ValidationError
from utils.logger import get_logger
from utils.timer import BudgetTimer

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

JOBS_ENV = "NOISY_OPT_JOBS"
ACCEPTANCE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "configs", "acceptance")

logger = get_logger("cli")


def default_jobs():
    """
    --jobs 的缺省值，取自环境变量 NOISY_OPT_JOBS
    """
    value = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning(f"ignoring {JOBS_ENV}={value!r}")
        return 1


def load_config(config_path, output_dir=None, seed_override=None):
    """
    读取配置并应用命令行覆盖

    Args:
        config_path (str): JSON 配置路径
        output_dir (str): --output-dir
        seed_override (int): --seed-override，替换 master_seed

    Returns:
        ExperimentConfig: 已校验的配置
    """
    overrides = {}
    if output_dir is not None:
        overrides["output_dir"] = output_dir
    if seed_override is not None:
        overrides["master_seed"] = int(seed_override)
    return ExperimentConfig.from_file(config_path, overrides)


def _attach_log(output_dir, level):
    base = get_logger()
    base.set_log_level(level)
    os.makedirs(output_dir, exist_ok=True)
    base.set_log_file(os.path.join(output_dir, "run.log"))


def _guarded(command):
    """
    把异常映射成退出码：ValidationError -> 2，其它异常 -> 3
    """
    try:
        return command()
    except ValidationError as e:
        logger.error(f"invalid configuration: {e}")
        return EXIT_VALIDATION
    except Exception as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME


def cmd_run(config_path, jobs=None, output_dir=None, seed_override=None):
    """
    运行一次实验

    Returns:
        int: 0 成功，2 配置不合法，3 运行失败（含任一试验失败）
    """
    def command():
        config = load_config(config_path, output_dir, seed_override)
        _attach_log(config["output_dir"], config["log_level"])
        result = run_experiment(config, jobs or default_jobs())
        if result.failed:
            logger.error(f"trials {result.failed} failed")
            return EXIT_RUNTIME
        return EXIT_OK

    return _guarded(command)


def resolve_acceptance(name_or_path):
    """
    验收实验名映射到 configs/acceptance/<name>.json，其余按路径处理
    """
    if os.path.isfile(name_or_path):
        return name_or_path
    if name_or_path in ACCEPTANCE_NAMES:
        return os.path.normpath(os.path.join(ACCEPTANCE_DIR, f"{name_or_path}.json"))
    raise ValidationError(f"{name_or_path!r} is neither a config file nor an acceptance experiment",
                          key="verify", admissible=str(list(ACCEPTANCE_NAMES)))


def cmd_verify(name_or_path, jobs=None, output_dir=None, seed_override=None):
    """
    运行验收实验及其检查

    Returns:
        int: 全部检查通过为 0，否则 1；配置错误 2，运行异常 3
    """
    def command():
        config = load_config(resolve_acceptance(name_or_path), output_dir, seed_override)
        if config["verify"] is None:
            raise ValidationError("config has no verify block", key="verify",
                                  admissible=str(list(ACCEPTANCE_NAMES)))
        out = config["output_dir"]
        _attach_log(out, config["log_level"])
        name = config["verify"]["name"]
        timer = BudgetTimer(config["verify"].get("budget_seconds"))
        timer.start()
        reports = run_acceptance(name, config, jobs or default_jobs(), out)
        timer.pause()
        passed = all(r.passed for r in reports)
        ArtifactWriter(out).write_json("verify.json", {
            "experiment": name,
            "passed": passed,
            "checks": [r.to_dict() for r in reports],
            "timing": timer.report(),
        })
        for r in reports:
            logger.info(f"{name}/{r.name}: {'pass' if r.passed else 'FAIL'} "
                        f"(measured {r.to_dict()['measured']}, expected {r.to_dict()['expected']})")
        if timer.is_over_budget():
            logger.warning(f"{name} ran over its budget ({timer.format_time()})")
        return EXIT_OK if passed else EXIT_CHECK_FAILED

    return _guarded(command)


def parse_values(text):
    """
    解析 --values：逗号分隔，每项按 JSON 数值读取
    """
    if isinstance(text, (list, tuple)):
        return list(text)
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    try:
        return [json.loads(item) for item in items]
    except json.JSONDecodeError as e:
        raise ValidationError(f"bad sweep value: {e}", key="values", admissible="comma-separated numbers") from e


def cmd_sweep(config_path, axis, values, jobs=None, output_dir=None, seed_override=None):
    """
    沿一个配置轴运行一组子实验，写出 comparison.csv

    Returns:
        int: 0 全部成功，2 配置不合法或取值为空，3 任一子实验失败
    """
    def command():
        key = SimConfig.canonical_key(axis)
        if key not in SimConfig.SWEEP_AXES:
            raise ValidationError(f"cannot sweep over {axis!r}", key="axis", admissible=str(list(SimConfig.SWEEP_AXES)))
        sweep_values = parse_values(values)
        if not sweep_values:
            raise ValidationError("sweep needs at least one value", key="values", admissible="non-empty list")
        base = load_config(config_path, output_dir, seed_override)
        root = base["output_dir"]
        _attach_log(root, base["log_level"])
        # 先校验全部取值，再开始计算
        configs = [(v, base.with_updates(**{key: v, "output_dir": os.path.join(root, str(v))})) for v in sweep_values]

        rows, curves, fits, failed, entries = [], {}, {}, [], []
        for value, config in configs:
            try:
                result = run_experiment(config, jobs or default_jobs())
            except Exception as e:
                logger.error(f"{key}={value} failed: {e}")
                failed.append(value)
                entries.append({"value": value, "status": "failed", "error": str(e)})
                continue
            if result.failed:
                failed.append(value)
            slope = result.fit.slope if result.fit is not None else float("nan")
            if result.curve is not None:
                curves[value] = result.curve
                for k, T in enumerate(result.curve.checkpoints):
                    rows.append((value, int(T), result.curve.mean[k], result.curve.stderr[k], result.bound[k], slope))
            if result.fit is not None:
                fits[value] = result.fit
            entries.append({"value": value, "status": "failed" if result.failed else "ok", "fit": result.fit,
                            "constants": result.constants, "passed": result.passed})

        writer = ArtifactWriter(root)
        writer.write_comparison(rows)
        summary = {"axis": key, "values": sweep_values, "experiments": entries, "failed": failed}
        if key == "noise_kappa2" and len(fits) >= 2:
            summary["regime"] = regime_check(fits)
        if base["plot"] and curves:
            plot_sweep(writer.path("comparison.svg"), curves, key)
        writer.write_summary(summary)
        return EXIT_RUNTIME if failed else EXIT_OK

    return _guarded(command)
