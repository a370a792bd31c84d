#!/usr/bin/env python3
"""
带噪网络分布式随机复合优化仿真器主入口文件
"""

import argparse
import os
import sys

# 添加src目录到Python路径
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from experiment.commands import cmd_run, cmd_sweep, cmd_verify, default_jobs  # noqa: E402


def build_parser():
    """构造命令行解析器"""
    # 全局选项既可写在子命令前也可写在子命令后
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="并发试验进程数（缺省取环境变量 NOISY_OPT_JOBS，否则 1）")
    common.add_argument("--output-dir", default=argparse.SUPPRESS, help="输出目录，覆盖配置中的 output_dir")
    common.add_argument("--seed-override", type=int, default=argparse.SUPPRESS, help="替换配置中的 master_seed")

    parser = argparse.ArgumentParser(
        prog="main.py",
        description="DSCMD-N / DSCDA-N 带噪网络分布式优化实验",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", parents=[common], help="运行一次实验")
    run_parser.add_argument("config", help="JSON 配置文件")

    verify_parser = sub.add_parser("verify", parents=[common], help="运行验收实验")
    verify_parser.add_argument("target", help="验收实验名或带 verify 块的配置文件")

    sweep_parser = sub.add_parser("sweep", parents=[common], help="沿一个配置轴运行一组实验")
    sweep_parser.add_argument("config", help="JSON 配置文件")
    sweep_parser.add_argument("--axis", required=True, help="kappa1 / kappa2 / nu / N")
    sweep_parser.add_argument("--values", required=True, help="逗号分隔的取值，例如 0.25,0.5,0.75")
    return parser


def main(argv=None):
    """主函数，返回退出码"""
    args = build_parser().parse_args(argv)
    jobs = getattr(args, "jobs", None) or default_jobs()
    common = {
        "jobs": jobs,
        "output_dir": getattr(args, "output_dir", None),
        "seed_override": getattr(args, "seed_override", None),
    }

    if args.command == "run":
        return cmd_run(args.config, **common)
    if args.command == "verify":
        return cmd_verify(args.target, **common)
    return cmd_sweep(args.config, args.axis, args.values, **common)


if __name__ == "__main__":
    sys.exit(main())
