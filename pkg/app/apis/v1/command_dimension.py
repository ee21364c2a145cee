"""dimension 子命令 - Moran 方程、子系统序列、盒计数与覆盖和."""
import argparse
import logging

from app.apis.deps import EXIT_OK, add_output_args, add_param_args, emit_report, resolve_system
from app.core.errors import InsufficientDataError
from app.core.logger import jwarn
from app.models.dimension import DimensionReport
from app.models.run_config import RunConfig
from app.services.dimension_lab import (
    cover_sum_report,
    infinite_system_dimension,
    similarity_dimension,
    subsystem_sequence,
    system_box_dimension,
)
from app.services.report_generator import report_generator

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 6
# 覆盖和只需看出是否随深度下降
COVER_SUM_MAX_DEPTH = 5

COEFFICIENT_NOTE = (
    "p^d + q^d + 2r^d = 1 对应三映射的无穷系统；六映射系统 S_pqr 有四个比例为 r 的映射，"
    "对应 p^d + q^d + 4r^d = 1，两者都给出"
)


def register(subparsers) -> None:
    """注册 dimension 子命令."""
    parser: argparse.ArgumentParser = subparsers.add_parser("dimension", help="维数计算与诊断")
    add_param_args(parser, with_preset=True)
    add_output_args(parser)
    parser.add_argument("--tol", type=float, help="求解残差容差，默认 1e-12")
    parser.add_argument("--depth", type=int, help="盒计数的最大覆盖深度，默认 6")
    parser.add_argument("--n-max", dest="n_max", type=int, help="子系统序列的最大 n，默认 20")
    parser.add_argument("--c", type=int, choices=[2, 4], help="子系统序列使用的系数，默认 4")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    """计算并输出全部维数量."""
    depth = DEFAULT_DEPTH if config.depth is None else config.depth
    notes = []
    system = resolve_system(config)
    params = system.params

    similarity = similarity_dimension(system, config.tol)
    report = DimensionReport(system=system.name, similarity_dimension=similarity)
    if params is not None:
        report.infinite_c2 = infinite_system_dimension(params, c=2, tol=config.tol)
        report.infinite_c4 = infinite_system_dimension(params, c=4, tol=config.tol)
        report.subsystem = subsystem_sequence(params, config.n_max, c=config.c, tol=config.tol)
        notes.append(COEFFICIENT_NOTE)

    files = {}
    try:
        report.box = system_box_dimension(system, list(range(1, depth + 1)))
        files["box_counts.csv"] = report_generator.frame_to_csv(report_generator.box_frame(report.box))
    except InsufficientDataError as e:
        jwarn(logger, "跳过盒计数", 节点="command_dimension", 原因=str(e))
        notes.append(f"盒计数跳过: {e}")

    sum_depths = list(range(1, min(depth, COVER_SUM_MAX_DEPTH) + 1))
    if sum_depths:
        report.cover_sum = cover_sum_report(system, similarity.dimension, sum_depths)
    report.notes = notes
    return emit_report(config, report, EXIT_OK, files)
