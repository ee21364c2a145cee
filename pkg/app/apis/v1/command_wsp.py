"""wsp 子命令 - 搜索弱分离性质的失效见证."""
import argparse

from app.apis.deps import EXIT_NEGATIVE, EXIT_OK, add_output_args, add_param_args, emit_report, require_params
from app.models.run_config import RunConfig
from app.services.ifs_model import build_spqr
from app.services.report_generator import report_generator
from app.services.wsp_analyzer import witness_search


def register(subparsers) -> None:
    """注册 wsp 子命令."""
    parser: argparse.ArgumentParser = subparsers.add_parser("wsp", help="搜索 G_n⁻¹H_m 接近恒等映射的 (m, n)")
    add_param_args(parser)
    add_output_args(parser)
    parser.add_argument("--target", type=float, help="比例缺陷目标，默认 1e-3")
    parser.add_argument("--max-m", dest="max_m", type=int, help="最大 m，默认 20")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    """见证搜索；未达到目标时退出码为 1."""
    system = build_spqr(require_params(config))
    result = witness_search(system, config.target, config.max_m)
    csv = report_generator.frame_to_csv(report_generator.wsp_frame(result))
    exit_code = EXIT_OK if result.target_reached else EXIT_NEGATIVE
    return emit_report(config, result, exit_code, {"wsp.csv": csv})
