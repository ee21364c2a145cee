"""scan 子命令 - 在 D_mn(p, r) 上扫描坏参数集合."""
import argparse

from app.apis.deps import EXIT_OK, add_output_args, emit_report
from app.core.errors import ParameterError
from app.models.run_config import RunConfig
from app.services.param_scanner import scan_delta_mn
from app.services.report_generator import report_generator

DEFAULT_DEPTH = 6


def register(subparsers) -> None:
    """注册 scan 子命令."""
    parser: argparse.ArgumentParser = subparsers.add_parser("scan", help="网格扫描 Δ_mn(p, r)")
    parser.add_argument("--p", help="S_1 的压缩比")
    parser.add_argument("--r", help="压缩比 r")
    add_output_args(parser)
    parser.add_argument("--mn", help='分支列表，如 "0:0,0:1,1:1"，默认 0:0')
    parser.add_argument("--grid", type=int, help="每个 D_mn 的网格点数，默认 256")
    parser.add_argument("--depth", type=int, help="每个 word 的最大追加深度，默认 6")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    """逐个 (m, n) 扫描；D_mn 为空时输出只有表头的 CSV."""
    if config.p is None or config.r is None:
        raise ParameterError("scan 需要 --p 与 --r")
    depth = DEFAULT_DEPTH if config.depth is None else config.depth

    results = []
    files = {}
    for m, n in config.mn:
        result = scan_delta_mn(config.p, config.r, m, n, config.grid, depth, workers=config.threads)
        results.append(result)
        files[f"scan_m{m}_n{n}.csv"] = report_generator.frame_to_csv(report_generator.scan_frame(result))
    return emit_report(config, {"scans": report_generator.scan_summary(results)}, EXIT_OK, files)
