"""render 子命令 - 覆盖的 SVG 条形图."""
import argparse
import sys

from app.apis.deps import EXIT_OK, add_output_args, add_param_args, emit_report, resolve_system
from app.models.drawing import RenderRequest
from app.models.run_config import RunConfig
from app.services.drawing_service import drawing_service

DEFAULT_DEPTH = 4


def register(subparsers) -> None:
    """注册 render 子命令."""
    parser: argparse.ArgumentParser = subparsers.add_parser("render", help="渲染深度 0..N 的覆盖")
    add_param_args(parser, with_preset=True)
    add_output_args(parser)
    parser.add_argument("--depth", type=int, help="最大深度，默认 4")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    """指定 --out 时写入 render.svg 与 render.json；否则 SVG 写到标准输出."""
    system = resolve_system(config)
    depth = DEFAULT_DEPTH if config.depth is None else config.depth
    result = drawing_service.render_cover(system, RenderRequest(depth=depth))
    if not config.out:
        sys.stdout.write(result.svg)
        return EXIT_OK
    summary = result.model_dump(mode="json", exclude={"svg"})
    return emit_report(config, summary, EXIT_OK, {"render.svg": result.svg})
