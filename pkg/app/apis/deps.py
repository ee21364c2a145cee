"""命令行公共依赖 - 参数解析、系统构造、报告输出与退出码."""
import argparse
import logging
import sys
from typing import Dict, List, Optional, Tuple

from app.core.errors import ParameterError, SpqrError
from app.core.logger import jdebug
from app.models.params import IFSParams, ParamMode
from app.models.run_config import Preset, RunConfig
from app.services.ifs_model import IFSystem, build_spqr, cantor_system, halving_system
from app.services.report_generator import report_generator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1  # 见证存在 / 目标未达到 / 抽样违反
EXIT_USAGE = 2

# argparse 命名空间中不属于 RunConfig 的键
_NON_CONFIG_KEYS = {"handler", "verbose", "relaxed"}


def parse_mn(text: str) -> List[Tuple[int, int]]:
    """
    解析 "m:n,m:n" 形式的分支列表.

    Raises:
        ParameterError: 格式错误或出现负数
    """
    pairs: List[Tuple[int, int]] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            m_text, n_text = chunk.split(":")
            m, n = int(m_text), int(n_text)
        except ValueError:
            raise ParameterError(f"无法解析分支 {chunk!r}，应为 m:n")
        if m < 0 or n < 0:
            raise ParameterError(f"分支指数必须非负: {chunk}")
        pairs.append((m, n))
    if not pairs:
        raise ParameterError("--mn 至少需要一个 m:n")
    return pairs


def add_param_args(parser: argparse.ArgumentParser, with_preset: bool = False) -> None:
    """--p/--q/--r/--relaxed，可选 --preset."""
    parser.add_argument("--p", help="S_1 的压缩比，如 1/40 或 0.025")
    parser.add_argument("--q", help="S_3 的压缩比")
    parser.add_argument("--r", help="其余四个映射的压缩比")
    parser.add_argument("--relaxed", action="store_true", help="放宽参数盒到 (0,1)")
    if with_preset:
        parser.add_argument(
            "--preset", choices=[p.value for p in Preset], default=Preset.SPQR.value, help="系统预设"
        )


def add_output_args(parser: argparse.ArgumentParser) -> None:
    """--out/--threads."""
    parser.add_argument("--out", help="输出目录；省略时 JSON 报告写到标准输出")
    parser.add_argument("--threads", type=int, help="并行度，默认可用 CPU 数")


def build_config(command: str, args: argparse.Namespace) -> RunConfig:
    """
    把 argparse 命名空间转换为 RunConfig.

    未提供的选项不传入，使用 RunConfig 的默认值。
    """
    data = {
        key: value
        for key, value in vars(args).items()
        if key not in _NON_CONFIG_KEYS and key != "command" and value is not None
    }
    if getattr(args, "relaxed", False):
        data["mode"] = ParamMode.RELAXED
    if isinstance(data.get("mn"), str):
        data["mn"] = parse_mn(data["mn"])
    config = RunConfig(command=command, **data)
    jdebug(logger, "运行配置", 节点="deps", 配置=config.model_dump(mode="json"))
    return config


def require_params(config: RunConfig, need_q: bool = True) -> IFSParams:
    """
    由配置构造参数三元组并检查参数盒.

    need_q 为 False 时（扫描、tech2）q 取 r/2 仅用于检查 p、r。

    Raises:
        ParameterError: 缺少参数或越出参数盒
    """
    missing = [name for name in ("p", "q", "r") if getattr(config, name) is None and (need_q or name != "q")]
    if missing:
        raise ParameterError(f"缺少参数: {', '.join('--' + m for m in missing)}")
    q = config.q if config.q is not None else config.r / 2
    params = IFSParams(p=config.p, q=q, r=config.r, mode=config.mode)
    params.check_box()
    return params


def resolve_system(config: RunConfig) -> IFSystem:
    """按预设构造系统."""
    if config.preset == Preset.CANTOR:
        return cantor_system()
    if config.preset == Preset.HALVING:
        return halving_system()
    return build_spqr(require_params(config))


def emit_report(
    config: RunConfig,
    result,
    exit_code: int,
    files: Optional[Dict[str, str]] = None,
) -> int:
    """
    输出 JSON 报告与附带文件，返回退出码.

    指定 --out 时写入 <out>/<command>.json 与 files 中的各文件；
    否则 JSON 写到标准输出，附带文件不输出。
    """
    report = report_generator.build_report(config, result, exit_code)
    text = report_generator.render_json(report)
    if config.out:
        report_generator.write_text(text, config.out, f"{config.command}.json")
        for name, content in (files or {}).items():
            report_generator.write_text(content, config.out, name)
    else:
        sys.stdout.write(text)
    return exit_code


def usage_error(exc: SpqrError) -> int:
    """SpqrError 的一行提示，退出码 2."""
    sys.stderr.write(f"错误[{exc.code}]: {exc}\n")
    return EXIT_USAGE
