"""spqr-lab 命令行主入口."""
import sys
from pathlib import Path

# 添加项目根目录到 Python 路径，确保可以直接运行此文件
project_root = Path(__file__).parent.parent.resolve()
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

import argparse
import logging
from typing import List, Optional

from pydantic import ValidationError

from app.apis.deps import EXIT_USAGE, build_config, usage_error
from app.apis.v1 import (
    command_certify,
    command_dimension,
    command_render,
    command_scan,
    command_verify,
    command_wsp,
)
from app.core.config import settings
from app.core.errors import SpqrError

logger = logging.getLogger(__name__)

COMMANDS = (
    command_certify,
    command_wsp,
    command_dimension,
    command_scan,
    command_render,
    command_verify,
)


def configure_logging(verbose: int = 0) -> None:
    """配置日志：默认 settings.LOG_LEVEL，-v 为 INFO，-vv 为 DEBUG；日志写到标准错误."""
    level = settings.LOG_LEVEL.upper()
    if settings.DEBUG or verbose >= 2:
        level = "DEBUG"
    elif verbose == 1:
        level = "INFO"
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    """构造带全部子命令的解析器."""
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="S_pqr 六映射自相似系统：重叠认证、WSP 见证、维数实验与参数扫描",
    )
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="提高日志级别")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in err['loc']) or '参数'}: {err['msg']}" for err in exc.errors()
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    解析命令行并执行子命令.

    Args:
        argv: 参数列表，默认 sys.argv[1:]

    Returns:
        int: 退出码（0 成功，1 数学上的否定结果，2 用法或参数错误）
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        config = build_config(args.command, args)
        return args.handler(config)
    except SpqrError as e:
        logger.error("参数错误[%s]: %s", e.code, e)
        return usage_error(e)
    except ValidationError as e:
        message = _validation_message(e)
        logger.error("配置校验失败: %s", message)
        sys.stderr.write(f"错误[INVALID_PARAMS]: {message}\n")
        return EXIT_USAGE
    except Exception as e:
        logger.error("未处理异常: %s", e, exc_info=True)
        sys.stderr.write(f"错误[INTERNAL_ERROR]: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
