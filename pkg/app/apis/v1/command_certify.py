"""certify 子命令 - 认证各片只在 h 处相交."""
import argparse
import logging

from app.apis.deps import EXIT_NEGATIVE, EXIT_OK, add_output_args, add_param_args, emit_report, require_params
from app.core.logger import jinfo
from app.models.run_config import RunConfig
from app.services.ifs_model import build_spqr
from app.services.overlap_certifier import OverlapCertifier, overlap_certifier, osc_hull_check

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    """注册 certify 子命令."""
    parser: argparse.ArgumentParser = subparsers.add_parser("certify", help="认证 K_i ∩ K_j 的结构")
    add_param_args(parser)
    add_output_args(parser)
    parser.add_argument("--eps", help="尺度截断 ε，如 1e-12 或 1/1000000")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    """
    运行全部 15 对片的认证.

    Returns:
        int: 0 表示在 ε 以上认证了唯一接触点；1 表示存在见证或未解决分支
    """
    params = require_params(config)
    system = build_spqr(params)
    certifier = overlap_certifier if config.threads is None else OverlapCertifier(workers=config.threads)

    certificate = certifier.certify_all_pairs(system, config.eps)
    first, second = certifier.critical_addresses(system)
    exit_code = EXIT_OK if certificate.certified else EXIT_NEGATIVE
    jinfo(logger, "certify 完成", 节点="command_certify", 退出码=exit_code, 见证数=len(certificate.witnesses))

    result = {
        "certificate": certificate.model_dump(mode="json", by_alias=True),
        "critical_addresses": [str(first), str(second)],
        "osc_hull_check": osc_hull_check(params).model_dump(mode="json"),
    }
    return emit_report(config, result, exit_code)
