"""verify 子命令 - 位移界、反 Lipschitz 不等式、地址映射与一级分离的抽样检查."""
import argparse

from app.apis.deps import EXIT_NEGATIVE, EXIT_OK, add_output_args, add_param_args, emit_report, require_params
from app.core.errors import ParameterError
from app.models.run_config import RunConfig
from app.services.overlap_certifier import osc_hull_check
from app.services.param_scanner import verify_displacement, verify_tech1, verify_tech2

CHECKS = ("displacement", "tech2", "tech1", "osc")


def register(subparsers) -> None:
    """注册 verify 子命令."""
    parser: argparse.ArgumentParser = subparsers.add_parser("verify", help="抽样验证不等式")
    add_param_args(parser)
    add_output_args(parser)
    parser.add_argument("--check", choices=CHECKS, default="displacement", help="检查项，默认 displacement")
    parser.add_argument("--q2", help="位移 / 反 Lipschitz 检查中的 q'")
    parser.add_argument("--mn", help='tech2 的分支列表，如 "0:0,0:1"')
    parser.add_argument("--samples", type=int, help="样本数，默认 1000")
    parser.add_argument("--depth", type=int, help="地址截断深度，默认 settings.ADDRESS_DEPTH")
    parser.add_argument("--seed", type=int, help="随机种子")
    parser.set_defaults(handler=run)


def run(config: RunConfig) -> int:
    """
    运行一项检查.

    Returns:
        int: 0 表示没有违反；1 表示存在违反的样本（osc 检查为包络重叠）
    """
    check = config.check or "displacement"
    if check == "displacement":
        params = require_params(config)
        if config.q2 is None:
            raise ParameterError("displacement 检查需要 --q2")
        report = verify_displacement(
            params.p, params.q, config.q2, params.r, config.samples, depth=config.depth, seed=config.seed
        )
        return emit_report(config, report, EXIT_NEGATIVE if report.violations else EXIT_OK)

    if check == "tech2":
        params = require_params(config, need_q=False)
        reports = [
            verify_tech2(
                params.p, params.r, m, n, q=config.q, q2=config.q2,
                samples=config.samples, depth=config.depth, seed=config.seed,
            )
            for m, n in config.mn
        ]
        violations = sum(r.violations for r in reports)
        result = {"reports": [r.model_dump(mode="json") for r in reports]}
        return emit_report(config, result, EXIT_NEGATIVE if violations else EXIT_OK)

    params = require_params(config)
    if check == "tech1":
        report = verify_tech1(params, config.samples, depth=config.depth, seed=config.seed)
        return emit_report(config, report, EXIT_NEGATIVE if report.violations else EXIT_OK)

    report = osc_hull_check(params)
    return emit_report(config, report, EXIT_OK if report.separated else EXIT_NEGATIVE)
