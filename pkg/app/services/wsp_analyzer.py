"""WSP 见证分析 - 构造 H_m、G_n 并搜索使 G_n⁻¹H_m 趋于恒等的 (m, n)."""
import logging
from fractions import Fraction
from typing import List, Optional, Tuple

from app.core.config import settings
from app.core.errors import SpqrError
from app.core.logger import jdebug, jinfo, jwarn
from app.models.params import IFSParams
from app.models.wsp import WitnessPair, WitnessSearchResult
from app.services.affine_core import AffineMap1D, compose, decimal_str, inverse
from app.services.ifs_model import IFSystem

logger = logging.getLogger(__name__)


def _require_params(sys: IFSystem) -> IFSParams:
    if sys.params is None or sys.size != 6:
        raise SpqrError("H_m 与 G_n 只对 S_pqr 系统有定义", code="NOT_SPQR")
    return sys.params


def _check_exponent(name: str, value: int) -> None:
    if value < 0:
        raise SpqrError(f"{name} 必须非负: {value}", code="INVALID_EXPONENT")


def build_H(sys: IFSystem, m: int) -> AffineMap1D:
    """H_m = S_3∘S_1^m∘S_5."""
    _require_params(sys)
    _check_exponent("m", m)
    return compose(sys.symbol_map(3), compose(sys.symbol_map(1).power(m), sys.symbol_map(5)))


def build_G(sys: IFSystem, n: int) -> AffineMap1D:
    """G_n = S_4∘S_6^n∘S_2."""
    _require_params(sys)
    _check_exponent("n", n)
    return compose(sys.symbol_map(4), compose(sys.symbol_map(6).power(n), sys.symbol_map(2)))


def closed_form_H(params: IFSParams, m: int) -> AffineMap1D:
    """H_m(x) = h − p^m·q·(1−a) + p^m·q·r·x."""
    scale = params.p ** m * params.q
    return AffineMap1D(scale * params.r, params.h - scale * (1 - params.a))


def closed_form_G(params: IFSParams, n: int) -> AffineMap1D:
    """G_n(x) = h − r^{n+1}·(1−a) + r^{n+2}·x."""
    scale = params.r ** (n + 1)
    return AffineMap1D(scale * params.r, params.h - scale * (1 - params.a))


def closed_form_defect(params: IFSParams, m: int, n: int) -> Tuple[Fraction, Fraction]:
    """
    直接由公式计算 G_n⁻¹H_m 的 (比例, 偏移).

    比例为 p^m·q/r^{n+1}，偏移为 (r^{n+1} − p^m·q)(1−a)/r^{n+2}。
    """
    pq = params.p ** m * params.q
    rn = params.r ** (n + 1)
    return pq / rn, (rn - pq) * (1 - params.a) / (rn * params.r)


def defect(sys: IFSystem, m: int, n: int) -> WitnessPair:
    """
    计算 G_n⁻¹∘H_m 及其恒等缺陷.

    Args:
        sys: S_pqr 系统
        m: H 的指数
        n: G 的指数

    Returns:
        WitnessPair: 缺陷 (|ratio − 1|, |offset|)，精确值与十进制表示
    """
    composite = compose(inverse(build_G(sys, n)), build_H(sys, m))
    ratio_defect = abs(composite.ratio - 1)
    offset_defect = abs(composite.offset)
    return WitnessPair(
        m=m,
        n=n,
        ratio=composite.ratio,
        offset=composite.offset,
        ratio_defect=ratio_defect,
        offset_defect=offset_defect,
        ratio_defect_decimal=decimal_str(ratio_defect, settings.DECIMAL_DIGITS),
        offset_defect_decimal=decimal_str(offset_defect, settings.DECIMAL_DIGITS),
    )


def best_partner(params: IFSParams, m: int) -> int:
    """
    对给定 m 选出使 |log(p^m·q) − log(r^{n+1})| 最小的 n ≥ 0.

    先用倍增与二分找到最小的 k ≥ 1 使 r^k ≤ x = p^m·q，
    再比较 x/r^k 与 r^{k−1}/x（等价于比较 x² 与 r^{2k−1}），全程精确比较，不取对数。
    """
    x = params.p ** m * params.q
    r = params.r
    hi = 1
    while r ** hi > x:
        hi *= 2
    lo = hi // 2
    # 不变式: r^lo > x ≥ r^hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if r ** mid <= x:
            hi = mid
        else:
            lo = mid
    k = hi
    if k >= 2 and x * x > r ** (2 * k - 1):
        k -= 1
    return k - 1


def log_ratio_relation(p: Fraction, r: Fraction, max_exponent: int = 12) -> Optional[Tuple[int, int]]:
    """
    寻找小指数的精确关系 p^a = r^b（1 ≤ a, b ≤ max_exponent）.

    存在时 log p/log r = b/a 为有理数，{p^{-m} r^{n+1}} 是离散集合。
    只是启发式：找不到并不证明 log p/log r 为无理数。
    """
    for a in range(1, max_exponent + 1):
        pa = p ** a
        for b in range(1, max_exponent + 1):
            rb = r ** b
            if pa == rb:
                return a, b
            if rb < pa:
                break
    return None


def witness_search(sys: IFSystem, target_defect: float, max_m: int) -> WitnessSearchResult:
    """
    对 m = 0..max_m 逐个选出最优 n 并计算缺陷，达到目标即停止.

    Args:
        sys: S_pqr 系统
        target_defect: 比例缺陷目标（> 0）
        max_m: 最大 m

    Returns:
        WitnessSearchResult: 按比例缺陷排序的见证列表；未达到目标时 target_reached 为 False
    """
    params = _require_params(sys)
    if not target_defect > 0:
        raise SpqrError(f"目标缺陷必须为正: {target_defect}", code="INVALID_TARGET")
    _check_exponent("max_m", max_m)

    pairs: List[WitnessPair] = []
    best_so_far: List[Fraction] = []
    reached = False
    for m in range(max_m + 1):
        pair = defect(sys, m, best_partner(params, m))
        pairs.append(pair)
        best = pair.ratio_defect if not best_so_far else min(best_so_far[-1], pair.ratio_defect)
        best_so_far.append(best)
        if pair.ratio_defect < target_defect:
            reached = True
            break

    relation = log_ratio_relation(params.p, params.r)
    note = None
    if relation:
        note = f"p^{relation[0]} = r^{relation[1]}：可达比例是离散集合，缺陷下确界可能为正"
    if not reached:
        note = "target not reached" + (f"；{note}" if note else "")
        jwarn(logger, "未达到目标缺陷", 节点="wsp_analyzer", 目标=target_defect, 最大m=max_m, 最优=best_so_far[-1])
    else:
        jinfo(logger, "达到目标缺陷", 节点="wsp_analyzer", 目标=target_defect, m=pairs[-1].m, n=pairs[-1].n)
    jdebug(logger, "见证搜索完成", 节点="wsp_analyzer", 参数=params.label(), 搜索数=len(pairs))

    return WitnessSearchResult(
        params=params,
        target_defect=target_defect,
        max_m=max_m,
        searched_m=len(pairs) - 1,
        target_reached=reached,
        pairs=sorted(pairs, key=lambda w: (w.ratio_defect, w.m)),
        best_so_far=best_so_far,
        discrete=relation is not None,
        relation=list(relation) if relation else None,
        note=note,
    )
