"""维数实验 - Moran 方程求解、子系统维数序列、盒计数与覆盖和诊断."""
import logging
import math
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from app.core.config import settings
from app.core.errors import InsufficientDataError, SolverError, SpqrError
from app.core.logger import jdebug
from app.models.dimension import (
    BoxCountRow,
    BoxDimensionEstimate,
    CoverSumReport,
    MoranProblem,
    MoranSolution,
    SubsystemSequence,
)
from app.models.params import IFSParams
from app.services.affine_core import Interval
from app.services.ifs_model import IFSystem, IntervalCover, cover

logger = logging.getLogger(__name__)

# 求根区间右端倍增的上限
_MAX_BRACKET = 1.0e6

COVER_SUM_NOTE = (
    "diagnostic inconclusive: 在相似维数处 Σ_w |S_w([0,1])|^d = (Σ|λ_i|^d)^n 对每个 n 都等于 1，"
    "覆盖和不会随深度下降，因此无法由它看出 H^s(K) = 0"
)

SUBSYSTEM_NOTE = (
    "精确算术下 d_n 严格递增；binary64 下增量低于容差后只能断言不减"
)


def _solve_decreasing(f: Callable[[float], float], tol: float, label: str) -> MoranSolution:
    """
    对严格递减且 f(0) > 0 的函数求 f(d) = 0 的根.

    Raises:
        SolverError: 没有正根或残差达不到容差
    """
    if not tol > 0:
        raise SolverError(f"容差必须为正: {tol}")
    if f(0.0) <= 0:
        raise SolverError(f"dimension 0 system: {label} 在 d=0 处不大于 1，没有正根")

    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
        if hi > _MAX_BRACKET:
            raise SolverError(f"{label} 在 d ≤ {_MAX_BRACKET:g} 内找不到变号区间")

    if f(hi) == 0:
        root = hi
    else:
        root = optimize.bisect(f, 0.0, hi, xtol=tol * 1e-3, maxiter=500)
    residual = abs(f(root))
    if residual >= tol:
        raise SolverError(f"{label} 的残差 {residual:.3e} 未达到容差 {tol:g}")
    jdebug(logger, "Moran 方程求解完成", 节点="dimension_lab", 方程=label, d=root, 残差=residual)
    return MoranSolution(dimension=float(root), residual=float(residual), tol=tol)


def moran_solution(prob: MoranProblem, tol: Optional[float] = None) -> MoranSolution:
    """求解 Σ λ_i^d = 1，附带残差."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    ratios = np.asarray(prob.ratios, dtype=float)
    return _solve_decreasing(lambda d: float(np.sum(ratios ** d)) - 1.0, tol, f"{len(ratios)} 个映射的 Moran 方程")


def moran_dimension(prob: MoranProblem, tol: Optional[float] = None) -> float:
    """
    Moran 方程 Σ λ_i^d = 1 的唯一正根.

    Args:
        prob: 比例列表
        tol: 残差容差，默认 settings.DEFAULT_TOL

    Returns:
        float: d，满足 |Σ λ_i^d − 1| < tol

    Raises:
        SolverError: 单个映射（dimension 0 system）或无法求根
    """
    return moran_solution(prob, tol).dimension


def similarity_dimension(sys: IFSystem, tol: Optional[float] = None) -> MoranSolution:
    """系统全部映射的相似维数."""
    return moran_solution(MoranProblem(ratios=[float(abs(f.ratio)) for f in sys.maps]), tol)


def _check_coefficient(c: int) -> None:
    if c not in (2, 4):
        raise SpqrError(f"系数 c 只能取 2 或 4: {c}", code="INVALID_COEFFICIENT")


def infinite_system_dimension(params: IFSParams, c: int = 4, tol: Optional[float] = None) -> MoranSolution:
    """
    无穷系统 S* = {S_1^k S_j} 的维数：p^d + q^d + c·r^d = 1.

    c=2 对应三映射版本的方程，c=4 对应六映射系统（四个比例为 r 的映射）。
    """
    _check_coefficient(c)
    tol = settings.DEFAULT_TOL if tol is None else tol
    p, q, r = float(params.p), float(params.q), float(params.r)
    return _solve_decreasing(
        lambda d: p ** d + q ** d + c * r ** d - 1.0, tol, f"p^d + q^d + {c}r^d = 1"
    )


def subsystem_dimension(params: IFSParams, n: int, c: int = 4, tol: Optional[float] = None) -> float:
    """
    截断子系统的维数：Σ_{k=0}^{n} p^{kd}·(q^d + c·r^d) = 1.

    Args:
        params: 参数
        n: 截断指数 n ≥ 0
        c: 比例为 r 的映射个数（2 或 4）
        tol: 残差容差

    Returns:
        float: d_n
    """
    _check_coefficient(c)
    if n < 0:
        raise SpqrError(f"n 必须非负: {n}", code="INVALID_EXPONENT")
    tol = settings.DEFAULT_TOL if tol is None else tol
    p, q, r = float(params.p), float(params.q), float(params.r)
    k = np.arange(n + 1, dtype=float)

    def f(d: float) -> float:
        return float(np.sum(p ** (k * d))) * (q ** d + c * r ** d) - 1.0

    return _solve_decreasing(f, tol, f"n={n} 的子系统方程").dimension


def subsystem_sequence(
    params: IFSParams,
    n_max: int,
    c: int = 4,
    tol: Optional[float] = None,
) -> SubsystemSequence:
    """
    子系统维数序列 d_0..d_{n_max} 与极限 d*.

    Returns:
        SubsystemSequence: 序列、与极限的差距及经验收敛率（相邻差距之比的中位数）
    """
    values = [subsystem_dimension(params, n, c, tol) for n in range(n_max + 1)]
    limit = infinite_system_dimension(params, c, tol).dimension
    gaps = [limit - d for d in values]

    resolved = settings.DEFAULT_TOL * 100 if tol is None else tol * 100
    ratios = [
        gaps[k + 1] / gaps[k]
        for k in range(len(gaps) - 1)
        if gaps[k] > resolved and gaps[k + 1] > resolved
    ]
    rate = float(np.median(ratios)) if ratios else None
    return SubsystemSequence(c=c, values=values, limit=limit, gaps=gaps, rate=rate, note=SUBSYSTEM_NOTE)


def count_boxes(intervals: Sequence[Interval], delta: Fraction) -> int:
    """
    与闭区间并集相交的 δ 网格单元 [kδ, (k+1)δ) 个数（精确计数）.

    每个区间 [lo, hi] 占据 floor(lo/δ) .. ceil(hi/δ)−1 号单元，单元区间合并后求和。
    """
    if delta <= 0:
        raise SpqrError(f"盒边长必须为正: {delta}", code="INVALID_SCALE")
    ranges: List[Tuple[int, int]] = []
    for iv in intervals:
        start = math.floor(iv.lo / delta)
        end = max(start, math.ceil(iv.hi / delta) - 1)
        ranges.append((start, end))
    ranges.sort()

    total = 0
    current: Optional[Tuple[int, int]] = None
    for start, end in ranges:
        if current and start <= current[1] + 1:
            current = (current[0], max(current[1], end))
        else:
            if current:
                total += current[1] - current[0] + 1
            current = (start, end)
    if current:
        total += current[1] - current[0] + 1
    return total


def box_dimension_estimate(cover_family: Sequence[IntervalCover]) -> BoxDimensionEstimate:
    """
    由一组覆盖估计盒维数.

    每个覆盖取 δ = 最大包络宽度，合并重叠包络后精确计数 δ 盒，
    对 log N(δ) 与 log(1/δ) 做最小二乘拟合。

    Args:
        cover_family: 深度递增的覆盖（至少 3 个）

    Returns:
        BoxDimensionEstimate: 斜率与逐深度的计数、滚动斜率、残差

    Raises:
        InsufficientDataError: 覆盖少于 3 个或尺度不足 3 个
    """
    if len(cover_family) < 3:
        raise InsufficientDataError(f"盒计数至少需要 3 个覆盖，实际 {len(cover_family)} 个")

    deltas = [c.max_width() for c in cover_family]
    if len(set(deltas)) < 3:
        raise InsufficientDataError("盒计数至少需要 3 个不同的尺度")
    counts = [count_boxes(c.merged(), delta) for c, delta in zip(cover_family, deltas)]

    x = np.array([math.log(1 / delta) for delta in deltas], dtype=float)
    y = np.log(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)

    rows: List[BoxCountRow] = []
    for idx, (c, delta, count) in enumerate(zip(cover_family, deltas, counts)):
        running = None
        if idx >= 2:
            running = float(np.polyfit(x[: idx + 1], y[: idx + 1], 1)[0])
        rows.append(
            BoxCountRow(
                depth=c.depth,
                scale=float(delta),
                count=count,
                running_slope=running,
                residual=float(residuals[idx]),
            )
        )
    jdebug(logger, "盒维数估计", 节点="dimension_lab", 斜率=float(slope), 深度=[c.depth for c in cover_family])
    return BoxDimensionEstimate(slope=float(slope), rows=rows)


def system_box_dimension(sys: IFSystem, depths: Sequence[int]) -> BoxDimensionEstimate:
    """对系统在给定深度上生成覆盖并估计盒维数."""
    return box_dimension_estimate([cover(sys, depth) for depth in depths])


def cover_sum(sys: IFSystem, d: float, depth: int) -> float:
    """
    深度 n 自然覆盖的覆盖和 Σ_w |S_w([0,1])|^d.

    Raises:
        SpqrError: d ≤ 0 或 depth < 1
        DepthCapError: 深度超过完整覆盖上限
    """
    if not d > 0:
        raise SpqrError(f"指数 d 必须为正: {d}", code="INVALID_EXPONENT")
    if depth < 1:
        raise SpqrError(f"深度必须 ≥ 1: {depth}", code="INVALID_DEPTH")
    widths = np.array([float(iv.width()) for iv in cover(sys, depth).intervals()], dtype=float)
    return float(np.sum(widths ** d))


def cover_sum_report(sys: IFSystem, d: float, depths: Sequence[int]) -> CoverSumReport:
    """多个深度的覆盖和，附诊断说明."""
    return CoverSumReport(
        d=d,
        depths=list(depths),
        sums=[cover_sum(sys, d, depth) for depth in depths],
        note=COVER_SUM_NOTE,
    )
