"""参数扫描服务 - D_mn 网格分类、坏集合维数估计与位移 / 反 Lipschitz 抽样验证."""
import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import ParameterError, SpqrError
from app.core.executor import parallel_map
from app.core.logger import jdebug, jinfo, jwarn
from app.models.certificate import WitnessKind
from app.models.params import SPQR_A, IFSParams
from app.models.scan import (
    DisplacementReport,
    ScanClass,
    ScanResult,
    ScanRow,
    Tech1Report,
    Tech2Report,
)
from app.services.affine_core import Interval, parse_word, to_scalar
from app.services.ifs_model import (
    Address,
    IFSystem,
    address_metric,
    address_point,
    address_value,
    build_spqr,
    cylinder,
)
from app.services.overlap_certifier import branch_words, refine_branch

logger = logging.getLogger(__name__)

SCAN_NOTE = (
    "坏集合的盒维数由深度截断后的超集在二进粗化网格上估计，只反映尺度趋势；"
    "上界针对 Hausdorff 维数，本估计不构成对该上界的验证"
)

TECH2_THRESHOLD = Fraction(1, 35)

# 随机有理数 q 的分母
_Q_SAMPLING_DENOMINATOR = 2 ** 20


def dmn_interval(p, r, m: int, n: int) -> Optional[Interval]:
    """
    参数区间 D_mn(p, r) = (a·r^{n+1}/p^m, r).

    返回的 Interval 端点即开区间的端点；左端点 ≥ r 时区间为空，返回 None。
    """
    p, r = to_scalar(p), to_scalar(r)
    if m < 0 or n < 0:
        raise SpqrError(f"m, n 必须非负: m={m}, n={n}", code="INVALID_EXPONENT")
    lo = SPQR_A * r ** (n + 1) / p ** m
    if lo >= r:
        return None
    return Interval(lo, r)


def bad_set_bound(r) -> float:
    """坏集合维数上界 −2·log6/log r."""
    return -2.0 * math.log(6) / math.log(float(to_scalar(r)))


def grid_points(dmn: Interval, grid_size: int) -> List[Fraction]:
    """开区间内的 grid_size 个单元中点 lo + (2k+1)(hi−lo)/(2G)（精确）."""
    step = dmn.width() / (2 * grid_size)
    return [dmn.lo + (2 * k + 1) * step for k in range(grid_size)]


def classify(p, q, r, m: int, n: int, depth: int) -> ScanRow:
    """
    对单个 q 运行分支 (m, n) 的细分（全部 i ≠ 1, j ≠ 6），每个 word 最多追加 depth 个符号.

    Returns:
        ScanRow: 分类、达到的细分深度和第一个见证
    """
    sys = build_spqr(IFSParams(p=p, q=q, r=r))
    outcome = refine_branch(sys, m, n, Fraction(0), max_extension=depth)
    if outcome.witnesses:
        ordered = sorted(outcome.witnesses, key=lambda w: (w.kind != WitnessKind.COINCIDENT_MAPS, w.w1, w.w2))
        first = ordered[0]
        return ScanRow(
            q=sys.params.q,
            cls=ScanClass.INTERSECTING,
            resolving_depth=outcome.max_extension,
            witness_w1=first.w1,
            witness_w2=first.w2,
        )
    return ScanRow(q=sys.params.q, cls=ScanClass.SEPARATED, resolving_depth=outcome.max_extension)


def _classify_task(task: Tuple[Fraction, Fraction, Fraction, int, int, int]) -> ScanRow:
    """进程池任务：分类一个网格点."""
    return classify(*task)


def reproduce_witness(p, r, row: ScanRow) -> Tuple[Interval, Interval]:
    """
    复现坏 q 的见证：重新计算两个 word 的包络并确认二者相交.

    Raises:
        SpqrError: 行不是相交分类，或包络不相交
    """
    if row.cls != ScanClass.INTERSECTING or not row.witness_w1 or not row.witness_w2:
        raise SpqrError(f"q={row.q} 没有可复现的见证", code="NO_WITNESS")
    sys = build_spqr(IFSParams(p=p, q=row.q, r=r))
    hull1 = cylinder(sys, parse_word(row.witness_w1))
    hull2 = cylinder(sys, parse_word(row.witness_w2))
    if not hull1.intersects(hull2):
        raise SpqrError(f"见证 {row.witness_w1} / {row.witness_w2} 在 q={row.q} 处不相交", code="WITNESS_MISMATCH")
    return hull1, hull2


def dyadic_box_dimension(bad_indices: Sequence[int], grid_size: int, width: float) -> Tuple[Optional[float], List[int]]:
    """
    二进粗化估计坏集合的盒维数.

    第 j 层的单元由 2^j 个相邻网格单元组成，边长为 2^j·width/G；
    对坏单元数 N_j > 0 的层次，回归 log N_j 对 log(1/边长) 的斜率，至少需要 3 层。

    Returns:
        Tuple[Optional[float], List[int]]: (斜率或 None, 各层坏单元数)
    """
    levels: List[int] = []
    scales: List[float] = []
    j = 0
    while (grid_size >> j) >= 2:
        levels.append(len({k >> j for k in bad_indices}))
        scales.append(width * (2 ** j) / grid_size)
        j += 1
    points = [(math.log(1.0 / s), math.log(c)) for s, c in zip(scales, levels) if c > 0]
    if len(points) < 3:
        return None, levels
    x, y = np.array(points, dtype=float).T
    return float(np.polyfit(x, y, 1)[0]), levels


def scan_delta_mn(
    p,
    r,
    m: int,
    n: int,
    grid_size: int,
    depth: int,
    workers: Optional[int] = None,
) -> ScanResult:
    """
    在 D_mn(p, r) 的均匀网格上分类 q.

    Args:
        p: S_1 的压缩比
        r: 压缩比 r
        m: 分支 m
        n: 分支 n
        grid_size: 网格点数（≥ 2）
        depth: 每个 word 的最大追加深度 N
        workers: 并行度

    Returns:
        ScanResult: 按 q 排序的分类、坏比例、盒维数估计与理论上界；D_mn 为空时返回空结果
    """
    p, r = to_scalar(p), to_scalar(r)
    if grid_size < 2:
        raise SpqrError(f"网格点数必须 ≥ 2: {grid_size}", code="INVALID_GRID")
    if not 0 <= depth <= settings.COVER_DEPTH_CAP:
        raise SpqrError(f"扫描深度必须在 0..{settings.COVER_DEPTH_CAP} 内: {depth}", code="INVALID_DEPTH")
    # 检查 p, r 的参数盒；q 取 D_mn 内的值
    IFSParams(p=p, q=r / 2, r=r).check_box()

    bound = bad_set_bound(r)
    dmn = dmn_interval(p, r, m, n)
    if dmn is None:
        jwarn(logger, "D_mn 为空", 节点="param_scanner", p=p, r=r, m=m, n=n)
        return ScanResult(p=p, r=r, m=m, n=n, grid_size=grid_size, depth=depth, bound=bound, note="D_mn 为空")

    grid = grid_points(dmn, grid_size)
    jinfo(logger, "开始扫描", 节点="param_scanner", m=m, n=n, 网格=grid_size, 深度=depth)
    rows: List[ScanRow] = parallel_map(
        _classify_task, [(p, q, r, m, n, depth) for q in grid], workers=workers, label="网格分类"
    )

    bad_indices = [k for k, row in enumerate(rows) if row.cls == ScanClass.INTERSECTING]
    box_dimension, levels = dyadic_box_dimension(bad_indices, grid_size, float(dmn.width()))
    result = ScanResult(
        p=p,
        r=r,
        m=m,
        n=n,
        dmn_lo=dmn.lo,
        dmn_hi=dmn.hi,
        grid_size=grid_size,
        depth=depth,
        rows=rows,
        bad_count=len(bad_indices),
        bad_fraction=len(bad_indices) / grid_size,
        box_dimension=box_dimension,
        box_levels=levels,
        bound=bound,
        note=SCAN_NOTE,
    )
    jinfo(
        logger, "扫描完成", 节点="param_scanner", m=m, n=n,
        坏点数=result.bad_count, 坏比例=result.bad_fraction, 盒维数=box_dimension,
    )
    return result


def random_address(rng: np.random.Generator, alphabet_size: int = 6, max_pre: int = 4, max_period: int = 3) -> Address:
    """随机终于周期地址：前周期长度 0..max_pre，周期长度 1..max_period."""
    pre_len = int(rng.integers(0, max_pre + 1))
    period_len = int(rng.integers(1, max_period + 1))
    pre = tuple(int(s) for s in rng.integers(1, alphabet_size + 1, size=pre_len))
    period = tuple(int(s) for s in rng.integers(1, alphabet_size + 1, size=period_len))
    return Address(preperiod=pre, period=period)


def _random_in(rng: np.random.Generator, iv: Interval) -> Fraction:
    """开区间内的随机有理数."""
    k = int(rng.integers(1, _Q_SAMPLING_DENOMINATOR))
    return iv.lo + iv.width() * Fraction(k, _Q_SAMPLING_DENOMINATOR)


def verify_displacement(
    p,
    q,
    q2,
    r,
    samples: int,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
) -> DisplacementReport:
    """
    抽样验证位移界 |π_pqr(σ) − π_pq'r(σ)| ≤ δ/(1−R).

    δ = |q − q'|，R = max(p, q, q', r)；截断误差的余量为 2·max(半宽)。
    每个样本另用不动点精确值交叉核对。

    Args:
        p, q, q2, r: 两组参数（strict 模式）
        samples: 样本数（≥ 1）
        depth: 截断深度，默认 settings.ADDRESS_DEPTH
        seed: 随机种子，默认 settings.DEFAULT_SEED

    Returns:
        DisplacementReport: 违反次数与观测比例
    """
    if samples < 1:
        raise SpqrError(f"样本数必须 ≥ 1: {samples}", code="INVALID_SAMPLES")
    depth = settings.ADDRESS_DEPTH if depth is None else depth
    seed = settings.DEFAULT_SEED if seed is None else seed
    sys1 = build_spqr(IFSParams(p=p, q=q, r=r))
    sys2 = build_spqr(IFSParams(p=p, q=q2, r=r))
    params1, params2 = sys1.params, sys2.params
    delta = abs(params1.q - params2.q)
    R = max(params1.p, params1.q, params2.q, params1.r)
    bound = delta / (1 - R)

    rng = np.random.default_rng(seed)
    violations = 0
    max_ratio = 0.0
    max_disp = Fraction(0)
    for _ in range(samples):
        addr = random_address(rng)
        mid1, hw1 = address_point(sys1, addr, depth)
        mid2, hw2 = address_point(sys2, addr, depth)
        slack = 2 * max(hw1, hw2)
        exact1, exact2 = address_value(sys1, addr), address_value(sys2, addr)
        exact_disp = abs(exact1 - exact2)
        if abs(mid1 - mid2) > bound + slack:
            violations += 1
        elif exact_disp > bound or abs(exact1 - mid1) > hw1 or abs(exact2 - mid2) > hw2:
            violations += 1
        max_disp = max(max_disp, exact_disp)
        if bound > 0:
            max_ratio = max(max_ratio, float(exact_disp / bound))
        elif exact_disp > 0:
            max_ratio = math.inf

    report = DisplacementReport(
        q=params1.q,
        q2=params2.q,
        samples=samples,
        depth=depth,
        seed=seed,
        bound=bound,
        violations=violations,
        max_ratio=max_ratio,
        max_displacement=float(max_disp),
        exact_checked=samples,
    )
    log = jwarn if violations else jinfo
    log(logger, "位移界验证完成", 节点="param_scanner", 样本=samples, 违反=violations, 最大比例=max_ratio)
    return report


def phi_interval(sys: IFSystem, m: int, n: int, i: int, j: int, sigma: Address, tau: Address, depth: int) -> Tuple[Fraction, Fraction]:
    """
    Φ = S_3S_1^mS_i π(σ) − S_4S_6^nS_j π(τ) 的截断值与误差界.

    Returns:
        Tuple[Fraction, Fraction]: (中点值, 误差界)
    """
    w1, w2 = branch_words(m, n, i, j)
    f, g = sys.word_map(w1), sys.word_map(w2)
    x, x_err = address_point(sys, sigma, depth)
    y, y_err = address_point(sys, tau, depth)
    return f(x) - g(y), abs(f.ratio) * x_err + abs(g.ratio) * y_err


def verify_tech2(
    p,
    r,
    m: int,
    n: int,
    q=None,
    q2=None,
    samples: int = 1000,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
) -> Tech2Report:
    """
    抽样验证 |Φ(q,σ,τ) − Φ(q',σ,τ)| > (p^m/35)·|q − q'|.

    q、q2 给定时固定使用；省略时每个样本在 D_mn 内重新抽取。
    误差按截断半宽计入：下界 = |Δ中点| − 两侧误差界之和。

    Raises:
        ParameterError: D_mn 为空，或 q、q2 不在 D_mn 内
        SpqrError: q = q2
    """
    if samples < 1:
        raise SpqrError(f"样本数必须 ≥ 1: {samples}", code="INVALID_SAMPLES")
    depth = settings.ADDRESS_DEPTH if depth is None else depth
    seed = settings.DEFAULT_SEED if seed is None else seed
    p, r = to_scalar(p), to_scalar(r)
    dmn = dmn_interval(p, r, m, n)
    if dmn is None:
        raise ParameterError(f"D_{m}{n}(p, r) 为空：a·r^{n + 1}/p^{m} ≥ r")
    for name, value in (("q", q), ("q'", q2)):
        if value is not None and not dmn.lo < to_scalar(value) < dmn.hi:
            raise ParameterError(f"{name}={value} 不在 D_{m}{n} = ({dmn.lo}, {dmn.hi}) 内")
    if q is not None and q2 is not None and to_scalar(q) == to_scalar(q2):
        raise SpqrError("q 与 q' 必须不同", code="INVALID_PARAMS")

    rng = np.random.default_rng(seed)
    violations = 0
    min_margin = math.inf
    for _ in range(samples):
        q_a = to_scalar(q) if q is not None else _random_in(rng, dmn)
        q_b = to_scalar(q2) if q2 is not None else _random_in(rng, dmn)
        while q_b == q_a:
            q_b = _random_in(rng, dmn)
        sigma, tau = random_address(rng), random_address(rng)
        i = int(rng.integers(2, 7))
        j = int(rng.integers(1, 6))

        phi_a, err_a = phi_interval(build_spqr(IFSParams(p=p, q=q_a, r=r)), m, n, i, j, sigma, tau, depth)
        phi_b, err_b = phi_interval(build_spqr(IFSParams(p=p, q=q_b, r=r)), m, n, i, j, sigma, tau, depth)
        lower = abs(phi_a - phi_b) - err_a - err_b
        normalized = lower / (p ** m * abs(q_a - q_b))
        if normalized <= TECH2_THRESHOLD:
            violations += 1
            jdebug(
                logger, "不等式违反", 节点="param_scanner", q=q_a, q2=q_b, i=i, j=j,
                sigma=str(sigma), tau=str(tau), 归一化下界=float(normalized),
            )
        min_margin = min(min_margin, float(normalized))

    log = jwarn if violations else jinfo
    log(logger, "反 Lipschitz 验证完成", 节点="param_scanner", m=m, n=n, 样本=samples, 违反=violations, 最小下界=min_margin)
    return Tech2Report(m=m, n=n, samples=samples, depth=depth, seed=seed, violations=violations, min_margin=min_margin)


def _diverging_address(rng: np.random.Generator, sigma: Address, prefix_len: int) -> Address:
    """与 σ 共享前 prefix_len 个符号、第 prefix_len+1 位不同的随机地址."""
    head = sigma.truncate(prefix_len + 1)
    choices = [s for s in range(1, 7) if s != head[-1]]
    diverge = choices[int(rng.integers(0, len(choices)))]
    tail = random_address(rng)
    return Address(preperiod=head[:-1] + (diverge,) + tail.preperiod, period=tail.period)


def verify_tech1(
    params: IFSParams,
    samples: int,
    R=None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
) -> Tech1Report:
    """
    抽样验证 π: (I^∞, ρ_R) → K 是 1-Lipschitz 的（p, q, r ≤ R）.

    对截断中点检查 |π(σ) − π(τ)| ≤ ρ_R(σ, τ) + 两侧半宽。

    Raises:
        ParameterError: R 小于某个压缩比
    """
    sys = build_spqr(params)
    R = max(params.p, params.q, params.r) if R is None else to_scalar(R)
    if R < max(params.p, params.q, params.r) or not 0 < R < 1:
        raise ParameterError(f"R={R} 必须满足 max(p, q, r) ≤ R < 1")
    depth = settings.ADDRESS_DEPTH if depth is None else depth
    seed = settings.DEFAULT_SEED if seed is None else seed

    rng = np.random.default_rng(seed)
    violations = 0
    max_ratio = 0.0
    for _ in range(samples):
        sigma = random_address(rng)
        prefix_len = int(rng.integers(0, min(depth, 8)))
        tau = _diverging_address(rng, sigma, prefix_len)
        metric = address_metric(sigma.truncate(depth), tau.truncate(depth), R)
        x, x_err = address_point(sys, sigma, depth)
        y, y_err = address_point(sys, tau, depth)
        if abs(x - y) > metric + x_err + y_err:
            violations += 1
        if metric > 0:
            exact = abs(address_value(sys, sigma) - address_value(sys, tau))
            max_ratio = max(max_ratio, float(exact / metric))

    return Tech1Report(R=R, samples=samples, depth=depth, seed=seed, violations=violations, max_ratio=max_ratio)
