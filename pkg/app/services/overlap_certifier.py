"""重叠认证服务 - 以精确区间分离证明各片只在 h 处接触（尺度 ε 以上）."""
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from app.core.config import settings
from app.core.errors import HullAssumptionError, RefinementLimitError, SpqrError
from app.core.executor import parallel_map
from app.core.logger import jdebug, jinfo, jwarn
from app.models.certificate import (
    BranchStats,
    Certificate,
    HullRelation,
    OscCheck,
    OverlapWitness,
    PairStatus,
    PairStatusKind,
    UnresolvedBranch,
    WitnessKind,
)
from app.models.params import IFSParams, SPQR_H
from app.services.affine_core import (
    UNIT_INTERVAL,
    AffineMap1D,
    Interval,
    Word,
    compose,
    format_word,
    image,
    to_scalar,
)
from app.services.ifs_model import (
    Address,
    IFSystem,
    address_value,
    build_spqr,
    cylinder,
    hull_assumption_holds,
    iter_level,
)

logger = logging.getLogger(__name__)

# K_3 分解中去掉 S_1，K_4 分解中去掉 S_6
LEFT_SYMBOLS = (2, 3, 4, 5, 6)
RIGHT_SYMBOLS = (1, 2, 3, 4, 5)


@dataclass
class RefinementOutcome:
    """一对 word 细分的结果."""

    witnesses: List[OverlapWitness] = field(default_factory=list)
    unresolved: List[UnresolvedBranch] = field(default_factory=list)
    steps: int = 0
    max_length: int = 0
    max_extension: int = 0

    @property
    def resolved(self) -> bool:
        return not self.witnesses and not self.unresolved

    def merge(self, other: "RefinementOutcome") -> None:
        self.witnesses.extend(other.witnesses)
        self.unresolved.extend(other.unresolved)
        self.steps += other.steps
        self.max_length = max(self.max_length, other.max_length)
        self.max_extension = max(self.max_extension, other.max_extension)


@dataclass
class BranchOutcome:
    """一个 (m, n) 分支的细分结果."""

    m: int
    n: int
    outcome: RefinementOutcome


def hull_separation_check(sys: IFSystem, w1: Word, w2: Word) -> HullRelation:
    """
    包络分离检查.

    Returns:
        HullRelation: 闭区间 S_w1([0,1]) 与 S_w2([0,1]) 之间存在严格不等式时为 DISJOINT
    """
    if cylinder(sys, w1).is_disjoint(cylinder(sys, w2)):
        return HullRelation.DISJOINT
    return HullRelation.OVERLAPPING


def _common_point(sys: IFSystem, f1: AffineMap1D, f2: AffineMap1D) -> Optional[Fraction]:
    """两个柱集中是否含有同一个已知吸引子点（生成元不动点的像）."""
    shared = {f1(x) for x in sys.anchors} & {f2(x) for x in sys.anchors}
    return min(shared) if shared else None


def refine_pair(
    sys: IFSystem,
    w1: Word,
    w2: Word,
    eps: Fraction,
    max_steps: Optional[int] = None,
    max_extension: Optional[int] = None,
    branch: Optional[Tuple[int, int]] = None,
) -> RefinementOutcome:
    """
    对一对 word 做包络细分，直到证明分离、找到重叠见证或宽度低于 ε.

    每一步先比较包络；相交时依次检查：宽度是否已低于 ε（记为未解决）、
    两个复合映射是否完全相同、两柱集是否包含同一个已知点；都不成立则细分较宽的一侧。

    Args:
        sys: 系统
        w1: 第一个 word
        w2: 第二个 word
        eps: 尺度截断
        max_steps: 步数上限，默认 settings.MAX_REFINEMENT_STEPS
        max_extension: 每个 word 最多追加的符号数；用尽时包络相交记为 hull_overlap 见证
        branch: 所属 (m, n) 分支，写入见证

    Returns:
        RefinementOutcome: 细分结果

    Raises:
        RefinementLimitError: 步数超过上限
    """
    limit = settings.MAX_REFINEMENT_STEPS if max_steps is None else max_steps
    m, n = branch if branch else (None, None)
    base1, base2 = len(w1), len(w2)
    result = RefinementOutcome()
    stack = [(tuple(w1), sys.word_map(w1), tuple(w2), sys.word_map(w2))]

    while stack:
        u, f1, v, f2 = stack.pop()
        result.steps += 1
        if result.steps > limit:
            raise RefinementLimitError(
                f"细分步数超过上限 {limit}: {format_word(tuple(w1))} vs {format_word(tuple(w2))}"
                + (f"（分支 m={m}, n={n}）" if branch else "")
            )
        result.max_length = max(result.max_length, len(u), len(v))
        result.max_extension = max(result.max_extension, len(u) - base1, len(v) - base2)

        hull1, hull2 = image(f1, UNIT_INTERVAL), image(f2, UNIT_INTERVAL)
        if hull1.is_disjoint(hull2):
            continue

        width1, width2 = hull1.width(), hull2.width()
        if max(width1, width2) < eps:
            result.unresolved.append(
                UnresolvedBranch(w1=format_word(u), w2=format_word(v), width=max(width1, width2), m=m, n=n)
            )
            continue

        if f1 == f2:
            result.witnesses.append(
                OverlapWitness(w1=format_word(u), w2=format_word(v), kind=WitnessKind.COINCIDENT_MAPS, m=m, n=n)
            )
            continue

        point = _common_point(sys, f1, f2)
        if point is not None:
            result.witnesses.append(
                OverlapWitness(
                    w1=format_word(u), w2=format_word(v), kind=WitnessKind.COMMON_POINT, point=point, m=m, n=n
                )
            )
            continue

        can_split1 = max_extension is None or len(u) - base1 < max_extension
        can_split2 = max_extension is None or len(v) - base2 < max_extension
        if not can_split1 and not can_split2:
            result.witnesses.append(
                OverlapWitness(w1=format_word(u), w2=format_word(v), kind=WitnessKind.HULL_OVERLAP, m=m, n=n)
            )
            continue

        if can_split1 and (width1 >= width2 or not can_split2):
            children = [(u + (s,), compose(f1, g), v, f2) for s, g in enumerate(sys.maps, start=1)]
        else:
            children = [(u, f1, v + (s,), compose(f2, g)) for s, g in enumerate(sys.maps, start=1)]
        # 逆序入栈，按字典序处理
        stack.extend(reversed(children))

    return result


def family_bounds(sys: IFSystem) -> Tuple[Interval, Interval]:
    """
    两族到 h 的距离的归一化区间.

    S_3S_1^m S_i(x) = h − q·p^m·S_i(x)，S_4S_6^n S_j(x) = h − r^{n+1}·(1 − S_j(x))，
    因此距离分别落在 q·p^m·[L1, U1] 与 r^{n+1}·[L2, U2] 中，
    [L1, U1] 为 S_i([0,1])（i ≠ 1）的包络，[L2, U2] 为 1 − S_j([0,1])（j ≠ 6）的包络。

    Raises:
        HullAssumptionError: 包络离开 [0,1] 或距离区间包含 0
    """
    if sys.params is None or sys.size != 6:
        raise SpqrError("距离区间只对 S_pqr 系统有定义", code="NOT_SPQR")
    if not hull_assumption_holds(sys):
        raise HullAssumptionError("hull assumption violated: 一级包络离开 [0,1]，无法保证 K ⊂ [0,1]")
    left = [image(sys.symbol_map(i), UNIT_INTERVAL) for i in LEFT_SYMBOLS]
    right = [image(sys.symbol_map(j), UNIT_INTERVAL) for j in RIGHT_SYMBOLS]
    bounds1 = Interval(min(iv.lo for iv in left), max(iv.hi for iv in left))
    bounds2 = Interval(1 - max(iv.hi for iv in right), 1 - min(iv.lo for iv in right))
    if bounds1.lo <= 0 or bounds2.lo <= 0:
        raise HullAssumptionError(
            f"hull assumption violated: 距离区间 {bounds1} / {bounds2} 包含 0，分解无法分离 h"
        )
    return bounds1, bounds2


def branch_distance_intervals(sys: IFSystem, m: int, n: int) -> Tuple[Interval, Interval]:
    """分支 (m, n) 两侧到 h 的距离区间 q·p^m·[L1,U1] 与 r^{n+1}·[L2,U2]."""
    bounds1, bounds2 = family_bounds(sys)
    params = sys.params
    return bounds1.scaled(params.q * params.p ** m), bounds2.scaled(params.r ** (n + 1))


def branch_survives(sys: IFSystem, m: int, n: int) -> bool:
    """距离区间（闭）相交时分支需要细分；否则两侧包络必然分离."""
    left, right = branch_distance_intervals(sys, m, n)
    return left.intersects(right)


def surviving_branches(sys: IFSystem, eps: Fraction) -> Tuple[List[Tuple[int, int]], BranchStats]:
    """
    枚举尺度 ε 以上的 (m, n) 分支并剪枝.

    q·p^m ≥ ε·L1 的每个 m 与 r^{n+1} ≥ ε·L2 的每个 n 都被检查；
    对这些 m（或 n），与之距离区间相交的全部伙伴 n（或 m）也加入，无论其尺度。

    Returns:
        Tuple[List[Tuple[int, int]], BranchStats]: 按 (m, n) 排序的存活分支与统计
    """
    eps = to_scalar(eps)
    if eps <= 0:
        raise SpqrError(f"尺度截断 ε 必须为正: {eps}", code="INVALID_EPS")
    bounds1, bounds2 = family_bounds(sys)
    p, q, r = sys.params.p, sys.params.q, sys.params.r

    max_m = -1
    while q * p ** (max_m + 1) >= eps * bounds1.lo:
        max_m += 1
    max_n = -1
    while r ** (max_n + 2) >= eps * bounds2.lo:
        max_n += 1

    examined: Set[Tuple[int, int]] = set()
    survivors: Set[Tuple[int, int]] = set()

    def visit(m: int, n: int) -> None:
        examined.add((m, n))
        left = bounds1.scaled(q * p ** m)
        right = bounds2.scaled(r ** (n + 1))
        if left.intersects(right):
            survivors.add((m, n))

    for m in range(max_m + 1):
        for n in range(max_n + 1):
            visit(m, n)

    # 尺度以下的伙伴分支：距离区间随指数单调缩小，越过后即可停止
    for m in range(max_m + 1):
        n = max_n + 1
        while r ** (n + 1) * bounds2.hi >= q * p ** m * bounds1.lo:
            visit(m, n)
            n += 1
    for n in range(max_n + 1):
        m = max_m + 1
        while q * p ** m * bounds1.hi >= r ** (n + 1) * bounds2.lo:
            visit(m, n)
            m += 1

    ordered = sorted(survivors)
    stats = BranchStats(
        examined=len(examined),
        pruned=len(examined) - len(survivors),
        surviving=len(ordered),
        max_m=max_m,
        max_n=max_n,
        surviving_branches=[f"{m}:{n}" for m, n in ordered],
    )
    return ordered, stats


def branch_words(m: int, n: int, i: int, j: int) -> Tuple[Word, Word]:
    """分支 (m, n) 中的 word 对 (3·1^m·i, 4·6^n·j)."""
    return (3,) + (1,) * m + (i,), (4,) + (6,) * n + (j,)


def refine_branch(
    sys: IFSystem,
    m: int,
    n: int,
    eps: Fraction,
    max_steps: Optional[int] = None,
    max_extension: Optional[int] = None,
) -> RefinementOutcome:
    """
    细分分支 (m, n) 的全部 25 个 word 对；步数上限对整个分支计数.

    Raises:
        RefinementLimitError: 分支步数超过上限
    """
    limit = settings.MAX_REFINEMENT_STEPS if max_steps is None else max_steps
    total = RefinementOutcome()
    for i in LEFT_SYMBOLS:
        for j in RIGHT_SYMBOLS:
            w1, w2 = branch_words(m, n, i, j)
            outcome = refine_pair(
                sys, w1, w2, eps,
                max_steps=limit - total.steps,
                max_extension=max_extension,
                branch=(m, n),
            )
            total.merge(outcome)
    return total


def _branch_task(task: Tuple[IFSystem, int, int, Fraction, int]) -> BranchOutcome:
    """进程池任务：细分一个 (m, n) 分支."""
    sys, m, n, eps, max_steps = task
    return BranchOutcome(m=m, n=n, outcome=refine_branch(sys, m, n, eps, max_steps=max_steps))


def _witness_order(w: OverlapWitness) -> Tuple[int, int, str, str]:
    rank = 0 if w.kind == WitnessKind.COINCIDENT_MAPS else 1
    return rank, len(w.w1) + len(w.w2), w.w1, w.w2


def summarize_outcome(
    pair: str,
    outcome: RefinementOutcome,
    touch_point: Optional[Fraction] = None,
) -> PairStatus:
    """把细分结果归纳为 PairStatus；见证优先于未解决分支."""
    if outcome.witnesses:
        kind = PairStatusKind.OVERLAP_WITNESS
    elif outcome.unresolved:
        kind = PairStatusKind.UNKNOWN_BELOW_SCALE
    elif touch_point is not None:
        kind = PairStatusKind.CERTIFIED_TOUCH_POINT
    else:
        kind = PairStatusKind.CERTIFIED_DISJOINT
    return PairStatus(
        pair=pair,
        kind=kind,
        at=touch_point if kind == PairStatusKind.CERTIFIED_TOUCH_POINT else None,
        witnesses=sorted(outcome.witnesses, key=_witness_order),
        unresolved=outcome.unresolved,
        depth=outcome.max_length,
        steps=outcome.steps,
    )


def brute_force_overlaps(sys: IFSystem, depth: int) -> List[Tuple[Word, Word]]:
    """
    独立的穷举检查：深度 depth 覆盖中首符号不同且闭包络相交的全部 word 对.

    与认证器不共享任何细分逻辑，用于交叉验证。

    Returns:
        List[Tuple[Word, Word]]: (w1, w2)，w1 的首符号较小
    """
    entries = sorted(
        ((image(f, UNIT_INTERVAL), w) for w, f in iter_level(sys, depth)),
        key=lambda item: (item[0].lo, item[0].hi),
    )
    found: List[Tuple[Word, Word]] = []
    active: List[Tuple[Interval, Word]] = []
    for hull, word in entries:
        active = [(iv, w) for iv, w in active if iv.hi >= hull.lo]
        for iv, w in active:
            if w[0] != word[0]:
                found.append((w, word) if w[0] < word[0] else (word, w))
        active.append((hull, word))
    found.sort()
    jdebug(logger, "穷举包络相交", 节点="overlap_certifier", 深度=depth, 相交对数=len(found))
    return found


def osc_hull_check(params: IFSParams) -> OscCheck:
    """
    一级包络层面检查 S_3(K∖K_1) 与 S_4(K∖K_6) 是否分离.

    参数可以是 relaxed 模式；包络离开 [0,1] 时如实报告，不抛出异常。
    """
    sys = build_spqr(params)
    overlapping: List[str] = []
    for i in LEFT_SYMBOLS:
        for j in RIGHT_SYMBOLS:
            u, v = (3, i), (4, j)
            if hull_separation_check(sys, u, v) == HullRelation.OVERLAPPING:
                overlapping.append(f"{format_word(u)}~{format_word(v)}")
    return OscCheck(
        params=params,
        hull_assumption=hull_assumption_holds(sys),
        separated=not overlapping,
        overlapping=overlapping,
    )


class OverlapCertifier:
    """重叠认证服务类."""

    def __init__(self, workers: Optional[int] = None, max_steps: Optional[int] = None):
        """
        初始化认证服务.

        Args:
            workers: 分支并行度，默认 settings.WORKERS
            max_steps: 每个分支的细分步数上限
        """
        self.workers = workers
        self.max_steps = settings.MAX_REFINEMENT_STEPS if max_steps is None else max_steps

    def _analyze_pair_34(self, sys: IFSystem, eps: Fraction) -> Tuple[PairStatus, BranchStats]:
        branches, stats = surviving_branches(sys, eps)
        tasks = [(sys, m, n, eps, self.max_steps) for m, n in branches]
        results: List[BranchOutcome] = parallel_map(_branch_task, tasks, workers=self.workers, label="分支细分")

        total = RefinementOutcome()
        for item in results:
            total.merge(item.outcome)
            if not item.outcome.resolved:
                jdebug(
                    logger, "分支未分离", 节点="overlap_certifier", m=item.m, n=item.n,
                    见证数=len(item.outcome.witnesses), 未解决数=len(item.outcome.unresolved),
                )
        stats.refinement_steps = total.steps
        status = summarize_outcome("3-4", total, touch_point=sys.params.h)
        return status, stats

    def certify_pair_34(self, sys: IFSystem, eps) -> PairStatus:
        """
        认证 K_3 ∩ K_4 = {h}（尺度 ε 以上）.

        K_3 = {h} ∪ ⋃_m S_3S_1^m(K∖K_1)，K_4 = {h} ∪ ⋃_n S_4S_6^n(K∖K_6)，
        因此只需对存活的 (m, n) 分支证明 S_3S_1^m(K_i) ∩ S_4S_6^n(K_j) = ∅。

        Args:
            sys: S_pqr 系统
            eps: 尺度截断

        Returns:
            PairStatus: CERTIFIED_TOUCH_POINT(h)、OVERLAP_WITNESS 或 UNKNOWN_BELOW_SCALE

        Raises:
            HullAssumptionError: 包络离开 [0,1]
            RefinementLimitError: 某个分支的步数超过上限
        """
        status, _ = self._analyze_pair_34(sys, to_scalar(eps))
        return status

    def certify_all_pairs(self, sys: IFSystem, eps) -> Certificate:
        """
        认证全部 15 对片.

        除 (3,4) 外的 14 对直接做包络细分（参数盒内在一级即分离）；(3,4) 走分解递归。

        Args:
            sys: S_pqr 系统
            eps: 尺度截断

        Returns:
            Certificate: 结构化结论
        """
        eps = to_scalar(eps)
        started = time.perf_counter()
        jinfo(logger, "开始认证", 节点="overlap_certifier", 参数=sys.params.label(), eps=eps)

        pairs: Dict[str, PairStatus] = {}
        stats = BranchStats()
        for i in range(1, 7):
            for j in range(i + 1, 7):
                key = f"{i}-{j}"
                if (i, j) == (3, 4):
                    pairs[key], stats = self._analyze_pair_34(sys, eps)
                else:
                    outcome = refine_pair(sys, (i,), (j,), eps, max_steps=self.max_steps)
                    pairs[key] = summarize_outcome(key, outcome)

        stats.elapsed_seconds = time.perf_counter() - started
        certificate = Certificate(
            params=sys.params,
            eps=eps,
            touch_point=sys.params.h,
            pairs=pairs,
            stats=stats,
        )
        if certificate.certified:
            jinfo(
                logger, "认证完成：唯一接触点", 节点="overlap_certifier",
                存活分支=stats.surviving, 细分步数=stats.refinement_steps,
                耗时=round(stats.elapsed_seconds, 3),
            )
        else:
            jwarn(
                logger, "认证未通过", 节点="overlap_certifier",
                见证数=len(certificate.witnesses),
                状态={k: v.kind.value for k, v in pairs.items() if v.kind != PairStatusKind.CERTIFIED_DISJOINT},
            )
        return certificate

    def critical_addresses(self, sys: IFSystem) -> Tuple[Address, Address]:
        """
        h 的两个地址 3·1^∞ 与 4·6^∞，并用不动点精确验证二者都落在 h.

        Raises:
            SpqrError: 验证失败
        """
        first = Address(preperiod=(3,), period=(1,))
        second = Address(preperiod=(4,), period=(6,))
        for addr in (first, second):
            value = address_value(sys, addr)
            if value != SPQR_H:
                raise SpqrError(f"临界地址 {addr} 落在 {value}，不是 h", code="CRITICAL_MISMATCH")
        return first, second



# 创建全局服务实例
overlap_certifier = OverlapCertifier()
