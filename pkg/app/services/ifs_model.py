"""迭代函数系统模型 - S_pqr 工厂、柱集、覆盖与截断地址映射."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from app.core.config import settings
from app.core.errors import DepthCapError, SpqrError, WordError
from app.core.logger import jdebug
from app.models.params import IFSParams
from app.services.affine_core import (
    IDENTITY,
    UNIT_INTERVAL,
    AffineMap1D,
    Interval,
    Word,
    apply,
    compose,
    fixed_point,
    format_word,
    image,
    parse_word,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IFSystem:
    """一维压缩相似系统 {S_1, …, S_m}，符号从 1 开始编号."""

    maps: Tuple[AffineMap1D, ...]
    params: Optional[IFSParams] = None
    name: str = "custom"
    anchors: Tuple[Fraction, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.maps:
            raise SpqrError("系统至少需要一个映射", code="EMPTY_SYSTEM")
        for idx, f in enumerate(self.maps, start=1):
            if not f.is_contraction():
                raise SpqrError(f"S_{idx} 不是压缩映射: 比例 {f.ratio} 不满足 0 < |λ| < 1", code="NOT_CONTRACTION")
        # 各生成元的不动点都属于吸引子，用作已知点
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "anchors", tuple(sorted({fixed_point(f) for f in self.maps})))

    @property
    def size(self) -> int:
        return len(self.maps)

    def symbol_map(self, symbol: int) -> AffineMap1D:
        if not 1 <= symbol <= len(self.maps):
            raise WordError(f"符号 {symbol} 不在字母表 1..{len(self.maps)} 中")
        return self.maps[symbol - 1]

    def word_map(self, word: Union[Word, str]) -> AffineMap1D:
        """S_w = S_{w_1}∘…∘S_{w_n}；空 word 为恒等映射."""
        if isinstance(word, str):
            word = parse_word(word, len(self.maps))
        result = IDENTITY
        for s in word:
            result = compose(result, self.symbol_map(s))
        return result

    def max_ratio(self) -> Fraction:
        return max(abs(f.ratio) for f in self.maps)


@dataclass(frozen=True)
class Address:
    """终于周期的无穷地址 preperiod·period^∞."""

    preperiod: Word
    period: Word

    def __post_init__(self):
        if not self.period:
            raise WordError("无穷地址的周期部分不能为空")
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))

    @classmethod
    def parse(cls, text: str, alphabet_size: int = 6) -> "Address":
        """解析 "3(1)" 形式：括号前为前周期，括号内为周期."""
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise WordError(f"地址格式应为 pre(period): {text!r}")
        head, _, tail = text[:-1].partition("(")
        return cls(parse_word(head, alphabet_size), parse_word(tail, alphabet_size))

    def truncate(self, n: int) -> Word:
        """长度为 n 的前缀."""
        if n < 0:
            raise WordError(f"截断长度必须非负: {n}")
        symbols = list(self.preperiod[:n])
        while len(symbols) < n:
            symbols.extend(self.period[: n - len(symbols)])
        return tuple(symbols)

    def __str__(self) -> str:
        return f"{format_word(self.preperiod)}({format_word(self.period)})"


@dataclass
class IntervalCover:
    """深度 n 的柱集包络覆盖：每个 word 对应 S_w([0,1])."""

    depth: int
    entries: List[Tuple[Word, Interval]]

    def __len__(self) -> int:
        return len(self.entries)

    def intervals(self) -> List[Interval]:
        return [iv for _, iv in self.entries]

    def contains(self, x: Fraction) -> bool:
        return any(iv.contains(x) for _, iv in self.entries)

    def total_width(self) -> Fraction:
        return sum((iv.width() for _, iv in self.entries), Fraction(0))

    def max_width(self) -> Fraction:
        return max(iv.width() for _, iv in self.entries)

    def merged(self) -> List[Interval]:
        """合并相交（含端点接触）的包络，返回按左端点排序的极大区间."""
        return merge_intervals(self.intervals())


def merge_intervals(intervals: Sequence[Interval]) -> List[Interval]:
    """合并闭区间并集为不相交的极大闭区间."""
    merged: List[Interval] = []
    for iv in sorted(intervals, key=lambda x: (x.lo, x.hi)):
        if merged and iv.lo <= merged[-1].hi:
            last = merged[-1]
            if iv.hi > last.hi:
                merged[-1] = Interval(last.lo, iv.hi)
        else:
            merged.append(iv)
    return merged


def build_system(maps: Sequence[AffineMap1D], name: str = "custom") -> IFSystem:
    """由任意压缩映射列表构造系统."""
    return IFSystem(maps=tuple(maps), name=name)


def build_spqr(params: IFSParams) -> IFSystem:
    """
    构造六映射系统 S_pqr.

    S_1=px, S_2=a+rx, S_3=h−qx, S_4=h−r+rx, S_5=1−a−rx, S_6=1−r+rx。

    Args:
        params: 参数三元组

    Returns:
        IFSystem: 系统（携带参数）

    Raises:
        ParameterError: 参数越出当前模式的参数盒
    """
    params.check_box()
    p, q, r, h, a = params.p, params.q, params.r, params.h, params.a
    one = Fraction(1)
    maps = (
        AffineMap1D(p, Fraction(0)),
        AffineMap1D(r, a),
        AffineMap1D(-q, h),
        AffineMap1D(r, h - r),
        AffineMap1D(-r, one - a),
        AffineMap1D(r, one - r),
    )
    jdebug(logger, "构造 S_pqr", 节点="ifs_model", 参数=params.label(), 模式=params.mode.value)
    return IFSystem(maps=maps, params=params, name="spqr")


def cantor_system() -> IFSystem:
    """三分 Cantor 集：x/3 与 2/3 + x/3."""
    third = Fraction(1, 3)
    return IFSystem(maps=(AffineMap1D(third, 0), AffineMap1D(third, Fraction(2, 3))), name="cantor")


def halving_system() -> IFSystem:
    """吸引子为 [0,1] 的二分系统：x/2 与 1/2 + x/2."""
    half = Fraction(1, 2)
    return IFSystem(maps=(AffineMap1D(half, 0), AffineMap1D(half, half)), name="halving")


def cylinder(sys: IFSystem, w: Union[Word, str]) -> Interval:
    """柱集包络 S_w([0,1])；空 word 返回 [0,1]."""
    return image(sys.word_map(w), UNIT_INTERVAL)


def iter_level(sys: IFSystem, depth: int) -> List[Tuple[Word, AffineMap1D]]:
    """按字典序返回全部长度为 depth 的 word 及其复合映射."""
    level: List[Tuple[Word, AffineMap1D]] = [((), IDENTITY)]
    for _ in range(depth):
        level = [
            (w + (s,), compose(f, g))
            for w, f in level
            for s, g in enumerate(sys.maps, start=1)
        ]
    return level


def cover(sys: IFSystem, depth: int, cap: Optional[int] = None) -> IntervalCover:
    """
    深度 n 的完整覆盖.

    Args:
        sys: 系统
        depth: 深度 n ≥ 0
        cap: 完整枚举深度上限，默认 settings.COVER_DEPTH_CAP

    Returns:
        IntervalCover: 全部 m^n 个 word 及其包络（字典序）

    Raises:
        DepthCapError: 深度超过上限
    """
    if depth < 0:
        raise DepthCapError(f"覆盖深度必须非负: {depth}")
    limit = settings.COVER_DEPTH_CAP if cap is None else cap
    if depth > limit:
        raise DepthCapError(
            f"完整覆盖深度 {depth} 超过上限 {limit}；请使用合并覆盖或认证器的定向细分"
        )
    entries = [(w, image(f, UNIT_INTERVAL)) for w, f in iter_level(sys, depth)]
    jdebug(logger, "生成覆盖", 节点="ifs_model", 系统=sys.name, 深度=depth, 区间数=len(entries))
    return IntervalCover(depth=depth, entries=entries)


def address_point(sys: IFSystem, addr: Address, depth: int) -> Tuple[Fraction, Fraction]:
    """
    截断地址映射 π.

    Args:
        sys: 系统
        addr: 终于周期地址
        depth: 截断深度 n ≥ 1

    Returns:
        Tuple[Fraction, Fraction]: (柱集中点, 半宽)；真实的 π(addr) 与中点之差不超过半宽
    """
    if depth < 1:
        raise WordError(f"截断深度必须 ≥ 1: {depth}")
    hull = cylinder(sys, addr.truncate(depth))
    return hull.midpoint(), hull.width() / 2


def address_value(sys: IFSystem, addr: Address) -> Fraction:
    """终于周期地址的精确值 S_pre(fixed_point(S_period))."""
    periodic_point = fixed_point(sys.word_map(addr.period))
    return apply(sys.word_map(addr.preperiod), periodic_point)


def address_metric(sigma: Word, tau: Word, R: Fraction) -> Fraction:
    """
    符号空间度量 ρ_R(σ,τ) = R^w，w = 第一个不同位置（从 1 开始）− 1.

    Raises:
        WordError: 长度不同
        SpqrError: R 不在 (0,1)
    """
    if len(sigma) != len(tau):
        raise WordError(f"word 长度不同: {len(sigma)} ≠ {len(tau)}")
    if not 0 < R < 1:
        raise SpqrError(f"度量底数 R 必须在 (0,1) 内: {R}", code="INVALID_METRIC")
    for k, (s, t) in enumerate(zip(sigma, tau), start=1):
        if s != t:
            return Fraction(R) ** (k - 1)
    return Fraction(0)


def hull_assumption_holds(sys: IFSystem) -> bool:
    """所有一级包络都包含于 [0,1] 时吸引子包含于 [0,1]."""
    return all(UNIT_INTERVAL.contains_interval(image(f, UNIT_INTERVAL)) for f in sys.maps)


def words_of_length(alphabet_size: int, depth: int) -> Iterator[Word]:
    """按字典序枚举 word（不计算映射）."""
    if depth == 0:
        yield ()
        return
    for head in words_of_length(alphabet_size, depth - 1):
        for s in range(1, alphabet_size + 1):
            yield head + (s,)
