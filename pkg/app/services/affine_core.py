"""精确有理数仿射核心 - 标量、闭区间、word 与一维仿射压缩映射."""
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import mpmath

from app.core.errors import NoFixedPointError, NotInvertibleError, SpqrError, WordError

# 所有认证计算使用精确有理数
Scalar = Fraction
Word = Tuple[int, ...]

ScalarLike = Union[Fraction, int, str, Decimal, float]


def to_scalar(value: ScalarLike) -> Fraction:
    """
    精确转换为有理数.

    支持 "1/40"、"0.025"、"1e-12" 形式的字符串，十进制记法按十进制精确展开；
    float 先转成最短十进制表示再转换，避免二进制尾数污染参数。

    Args:
        value: 待转换的值

    Returns:
        Fraction: 精确有理数

    Raises:
        SpqrError: 无法解析的字符串
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SpqrError(f"无法将布尔值解析为有理数: {value!r}", code="INVALID_SCALAR")
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise SpqrError(f"无法解析有理数 {value!r}: {e}", code="INVALID_SCALAR") from e


def format_scalar(value: Fraction) -> str:
    """以 "num/den"（整数时为 "num"）形式输出有理数."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Interval:
    """闭区间 [lo, hi]，端点为精确有理数."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo = to_scalar(self.lo)
        hi = to_scalar(self.hi)
        if lo > hi:
            raise SpqrError(f"区间端点顺序错误: lo={lo} > hi={hi}", code="INVALID_INTERVAL")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "Interval") -> bool:
        """闭区间相交（包括仅在端点接触）."""
        return self.lo <= other.hi and other.lo <= self.hi

    def is_disjoint(self, other: "Interval") -> bool:
        """严格分离：端点之间存在严格的有理数不等式."""
        return self.hi < other.lo or other.hi < self.lo

    def intersection(self, other: "Interval") -> "Interval":
        if self.is_disjoint(other):
            raise SpqrError("区间不相交，交集为空", code="EMPTY_INTERSECTION")
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def scaled(self, factor: Fraction) -> "Interval":
        """区间乘以正数因子."""
        return Interval(self.lo * factor, self.hi * factor)

    def __str__(self) -> str:
        return f"[{format_scalar(self.lo)}, {format_scalar(self.hi)}]"


UNIT_INTERVAL = Interval(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class AffineMap1D:
    """一维仿射映射 x ↦ offset + ratio·x；比例带符号，负号表示反向."""

    ratio: Fraction
    offset: Fraction

    def __post_init__(self):
        if not isinstance(self.ratio, Fraction):
            object.__setattr__(self, "ratio", to_scalar(self.ratio))
        if not isinstance(self.offset, Fraction):
            object.__setattr__(self, "offset", to_scalar(self.offset))

    def __call__(self, x: Fraction) -> Fraction:
        return self.offset + self.ratio * x

    def is_contraction(self) -> bool:
        return 0 < abs(self.ratio) < 1

    def is_identity(self) -> bool:
        return self.ratio == 1 and self.offset == 0

    def power(self, k: int) -> "AffineMap1D":
        """k 次自复合（k ≥ 0），二进制快速幂."""
        if k < 0:
            raise SpqrError(f"幂次必须非负: {k}", code="INVALID_POWER")
        result = IDENTITY
        base = self
        while k:
            if k & 1:
                result = compose(result, base)
            base = compose(base, base)
            k >>= 1
        return result

    def __str__(self) -> str:
        return f"x ↦ {format_scalar(self.offset)} + ({format_scalar(self.ratio)})·x"


IDENTITY = AffineMap1D(Fraction(1), Fraction(0))


def apply(f: AffineMap1D, x: Fraction) -> Fraction:
    """计算 f(x) = c + λx（精确）."""
    return f.offset + f.ratio * x


def compose(f: AffineMap1D, g: AffineMap1D) -> AffineMap1D:
    """
    复合 f∘g.

    (f∘g)(x) = f.c + f.λ·(g.c + g.λ·x)，因此比例为 f.λ·g.λ，偏移为 f.c + f.λ·g.c。
    """
    return AffineMap1D(f.ratio * g.ratio, f.offset + f.ratio * g.offset)


def inverse(f: AffineMap1D) -> AffineMap1D:
    """
    逆映射.

    Raises:
        NotInvertibleError: 比例为 0
    """
    if f.ratio == 0:
        raise NotInvertibleError(f"映射不可逆 (not invertible): {f}")
    inv_ratio = 1 / f.ratio
    return AffineMap1D(inv_ratio, -f.offset * inv_ratio)


def fixed_point(f: AffineMap1D) -> Fraction:
    """
    不动点 c/(1−λ).

    Raises:
        NoFixedPointError: 比例为 1
    """
    if f.ratio == 1:
        raise NoFixedPointError(f"映射没有不动点 (no fixed point): {f}")
    return f.offset / (1 - f.ratio)


def image(f: AffineMap1D, iv: Interval) -> Interval:
    """区间的精确像；比例为负时交换端点."""
    a = f.offset + f.ratio * iv.lo
    b = f.offset + f.ratio * iv.hi
    if a <= b:
        return Interval(a, b)
    return Interval(b, a)


def compose_all(maps: Iterable[AffineMap1D]) -> AffineMap1D:
    """按顺序复合 f_1∘f_2∘…∘f_k；空序列返回恒等映射."""
    result = IDENTITY
    for f in maps:
        result = compose(result, f)
    return result


def parse_word(value: Union[str, Sequence[int]], alphabet_size: int = 6) -> Word:
    """
    解析 word.

    字符串中的每个数字是一个符号（字母表不超过 9 个符号时）；
    也接受以 "." 分隔的形式和整数序列。

    Raises:
        WordError: 非法符号
    """
    if isinstance(value, str):
        text = value.strip()
        if text in ("", "ε"):
            symbols: Tuple[int, ...] = ()
        elif "." in text:
            try:
                symbols = tuple(int(part) for part in text.split("."))
            except ValueError as e:
                raise WordError(f"无法解析 word {value!r}") from e
        else:
            if not text.isdigit():
                raise WordError(f"无法解析 word {value!r}")
            symbols = tuple(int(ch) for ch in text)
    else:
        symbols = tuple(int(s) for s in value)
    for s in symbols:
        if not 1 <= s <= alphabet_size:
            raise WordError(f"符号 {s} 不在字母表 1..{alphabet_size} 中")
    return symbols


def format_word(word: Word) -> str:
    """输出 word；符号均为一位数时直接拼接，否则用 "." 分隔."""
    if all(s < 10 for s in word):
        return "".join(str(s) for s in word)
    return ".".join(str(s) for s in word)


def decimal_str(value: Fraction, digits: int = 30) -> str:
    """以 digits 位有效数字输出有理数的十进制近似（mpmath）."""
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(mpmath.mpf(value.numerator) / value.denominator, digits)
