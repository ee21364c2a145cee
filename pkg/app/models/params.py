"""S_pqr 参数相关的 Pydantic 数据模型."""
from enum import Enum
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer
from typing_extensions import Annotated

from app.core.errors import ParameterError
from app.services.affine_core import format_scalar, to_scalar

# 构造中固定的常数：h = 8/15, a = 3/15
SPQR_H = Fraction(8, 15)
SPQR_A = Fraction(3, 15)

# 严格模式的参数盒 (0, 1/36)
STRICT_BOUND = Fraction(1, 36)

# 精确有理数字段：输入接受 "1/40"、"0.025"、int、Fraction，输出为 "num/den"
Rational = Annotated[
    Fraction,
    BeforeValidator(to_scalar),
    PlainSerializer(format_scalar, return_type=str),
]


class ParamMode(str, Enum):
    """参数模式枚举."""
    STRICT = "strict"    # 0 < p, q, r < 1/36
    RELAXED = "relaxed"  # 0 < p, q, r < 1


class IFSParams(BaseModel):
    """S_pqr 的参数三元组（精确有理数）."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: Rational = Field(..., description="S_1 的压缩比")
    q: Rational = Field(..., description="S_3 的压缩比（反向）")
    r: Rational = Field(..., description="S_2, S_4, S_5, S_6 的压缩比")
    mode: ParamMode = Field(default=ParamMode.STRICT, description="参数模式")

    @property
    def h(self) -> Fraction:
        return SPQR_H

    @property
    def a(self) -> Fraction:
        return SPQR_A

    @property
    def relaxed(self) -> bool:
        return self.mode == ParamMode.RELAXED

    def with_q(self, q: Any) -> "IFSParams":
        """返回只替换 q 的新参数."""
        return IFSParams(p=self.p, q=to_scalar(q), r=self.r, mode=self.mode)

    def check_box(self) -> None:
        """
        检查参数是否位于当前模式的开区间盒内.

        Raises:
            ParameterError: 消息中指明被违反的边界
        """
        upper = Fraction(1) if self.relaxed else STRICT_BOUND
        upper_text = "1" if self.relaxed else "1/36"
        for name in ("p", "q", "r"):
            value = getattr(self, name)
            if value <= 0:
                raise ParameterError(f"参数 {name}={format_scalar(value)} 违反下界: 要求 {name} > 0")
            if value >= upper:
                raise ParameterError(
                    f"参数 {name}={format_scalar(value)} 违反上界: 要求 {name} < {upper_text}"
                    f"（{self.mode.value} 模式，开区间）"
                )

    def label(self) -> str:
        return f"p={format_scalar(self.p)},q={format_scalar(self.q)},r={format_scalar(self.r)}"
