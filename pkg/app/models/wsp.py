"""WSP 见证相关的 Pydantic 数据模型."""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.params import IFSParams, Rational


class WitnessPair(BaseModel):
    """一对 (m, n) 及 G_n⁻¹∘H_m 的恒等缺陷."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int = Field(..., description="H_m 中 S_1 的次数", ge=0)
    n: int = Field(..., description="G_n 中 S_6 的次数", ge=0)
    ratio: Rational = Field(..., description="G_n⁻¹H_m 的比例 p^m·q/r^{n+1}")
    offset: Rational = Field(..., description="G_n⁻¹H_m 的偏移")
    ratio_defect: Rational = Field(..., description="|ratio − 1|")
    offset_defect: Rational = Field(..., description="|offset|")
    ratio_defect_decimal: str = Field(..., description="ratio_defect 的十进制表示")
    offset_defect_decimal: str = Field(..., description="offset_defect 的十进制表示")

    @property
    def is_identity(self) -> bool:
        return self.ratio_defect == 0 and self.offset_defect == 0


class WitnessSearchResult(BaseModel):
    """见证搜索结果."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: IFSParams = Field(..., description="参数")
    target_defect: float = Field(..., description="目标比例缺陷")
    max_m: int = Field(..., description="搜索的最大 m")
    searched_m: int = Field(..., description="实际搜索到的最大 m")
    target_reached: bool = Field(..., description="是否达到目标")
    pairs: List[WitnessPair] = Field(default_factory=list, description="按比例缺陷升序排列的见证")
    best_so_far: List[Rational] = Field(default_factory=list, description="第 k 项为 m ≤ k 时的最优比例缺陷")
    discrete: bool = Field(default=False, description="p 与 r 存在小指数关系，可达缺陷是离散集合")
    relation: Optional[List[int]] = Field(default=None, description="p^a = r^b 的 (a, b)")
    note: Optional[str] = Field(default=None, description="说明")

    @property
    def best(self) -> Optional[WitnessPair]:
        return self.pairs[0] if self.pairs else None
