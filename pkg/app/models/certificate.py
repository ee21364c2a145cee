"""重叠认证结果相关的 Pydantic 数据模型."""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.params import IFSParams, Rational


class HullRelation(str, Enum):
    """两个柱集包络的关系."""
    DISJOINT = "disjoint"
    OVERLAPPING = "overlapping"


class PairStatusKind(str, Enum):
    """一对片的认证状态."""
    CERTIFIED_DISJOINT = "certified_disjoint"
    CERTIFIED_TOUCH_POINT = "certified_touch_point"
    OVERLAP_WITNESS = "overlap_witness"
    UNKNOWN_BELOW_SCALE = "unknown_below_scale"


class WitnessKind(str, Enum):
    """重叠见证的来源."""
    COINCIDENT_MAPS = "coincident_maps"  # 两个复合映射系数完全相同
    COMMON_POINT = "common_point"        # 两个柱集包含同一个已知吸引子点
    HULL_OVERLAP = "hull_overlap"        # 细分深度用尽时包络仍相交（仅用于扫描分类）


class OverlapWitness(BaseModel):
    """重叠见证：一对 word 及其证明方式."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    w1: str = Field(..., description="第一个 word")
    w2: str = Field(..., description="第二个 word")
    kind: WitnessKind = Field(..., description="见证类型")
    point: Optional[Rational] = Field(default=None, description="公共点（common_point 时）")
    m: Optional[int] = Field(default=None, description="所在分支的 m")
    n: Optional[int] = Field(default=None, description="所在分支的 n")


class UnresolvedBranch(BaseModel):
    """在尺度 ε 以下仍未分离的 word 对."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    w1: str = Field(..., description="第一个 word")
    w2: str = Field(..., description="第二个 word")
    width: Rational = Field(..., description="两个包络中较大的宽度")
    m: Optional[int] = Field(default=None, description="所在分支的 m")
    n: Optional[int] = Field(default=None, description="所在分支的 n")


class PairStatus(BaseModel):
    """一对片 (i, j) 的认证状态."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    pair: str = Field(..., description="片的编号对，如 \"3-4\"")
    kind: PairStatusKind = Field(..., description="状态")
    at: Optional[Rational] = Field(default=None, description="接触点（certified_touch_point 时）")
    witnesses: List[OverlapWitness] = Field(default_factory=list, description="重叠见证，完全重合的映射排在最前")
    unresolved: List[UnresolvedBranch] = Field(default_factory=list, description="尺度以下未解决的分支")
    depth: int = Field(default=0, description="细分达到的最大 word 长度")
    steps: int = Field(default=0, description="细分步数")


class BranchStats(BaseModel):
    """(m, n) 分支枚举的统计."""

    examined: int = Field(default=0, description="检查过的 (m, n) 分支数")
    pruned: int = Field(default=0, description="被距离区间剪枝的分支数")
    surviving: int = Field(default=0, description="进入细分的分支数")
    max_m: int = Field(default=-1, description="尺度以上的最大 m")
    max_n: int = Field(default=-1, description="尺度以上的最大 n")
    refinement_steps: int = Field(default=0, description="全部细分步数")
    surviving_branches: List[str] = Field(default_factory=list, description="存活分支，格式 \"m:n\"")
    elapsed_seconds: float = Field(default=0.0, description="耗时（秒）", exclude=True)


class OscCheck(BaseModel):
    """S_3(K∖K_1) ∩ S_4(K∖K_6) = ∅ 的一级包络检查."""

    params: IFSParams = Field(..., description="参数")
    hull_assumption: bool = Field(..., description="一级包络是否都包含于 [0,1]")
    separated: bool = Field(..., description="两族一级包络是否两两分离")
    overlapping: List[str] = Field(default_factory=list, description="相交的包络对，如 \"32~45\"")


class Certificate(BaseModel):
    """重叠分析的结构化结论."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: IFSParams = Field(..., description="参数")
    eps: Rational = Field(..., description="尺度截断 ε")
    touch_point: Rational = Field(..., description="期望的唯一接触点 h")
    pairs: Dict[str, PairStatus] = Field(..., description="15 对片的状态，键为 \"i-j\"")
    stats: BranchStats = Field(default_factory=BranchStats, description="(3,4) 分支统计")

    @property
    def certified(self) -> bool:
        """除 (3,4) 外全部分离且 (3,4) 只在 h 处接触."""
        for key, status in self.pairs.items():
            if key == "3-4":
                if status.kind != PairStatusKind.CERTIFIED_TOUCH_POINT or status.at != self.touch_point:
                    return False
            elif status.kind != PairStatusKind.CERTIFIED_DISJOINT:
                return False
        return True

    @property
    def witnesses(self) -> List[OverlapWitness]:
        return [w for status in self.pairs.values() for w in status.witnesses]

    @property
    def has_witness(self) -> bool:
        return any(s.kind == PairStatusKind.OVERLAP_WITNESS for s in self.pairs.values())
