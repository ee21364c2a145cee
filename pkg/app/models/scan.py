"""参数扫描与抽样验证相关的 Pydantic 数据模型."""
from enum import Enum
from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.params import Rational


class ScanClass(str, Enum):
    """单个 q 的分类."""
    SEPARATED = "separated"
    INTERSECTING = "intersecting"


class ScanRow(BaseModel):
    """扫描表的一行."""

    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    q: Rational = Field(..., description="网格点 q（精确）")
    cls: ScanClass = Field(..., description="分类", alias="class")
    resolving_depth: int = Field(..., description="分离或给出见证时的细分深度")
    witness_w1: Optional[str] = Field(default=None, description="见证 word 1")
    witness_w2: Optional[str] = Field(default=None, description="见证 word 2")


class ScanResult(BaseModel):
    """D_mn 上的网格扫描结果."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: Rational = Field(..., description="p")
    r: Rational = Field(..., description="r")
    m: int = Field(..., description="m")
    n: int = Field(..., description="n")
    dmn_lo: Optional[Rational] = Field(default=None, description="D_mn 左端点（开）")
    dmn_hi: Optional[Rational] = Field(default=None, description="D_mn 右端点（开）")
    grid_size: int = Field(..., description="网格点数")
    depth: int = Field(..., description="细分深度 N")
    rows: List[ScanRow] = Field(default_factory=list, description="按 q 排序的分类")
    bad_count: int = Field(default=0, description="相交的网格点数")
    bad_fraction: float = Field(default=0.0, description="相交比例", ge=0.0, le=1.0)
    box_dimension: Optional[float] = Field(default=None, description="坏集合盒维数估计（二进粗化）")
    box_levels: List[int] = Field(default_factory=list, description="各粗化层次的坏单元数")
    bound: float = Field(..., description="维数上界 −2·log6/log r")
    note: str = Field(default="", description="说明")

    @property
    def empty(self) -> bool:
        return self.dmn_lo is None


class DisplacementReport(BaseModel):
    """位移界抽样验证结果."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    q: Rational = Field(..., description="q")
    q2: Rational = Field(..., description="q'")
    samples: int = Field(..., description="样本数")
    depth: int = Field(..., description="截断深度")
    seed: int = Field(..., description="随机种子")
    bound: Rational = Field(..., description="δ/(1−R)")
    violations: int = Field(default=0, description="超出界的样本数")
    max_ratio: float = Field(default=0.0, description="观测位移与界之比的最大值")
    max_displacement: float = Field(default=0.0, description="最大观测位移（由精确值换算）")
    exact_checked: int = Field(default=0, description="与精确不动点值交叉核对的样本数")


class Tech2Report(BaseModel):
    """反 Lipschitz 不等式的抽样验证结果."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int = Field(..., description="m")
    n: int = Field(..., description="n")
    samples: int = Field(..., description="样本数")
    depth: int = Field(..., description="截断深度")
    seed: int = Field(..., description="随机种子")
    threshold: Rational = Field(default=Fraction(1, 35), description="归一化阈值 1/35")
    violations: int = Field(default=0, description="违反不等式的样本数")
    min_margin: float = Field(..., description="|ΔΦ|/(p^m·|q−q'|) 的最小观测下界")


class Tech1Report(BaseModel):
    """地址映射 1-Lipschitz 性质的抽样验证结果."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    R: Rational = Field(..., description="度量底数 R")
    samples: int = Field(..., description="样本数")
    depth: int = Field(..., description="截断深度")
    seed: int = Field(..., description="随机种子")
    violations: int = Field(default=0, description="违反的样本数")
    max_ratio: float = Field(default=0.0, description="|π(σ)−π(τ)| 与 ρ_R(σ,τ) 之比的最大值")
