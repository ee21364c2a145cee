"""维数计算相关的 Pydantic 数据模型."""
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator


class MoranProblem(BaseModel):
    """Moran 方程 Σ λ_i^d = 1 的比例列表."""

    ratios: List[float] = Field(..., description="压缩比的绝对值，均在 (0,1) 内", min_length=1)

    @field_validator("ratios")
    @classmethod
    def _check_ratios(cls, v: List[float]) -> List[float]:
        for x in v:
            if not 0 < x < 1:
                raise ValueError(f"压缩比必须在 (0,1) 内: {x}")
        return v

    @classmethod
    def geometric_family(cls, p: float, q: float, r: float, n: int, c: int) -> "MoranProblem":
        """S* 截断到 k ≤ n：比例 p^k·q 一个、p^k·r 共 c 个."""
        ratios: List[float] = []
        for k in range(n + 1):
            scale = p ** k
            ratios.append(scale * q)
            ratios.extend([scale * r] * c)
        return cls(ratios=ratios)


class MoranSolution(BaseModel):
    """Moran 方程的数值解."""

    dimension: float = Field(..., description="解 d")
    residual: float = Field(..., description="|f(d) − 1|")
    tol: float = Field(..., description="容差")


class SubsystemSequence(BaseModel):
    """子系统维数序列 d_0, d_1, … 及其极限."""

    c: int = Field(..., description="比例为 r 的映射个数（2 或 4）")
    values: List[float] = Field(..., description="d_0..d_n")
    limit: float = Field(..., description="闭式方程 p^d + q^d + c·r^d = 1 的解")
    gaps: List[float] = Field(..., description="d* − d_n")
    rate: Optional[float] = Field(default=None, description="相邻差距之比的经验收敛率")
    note: Optional[str] = Field(default=None, description="说明")


class BoxCountRow(BaseModel):
    """盒计数表的一行."""

    depth: int = Field(..., description="覆盖深度")
    scale: float = Field(..., description="盒边长 δ")
    count: int = Field(..., description="δ 盒数 N(δ)")
    running_slope: Optional[float] = Field(default=None, description="截至本行的回归斜率")
    residual: float = Field(default=0.0, description="log N 相对最终拟合的残差")


class BoxDimensionEstimate(BaseModel):
    """盒维数估计."""

    slope: float = Field(..., description="log N(δ) 对 log(1/δ) 的最小二乘斜率")
    rows: List[BoxCountRow] = Field(..., description="各深度的计数")


class CoverSumReport(BaseModel):
    """覆盖和诊断."""

    d: float = Field(..., description="指数 d")
    depths: List[int] = Field(..., description="深度")
    sums: List[float] = Field(..., description="Σ_w |S_w([0,1])|^d")
    note: str = Field(..., description="诊断说明")


class DimensionReport(BaseModel):
    """dimension 子命令的汇总结果."""

    system: str = Field(..., description="系统名称")
    similarity_dimension: MoranSolution = Field(..., description="全部映射的 Moran 方程")
    infinite_c2: Optional[MoranSolution] = Field(default=None, description="p^d + q^d + 2r^d = 1")
    infinite_c4: Optional[MoranSolution] = Field(default=None, description="p^d + q^d + 4r^d = 1")
    subsystem: Optional[SubsystemSequence] = Field(default=None, description="子系统序列（默认 c）")
    box: Optional[BoxDimensionEstimate] = Field(default=None, description="盒维数估计")
    cover_sum: Optional[CoverSumReport] = Field(default=None, description="覆盖和诊断")
    notes: List[str] = Field(default_factory=list, description="说明")
