"""命令行运行配置的 Pydantic 数据模型."""
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import settings
from app.models.params import ParamMode, Rational
from app.services.affine_core import to_scalar


class Preset(str, Enum):
    """系统预设."""
    SPQR = "spqr"        # 六映射系统 S_pqr（需要 --p --q --r）
    CANTOR = "cantor"    # 三分 Cantor 集
    HALVING = "halving"  # 吸引子为 [0,1] 的二分系统


class RunConfig(BaseModel):
    """一次运行的完整配置，原样写入报告."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str = Field(..., description="子命令")
    preset: Preset = Field(default=Preset.SPQR, description="系统预设")
    p: Optional[Rational] = Field(default=None, description="p")
    q: Optional[Rational] = Field(default=None, description="q")
    r: Optional[Rational] = Field(default=None, description="r")
    q2: Optional[Rational] = Field(default=None, description="位移验证中的 q'")
    mode: ParamMode = Field(default=ParamMode.STRICT, description="参数模式")
    eps: Rational = Field(default_factory=lambda: to_scalar(settings.DEFAULT_EPS), description="尺度截断 ε")
    depth: Optional[int] = Field(default=None, description="覆盖 / 扫描 / 渲染 / 地址截断深度，省略时由子命令决定", ge=0)
    grid: int = Field(default=256, description="扫描网格点数", ge=2)
    mn: List[Tuple[int, int]] = Field(default_factory=lambda: [(0, 0)], description="(m, n) 列表")
    tol: float = Field(default=settings.DEFAULT_TOL, description="求解容差", gt=0)
    seed: int = Field(default=settings.DEFAULT_SEED, description="随机种子")
    threads: Optional[int] = Field(default=None, description="并行度", ge=1)
    out: Optional[str] = Field(default=None, description="输出目录，省略时 JSON 写到标准输出")
    max_m: int = Field(default=20, description="见证搜索的最大 m", ge=0)
    target: float = Field(default=1e-3, description="目标比例缺陷", gt=0)
    n_max: int = Field(default=20, description="子系统序列的最大 n", ge=0)
    c: int = Field(default=4, description="子系统方程中比例为 r 的映射个数")
    samples: int = Field(default=1000, description="抽样验证的样本数", ge=1)
    check: Optional[str] = Field(default=None, description="verify 的检查项")

    @field_validator("c")
    @classmethod
    def _check_c(cls, v: int) -> int:
        if v not in (2, 4):
            raise ValueError(f"c 只能取 2 或 4: {v}")
        return v
