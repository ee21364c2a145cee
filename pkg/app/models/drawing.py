"""覆盖渲染相关的 Pydantic 数据模型."""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.models.params import Rational


class RenderRequest(BaseModel):
    """渲染请求模型."""
    depth: int = Field(..., description="最大深度 N（渲染 0..N 共 N+1 行）", ge=0)
    width: int = Field(default=1200, description="[0,1] 映射到的像素宽度", ge=100, le=8000)
    row_height: int = Field(default=24, description="每行高度", ge=4, le=200)
    margin: int = Field(default=40, description="四周留白", ge=0, le=400)
    mark_touch_point: bool = Field(default=True, description="是否标出接触点 h")


class RenderRow(BaseModel):
    """单个深度的渲染统计."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    depth: int = Field(..., description="深度")
    count: int = Field(..., description="矩形数")
    total_width: Rational = Field(..., description="包络宽度之和（精确）")


class RenderResult(BaseModel):
    """渲染结果模型."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    system: str = Field(..., description="系统名称")
    svg: str = Field(..., description="SVG 1.1 文本")
    rows: List[RenderRow] = Field(..., description="逐深度统计")
    touch_point: Optional[Rational] = Field(default=None, description="标出的 h")
