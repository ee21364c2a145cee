"""绘图服务 - 把各级覆盖渲染成确定性的 SVG."""
import logging
from fractions import Fraction
from typing import List, Optional

from app.core.config import settings
from app.core.errors import DepthCapError
from app.core.logger import jinfo
from app.models.drawing import RenderRequest, RenderResult, RenderRow
from app.services.affine_core import UNIT_INTERVAL, image
from app.services.ifs_model import IFSystem, iter_level

logger = logging.getLogger(__name__)

# 按第一个符号着色
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
ROOT_COLOR = "#7f7f7f"
MARKER_COLOR = "#e41a1c"


def _fmt(value: float) -> str:
    """固定三位小数，保证同输入字节一致."""
    return f"{value:.3f}"


class DrawingService:
    """覆盖渲染服务类."""

    def __init__(self):
        """初始化绘图服务."""
        self.depth_cap = settings.RENDER_DEPTH_CAP

    def render_cover(self, sys: IFSystem, request: RenderRequest) -> RenderResult:
        """
        渲染深度 0..N 的覆盖.

        第 k 行画出全部长度为 k 的 word 的包络，颜色取决于第一个符号；
        S_pqr 系统额外画一条 h 的竖线。

        Args:
            sys: 系统
            request: 渲染请求

        Returns:
            RenderResult: SVG 文本与逐行统计

        Raises:
            DepthCapError: 深度超过 settings.RENDER_DEPTH_CAP
        """
        if request.depth > self.depth_cap:
            raise DepthCapError(f"渲染深度 {request.depth} 超过上限 {self.depth_cap}")

        scale = request.width
        left = request.margin
        top = request.margin + 20
        rows_total = request.depth + 1
        canvas_w = request.width + 2 * request.margin
        canvas_h = top + rows_total * request.row_height + request.margin

        body: List[str] = []
        rows: List[RenderRow] = []
        bar = request.row_height * 0.7
        for k in range(rows_total):
            y = top + k * request.row_height
            total = Fraction(0)
            level = iter_level(sys, k)
            body.append(
                f'<text x="{_fmt(left - 8)}" y="{_fmt(y + bar)}" text-anchor="end" '
                f'font-size="10">{k}</text>'
            )
            for word, f in level:
                iv = image(f, UNIT_INTERVAL)
                total += iv.width()
                color = PALETTE[(word[0] - 1) % len(PALETTE)] if word else ROOT_COLOR
                # 过窄的包络至少占 0.5 像素
                w = max(float(iv.width()) * scale, 0.5)
                body.append(
                    f'<rect x="{_fmt(left + float(iv.lo) * scale)}" y="{_fmt(y)}" '
                    f'width="{_fmt(w)}" height="{_fmt(bar)}" fill="{color}"/>'
                )
            rows.append(RenderRow(depth=k, count=len(level), total_width=total))

        touch: Optional[Fraction] = None
        if request.mark_touch_point and sys.params is not None:
            touch = sys.params.h
            x = _fmt(left + float(touch) * scale)
            body.append(
                f'<line x1="{x}" y1="{_fmt(top - 6)}" x2="{x}" '
                f'y2="{_fmt(top + rows_total * request.row_height)}" '
                f'stroke="{MARKER_COLOR}" stroke-width="1" stroke-dasharray="4,2"/>'
            )
            body.append(f'<text x="{x}" y="{_fmt(top - 8)}" text-anchor="middle" font-size="10">h</text>')

        title = sys.params.label() if sys.params is not None else sys.name
        svg = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{canvas_w}" height="{canvas_h}" viewBox="0 0 {canvas_w} {canvas_h}">\n'
            f'<title>{title}</title>\n'
            f'<rect x="0" y="0" width="{canvas_w}" height="{canvas_h}" fill="#ffffff"/>\n'
            f'<text x="{left}" y="{request.margin}" font-size="12">{title}, depth 0..{request.depth}</text>\n'
            + "\n".join(body)
            + "\n</svg>\n"
        )
        jinfo(
            logger, "渲染完成", 节点="drawing_service", 系统=sys.name,
            深度=request.depth, 矩形数=sum(r.count for r in rows),
        )
        return RenderResult(system=sys.name, svg=svg, rows=rows, touch_point=touch)


# 创建全局服务实例
drawing_service = DrawingService()
