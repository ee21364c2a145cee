"""报告生成器 - 组装带配置回显的 JSON 报告与 CSV 表格."""
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import pandas as pd
from pydantic import BaseModel

from app.core.config import settings
from app.core.logger import jinfo
from app.models.dimension import BoxDimensionEstimate
from app.models.run_config import RunConfig
from app.models.scan import ScanResult
from app.models.wsp import WitnessSearchResult

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ["q_num", "q_den", "class", "resolving_depth", "witness_w1", "witness_w2"]
WSP_COLUMNS = ["m", "n", "ratio_defect", "offset_defect"]
BOX_COLUMNS = ["depth", "scale", "N", "running_slope"]


class ReportGenerator:
    """报告生成器，负责 JSON 报告与 CSV 表格的稳定输出."""

    def build_report(
        self,
        config: RunConfig,
        result: Any,
        exit_code: int,
        generated_at: Optional[datetime] = None,
    ) -> Dict[str, Any]:
        """
        组装报告字典.

        时间戳单独占据第一个键，其余内容只由配置和结果决定。

        Args:
            config: 运行配置（原样回显）
            result: 结果模型或可 JSON 化的字典
            exit_code: 退出码
            generated_at: 生成时间，默认当前时间

        Returns:
            Dict[str, Any]: 报告
        """
        stamp = (generated_at or datetime.now()).isoformat(timespec="seconds")
        if isinstance(result, BaseModel):
            payload = result.model_dump(mode="json", by_alias=True)
        else:
            payload = result
        return {
            "generated_at": stamp,
            "schema": settings.REPORT_SCHEMA,
            "app": settings.APP_NAME,
            "command": config.command,
            "config": config.model_dump(mode="json", exclude={"out", "threads"}),
            "exit_code": exit_code,
            "result": payload,
        }

    def render_json(self, report: Dict[str, Any]) -> str:
        """UTF-8 JSON，缩进 2，保持键顺序."""
        return json.dumps(report, ensure_ascii=False, indent=2) + "\n"

    def write_text(self, text: str, out_dir: Optional[str], filename: str) -> Optional[Path]:
        """写入 out_dir/filename；out_dir 为空时返回 None."""
        if not out_dir:
            return None
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        target = path / filename
        target.write_text(text, encoding="utf-8", newline="")
        jinfo(logger, "写入文件", 节点="report_generator", 路径=str(target), 字节数=len(text.encode("utf-8")))
        return target

    def frame_to_csv(self, frame: pd.DataFrame) -> str:
        """RFC-4180 风格 CSV：CRLF 行尾，最小引用."""
        return frame.to_csv(index=False, lineterminator="\r\n")

    def wsp_frame(self, result: WitnessSearchResult) -> pd.DataFrame:
        """见证表：按 m 排序."""
        rows = [
            {
                "m": pair.m,
                "n": pair.n,
                "ratio_defect": pair.ratio_defect_decimal,
                "offset_defect": pair.offset_defect_decimal,
            }
            for pair in sorted(result.pairs, key=lambda w: w.m)
        ]
        return pd.DataFrame(rows, columns=WSP_COLUMNS)

    def scan_frame(self, result: ScanResult) -> pd.DataFrame:
        """扫描表：按 q 排序；空结果只有表头."""
        rows = [
            {
                "q_num": row.q.numerator,
                "q_den": row.q.denominator,
                "class": row.cls.value,
                "resolving_depth": row.resolving_depth,
                "witness_w1": row.witness_w1 or "",
                "witness_w2": row.witness_w2 or "",
            }
            for row in sorted(result.rows, key=lambda r: r.q)
        ]
        return pd.DataFrame(rows, columns=SCAN_COLUMNS)

    def box_frame(self, estimate: BoxDimensionEstimate) -> pd.DataFrame:
        """盒计数表."""
        rows = [
            {
                "depth": row.depth,
                "scale": repr(row.scale),
                "N": row.count,
                "running_slope": "" if row.running_slope is None else repr(row.running_slope),
            }
            for row in estimate.rows
        ]
        return pd.DataFrame(rows, columns=BOX_COLUMNS)

    def scan_summary(self, results: Iterable[ScanResult]) -> List[Dict[str, Any]]:
        """扫描汇总：不含逐点分类."""
        return [r.model_dump(mode="json", by_alias=True, exclude={"rows"}) for r in results]


# 创建全局服务实例
report_generator = ReportGenerator()
