"""结构化日志 - 每行一个 JSON 对象，中文键，精确有理数按 "num/den" 输出."""
import json
import logging
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional

import numpy as np


def _json_default(value: Any) -> Any:
    """json.dumps 的兜底转换：Fraction、numpy 标量与数组、枚举、元组型 word."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    return str(value)


def _emit_json(
    logger: logging.Logger,
    level: int,
    事件: str,
    节点: Optional[str] = None,
    **字段: Any,
) -> None:
    """
    以 JSON 结构化方式输出日志.

    Args:
        logger: 日志记录器
        level: 日志级别（logging 常量）
        事件: 事件名称
        节点: 服务或子命令标识
        字段: 其他结构化字段；Fraction 输出为 "num/den"，numpy 值输出为原生数
    """
    if not logger.isEnabledFor(level):
        return
    payload: Dict[str, Any] = {"事件": 事件}
    if 节点:
        payload["节点"] = 节点
    payload.update(字段)
    logger.log(level, json.dumps(payload, ensure_ascii=False, separators=(",", ":"), default=_json_default))


def jdebug(logger: logging.Logger, 事件: str, 节点: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.DEBUG, 事件, 节点, **字段)


def jinfo(logger: logging.Logger, 事件: str, 节点: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.INFO, 事件, 节点, **字段)


def jwarn(logger: logging.Logger, 事件: str, 节点: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.WARNING, 事件, 节点, **字段)
