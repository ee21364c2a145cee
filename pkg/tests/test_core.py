"""配置、日志、异常与并行执行."""
import json
import logging
import math

import pytest

from app.core.config import Settings, settings
from app.core.errors import ParameterError, SpqrError
from app.core.executor import parallel_map, resolve_workers
from app.core.logger import jdebug, jinfo, jwarn


def test_settings_defaults():
    assert settings.APP_NAME == "spqr-lab"
    assert settings.COVER_DEPTH_CAP == 12
    assert settings.RENDER_DEPTH_CAP == 8
    assert settings.MAX_REFINEMENT_STEPS == 10000
    assert settings.REPORT_SCHEMA == 1


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("RENDER_DEPTH_CAP", "5")
    assert Settings().RENDER_DEPTH_CAP == 5


def test_error_codes():
    assert ParameterError("x").code == "INVALID_PARAMS"
    assert SpqrError("x", code="CUSTOM").code == "CUSTOM"
    assert isinstance(ParameterError("x"), ValueError)


def test_structured_log(caplog):
    logger = logging.getLogger("tests.core")
    with caplog.at_level(logging.INFO, logger="tests.core"):
        jinfo(logger, "完成", 节点="测试", 数量=3)
        jdebug(logger, "不输出")
    assert len(caplog.records) == 1
    payload = json.loads(caplog.records[0].getMessage())
    assert payload == {"事件": "完成", "节点": "测试", "数量": 3}


def test_parallel_map_preserves_order():
    items = list(range(10))
    assert parallel_map(math.factorial, items, workers=1) == [math.factorial(k) for k in items]
    assert parallel_map(math.factorial, items, workers=2) == [math.factorial(k) for k in items]


def test_resolve_workers():
    assert resolve_workers(3) == 3
    assert resolve_workers(0) == 1
    assert resolve_workers() >= 1


def test_structured_log_exact_values(caplog):
    import numpy as np
    from fractions import Fraction

    from app.models.scan import ScanClass

    logger = logging.getLogger("tests.core.values")
    with caplog.at_level(logging.WARNING, logger="tests.core.values"):
        jwarn(logger, "数值", q=Fraction(1, 50), 整数=Fraction(3), 斜率=np.float64(0.5), 分类=ScanClass.SEPARATED)
    payload = json.loads(caplog.records[0].getMessage())
    assert payload["q"] == "1/50"
    assert payload["整数"] == "3"
    assert payload["斜率"] == 0.5
    assert payload["分类"] == "separated"
