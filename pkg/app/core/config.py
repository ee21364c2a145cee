"""应用配置管理 - 环境变量与计算默认值."""
from pathlib import Path
from pydantic_settings import BaseSettings
from typing import Optional


def get_project_root() -> Path:
    """获取项目根目录（spqr-lab）."""
    # config.py 在 app/core/ 目录下，向上两级到项目根目录
    current_file = Path(__file__).resolve()
    project_root = current_file.parent.parent.parent
    return project_root


class Settings(BaseSettings):
    """应用配置类 - 从环境变量加载配置."""

    # 应用基础配置
    APP_NAME: str = "spqr-lab"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # 枚举与细分上限
    COVER_DEPTH_CAP: int = 12  # 完整覆盖枚举的最大深度（6^12 个 word 已经过多）
    RENDER_DEPTH_CAP: int = 8  # SVG 渲染的最大深度
    MAX_REFINEMENT_STEPS: int = 10000  # 每个分支的细分步数硬上限

    # 数值默认值
    DEFAULT_EPS: str = "1e-12"  # 认证尺度截断，按十进制精确转换为有理数
    DEFAULT_TOL: float = 1e-12  # Moran 方程二分残差
    DEFAULT_SEED: int = 20240601
    DECIMAL_DIGITS: int = 30  # mpmath 十进制渲染精度
    ADDRESS_DEPTH: int = 24  # 抽样验证器的地址截断深度

    # 并行配置
    WORKERS: Optional[int] = None  # None 表示使用 os.cpu_count()

    # 报告格式
    REPORT_SCHEMA: int = 1

    model_config = {
        "env_file": str(get_project_root() / ".env"),
        "env_file_encoding": "utf-8",
        "case_sensitive": True,
        "extra": "ignore",
    }


# 创建全局配置实例
settings = Settings()
