"""领域异常定义 - 所有可预期的错误都带有机器可读的错误代码."""
from typing import Optional


class SpqrError(ValueError):
    """所有领域错误的基类.

    Attributes:
        code: 机器可读的错误代码，CLI 会原样写入错误输出
    """

    code: str = "SPQR_ERROR"

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code:
            self.code = code


class NotInvertibleError(SpqrError):
    """比例为零的仿射映射没有逆映射."""

    code = "NOT_INVERTIBLE"


class NoFixedPointError(SpqrError):
    """比例为 1 的仿射映射没有（唯一）不动点."""

    code = "NO_FIXED_POINT"


class ParameterError(SpqrError):
    """参数越界，消息中必须指明被违反的边界."""

    code = "INVALID_PARAMS"


class WordError(SpqrError):
    """多重指标（word）包含非法符号或长度不匹配."""

    code = "INVALID_WORD"


class DepthCapError(SpqrError):
    """完整枚举深度超过上限."""

    code = "DEPTH_CAP"


class HullAssumptionError(SpqrError):
    """柱集包络离开 [0,1]，吸引子不再包含于单位区间."""

    code = "HULL_ASSUMPTION"


class RefinementLimitError(SpqrError):
    """单个分支的细分步数超过硬上限."""

    code = "REFINEMENT_LIMIT"


class SolverError(SpqrError):
    """维数求解器无法给出有效的根区间."""

    code = "SOLVER_FAILURE"


class InsufficientDataError(SpqrError):
    """回归所需的数据点不足."""

    code = "INSUFFICIENT_DATA"
