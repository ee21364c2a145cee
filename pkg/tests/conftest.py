"""测试公共夹具."""
from fractions import Fraction

import pytest

from app.models.params import IFSParams
from app.services.ifs_model import build_spqr


@pytest.fixture
def reference_params() -> IFSParams:
    """(1/40, 1/50, 1/45)：q(a+r) = ra，S_3S_2(1) = S_4S_5(0)."""
    return IFSParams(p="1/40", q="1/50", r="1/45")


@pytest.fixture
def reference_sys(reference_params):
    return build_spqr(reference_params)


@pytest.fixture
def certified_params() -> IFSParams:
    """(1/2025, 1/54, 1/45)：只有 (m, 2m) 分支存活，且都在根部分离."""
    return IFSParams(p="1/2025", q="1/54", r="1/45")


@pytest.fixture
def certified_sys(certified_params):
    return build_spqr(certified_params)


@pytest.fixture
def coincident_params() -> IFSParams:
    """q = r²：S_3S_2 与 S_4S_6S_5 完全相同."""
    r = Fraction(1, 45)
    return IFSParams(p=Fraction(1, 2025), q=r * r, r=r)


@pytest.fixture
def coincident_sys(coincident_params):
    return build_spqr(coincident_params)
