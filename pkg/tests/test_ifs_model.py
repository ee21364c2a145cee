"""系统模型：参数盒、S_pqr 工厂、柱集、覆盖与地址映射."""
from fractions import Fraction

import pytest
from pydantic import ValidationError

from app.core.errors import DepthCapError, ParameterError, SpqrError, WordError
from app.models.params import SPQR_A, SPQR_H, IFSParams, ParamMode
from app.services.affine_core import AffineMap1D, Interval, parse_word
from app.services.ifs_model import (
    Address,
    address_metric,
    address_point,
    address_value,
    build_spqr,
    cantor_system,
    cover,
    cylinder,
    halving_system,
    hull_assumption_holds,
    merge_intervals,
    words_of_length,
)

H, A = SPQR_H, SPQR_A


class TestParams:
    def test_strict_box_is_open(self):
        with pytest.raises(ParameterError) as exc:
            build_spqr(IFSParams(p="1/40", q="1/36", r="1/45"))
        assert "1/36" in str(exc.value)

    def test_non_positive(self):
        with pytest.raises(ParameterError) as exc:
            IFSParams(p="0", q="1/50", r="1/45").check_box()
        assert "p" in str(exc.value)

    def test_relaxed_regime_accepted(self):
        params = IFSParams(p="1/40", q="5/6", r="1/40", mode=ParamMode.RELAXED)
        sys = build_spqr(params)
        assert sys.params.relaxed
        assert not hull_assumption_holds(sys)

    def test_unparseable_value(self):
        with pytest.raises(ValidationError):
            IFSParams(p="x", q="1/50", r="1/45")

    def test_serialization_is_rational_text(self, reference_params):
        dumped = reference_params.model_dump(mode="json")
        assert dumped["p"] == "1/40"
        assert dumped["mode"] == "strict"


class TestFactory:
    def test_maps_match_construction(self, reference_params, reference_sys):
        p, q, r = reference_params.p, reference_params.q, reference_params.r
        assert reference_sys.maps == (
            AffineMap1D(p, 0),
            AffineMap1D(r, A),
            AffineMap1D(-q, H),
            AffineMap1D(r, H - r),
            AffineMap1D(-r, 1 - A),
            AffineMap1D(r, 1 - r),
        )
        assert reference_sys.symbol_map(3) == AffineMap1D(Fraction(-1, 50), Fraction(8, 15))

    def test_non_contraction_rejected(self):
        from app.services.ifs_model import build_system

        with pytest.raises(SpqrError) as exc:
            build_system([AffineMap1D(Fraction(1), Fraction(0))])
        assert exc.value.code == "NOT_CONTRACTION"


class TestCylinders:
    def test_examples(self, reference_params, reference_sys):
        q, r = reference_params.q, reference_params.r
        assert cylinder(reference_sys, ()) == Interval(0, 1)
        assert cylinder(reference_sys, "3") == Interval(H - q, H)
        assert cylinder(reference_sys, "46") == Interval(H - r * r, H)

    def test_nesting(self, reference_sys):
        for w in words_of_length(6, 2):
            parent = cylinder(reference_sys, w)
            for j in range(1, 7):
                assert parent.contains_interval(cylinder(reference_sys, w + (j,)))

    def test_touch_point_in_both_families(self, reference_sys):
        for k in range(5):
            assert cylinder(reference_sys, (3,) + (1,) * k).contains(H)
            assert cylinder(reference_sys, (4,) + (6,) * k).contains(H)


class TestCover:
    def test_depth_zero(self, reference_sys):
        c = cover(reference_sys, 0)
        assert c.entries == [((), Interval(0, 1))]

    def test_depth_one_hulls(self, reference_params, reference_sys):
        p, q, r = reference_params.p, reference_params.q, reference_params.r
        assert cover(reference_sys, 1).intervals() == [
            Interval(0, p),
            Interval(A, A + r),
            Interval(H - q, H),
            Interval(H - r, H),
            Interval(1 - A - r, 1 - A),
            Interval(1 - r, 1),
        ]

    def test_word_11_width(self, reference_params, reference_sys):
        entries = dict(cover(reference_sys, 2).entries)
        assert entries[(1, 1)].width() == reference_params.p ** 2

    def test_lexicographic_order(self, reference_sys):
        words = [w for w, _ in cover(reference_sys, 2).entries]
        assert words == sorted(words)
        assert len(words) == 36

    def test_hutchinson_consistency(self, reference_sys):
        coarse = merge_intervals(cover(reference_sys, 2).intervals())
        for iv in cover(reference_sys, 3).intervals():
            assert any(big.contains_interval(iv) for big in coarse)

    def test_endpoints_covered(self, reference_sys):
        for depth in range(4):
            c = cover(reference_sys, depth)
            assert c.contains(Fraction(0)) and c.contains(Fraction(1))

    def test_depth_cap(self, reference_sys):
        with pytest.raises(DepthCapError):
            cover(reference_sys, 3, cap=2)

    def test_total_width_factorizes(self, reference_params, reference_sys):
        p, q, r = reference_params.p, reference_params.q, reference_params.r
        assert cover(reference_sys, 3).total_width() == (p + q + 4 * r) ** 3


class TestAddresses:
    def test_parse_and_truncate(self):
        addr = Address.parse("3(1)")
        assert addr.preperiod == (3,) and addr.period == (1,)
        assert addr.truncate(4) == (3, 1, 1, 1)
        assert str(Address.parse("45(62)")) == "45(62)"
        assert Address.parse("45(62)").truncate(5) == (4, 5, 6, 2, 6)

    def test_empty_period(self):
        with pytest.raises(WordError):
            Address(preperiod=(1,), period=())

    def test_fixed_point_of_s1(self, reference_params, reference_sys):
        p = reference_params.p
        for n in (1, 3, 6):
            assert address_point(reference_sys, Address.parse("(1)"), n) == (p ** n / 2, p ** n / 2)
        assert address_value(reference_sys, Address.parse("(1)")) == 0

    def test_critical_addresses_converge_to_h(self, reference_sys):
        for text in ("3(1)", "4(6)"):
            addr = Address.parse(text)
            assert address_value(reference_sys, addr) == H
            mid, half = address_point(reference_sys, addr, 8)
            assert abs(mid - H) <= half

    def test_depth_must_be_positive(self, reference_sys):
        with pytest.raises(WordError):
            address_point(reference_sys, Address.parse("(1)"), 0)


class TestMetric:
    R = Fraction(1, 30)

    def test_examples(self):
        assert address_metric(parse_word("123"), parse_word("123"), self.R) == 0
        assert address_metric(parse_word("1231"), parse_word("1241"), self.R) == self.R ** 2
        assert address_metric(parse_word("21"), parse_word("11"), self.R) == 1

    def test_length_mismatch(self):
        with pytest.raises(WordError):
            address_metric((1, 2), (1,), self.R)

    def test_base_range(self):
        with pytest.raises(SpqrError) as exc:
            address_metric((1,), (2,), Fraction(1))
        assert exc.value.code == "INVALID_METRIC"


class TestPresets:
    def test_cantor_and_halving(self):
        assert cover(cantor_system(), 2).intervals()[1] == Interval(Fraction(2, 9), Fraction(1, 3))
        assert merge_intervals(cover(halving_system(), 3).intervals()) == [Interval(0, 1)]
