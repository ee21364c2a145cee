"""WSP 见证：H_m、G_n 闭式、缺陷与搜索."""
from fractions import Fraction

import pytest

from app.core.errors import SpqrError
from app.models.params import SPQR_A, SPQR_H, IFSParams, ParamMode
from app.services.affine_core import AffineMap1D
from app.services.ifs_model import build_spqr, cantor_system
from app.services.wsp_analyzer import (
    best_partner,
    build_G,
    build_H,
    closed_form_G,
    closed_form_H,
    closed_form_defect,
    defect,
    log_ratio_relation,
    witness_search,
)

H, A = SPQR_H, SPQR_A


def _relaxed(p, q, r):
    return build_spqr(IFSParams(p=p, q=q, r=r, mode=ParamMode.RELAXED))


class TestClosedForms:
    def test_h_examples(self, reference_params, reference_sys):
        p, q, r = reference_params.p, reference_params.q, reference_params.r
        assert build_H(reference_sys, 0) == AffineMap1D(q * r, H - q + q * A)
        assert build_H(reference_sys, 2) == AffineMap1D(p * p * q * r, H - p * p * q * (1 - A))

    def test_g_examples(self, reference_params, reference_sys):
        r = reference_params.r
        assert build_G(reference_sys, 0) == AffineMap1D(r ** 2, H - r * (1 - A))
        assert build_G(reference_sys, 1) == AffineMap1D(r ** 3, H - r ** 2 * (1 - A))

    def test_composition_matches_closed_form(self, reference_params, reference_sys):
        for k in range(11):
            assert build_H(reference_sys, k) == closed_form_H(reference_params, k)
            assert build_G(reference_sys, k) == closed_form_G(reference_params, k)

    def test_requires_spqr(self):
        with pytest.raises(SpqrError) as exc:
            build_H(cantor_system(), 0)
        assert exc.value.code == "NOT_SPQR"

    def test_negative_exponent(self, reference_sys):
        with pytest.raises(SpqrError):
            build_G(reference_sys, -1)


class TestDefect:
    def test_reference_zero_zero(self, reference_sys):
        pair = defect(reference_sys, 0, 0)
        assert pair.ratio == Fraction(9, 10)
        assert pair.ratio_defect == Fraction(1, 10)
        assert pair.offset_defect == Fraction(18, 5)
        assert pair.ratio_defect_decimal == "0.1"

    def test_two_ways_agree(self, reference_params, reference_sys):
        for m in range(4):
            for n in range(4):
                pair = defect(reference_sys, m, n)
                ratio, offset = closed_form_defect(reference_params, m, n)
                assert (pair.ratio, pair.offset) == (ratio, offset)

    def test_exact_resonance(self):
        pair = defect(_relaxed("1/4", "1/2", "1/2"), 0, 0)
        assert pair.is_identity

    def test_q_equals_r(self):
        assert defect(build_spqr(IFSParams(p="1/40", q="1/45", r="1/45")), 0, 0).is_identity

    def test_zero_defect_iff_scale_resonance(self, reference_params, reference_sys):
        p, q, r = reference_params.p, reference_params.q, reference_params.r
        for m in range(4):
            for n in range(6):
                pair = defect(reference_sys, m, n)
                assert (pair.ratio_defect == 0) == (p ** m * q == r ** (n + 1))


class TestBestPartner:
    def test_reference(self, reference_params):
        assert best_partner(reference_params, 0) == 0
        assert best_partner(reference_params, 1) == 1

    def test_is_optimal(self, reference_params, reference_sys):
        for m in range(6):
            n = best_partner(reference_params, m)
            best = defect(reference_sys, m, n)
            ratio = best.ratio
            # 在对数尺度上最接近 1
            for other in range(max(0, n - 2), n + 3):
                candidate = defect(reference_sys, m, other).ratio
                assert max(ratio, 1 / ratio) <= max(candidate, 1 / candidate)


class TestLogRatio:
    def test_relation_found(self):
        assert log_ratio_relation(Fraction(1, 4), Fraction(1, 2)) == (1, 2)

    def test_no_small_relation(self):
        assert log_ratio_relation(Fraction(1, 40), Fraction(1, 45)) is None


class TestSearch:
    def test_loose_target_returns_first_pair(self, reference_sys):
        result = witness_search(reference_sys, 2.0, 10)
        assert result.target_reached
        assert result.searched_m == 0
        assert (result.best.m, result.best.n) == (0, 0)

    def test_best_so_far_non_increasing(self, reference_sys):
        result = witness_search(reference_sys, 1e-30, 20)
        assert not result.target_reached
        assert result.note.startswith("target not reached")
        values = result.best_so_far
        assert len(values) == 21
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert values[-1] < values[0]

    def test_longer_search_never_worse(self, reference_sys):
        bests = [witness_search(reference_sys, 1e-30, k).best_so_far[-1] for k in (5, 10, 20)]
        assert bests[0] >= bests[1] >= bests[2]

    @pytest.mark.slow
    def test_long_search_improves_after_m_20(self, reference_sys):
        result = witness_search(reference_sys, 1e-30, 330)
        values = result.best_so_far
        assert len(values) == 331
        assert values[20] == Fraction(1, 80)
        assert values[323] == Fraction(1, 80)
        assert values[324] < Fraction(1, 80)
        assert values[-1] < values[20]
        assert (result.best.m, result.best.n) == (324, 314)

    def test_discrete_case(self):
        result = witness_search(_relaxed("1/4", "1/3", "1/2"), 1e-3, 10)
        assert result.discrete
        assert result.relation == [1, 2]
        assert not result.target_reached
        assert result.best.ratio_defect == Fraction(1, 3)

    def test_pairs_sorted_by_defect(self, reference_sys):
        result = witness_search(reference_sys, 1e-30, 8)
        defects = [w.ratio_defect for w in result.pairs]
        assert defects == sorted(defects)

    def test_invalid_target(self, reference_sys):
        with pytest.raises(SpqrError) as exc:
            witness_search(reference_sys, 0, 5)
        assert exc.value.code == "INVALID_TARGET"
