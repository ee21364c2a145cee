"""重叠认证：包络检查、分支剪枝、细分与证书."""
from fractions import Fraction

import pytest

from app.core.errors import HullAssumptionError, RefinementLimitError, SpqrError
from app.models.certificate import HullRelation, PairStatusKind, WitnessKind
from app.models.params import SPQR_H, IFSParams, ParamMode
from app.services.affine_core import AffineMap1D, Interval, parse_word
from app.services.ifs_model import build_spqr, build_system, cylinder
from app.services.wsp_analyzer import build_G, build_H
from app.services.overlap_certifier import (
    OverlapCertifier,
    branch_distance_intervals,
    branch_survives,
    brute_force_overlaps,
    family_bounds,
    hull_separation_check,
    refine_pair,
    osc_hull_check,
    surviving_branches,
)

H = SPQR_H


@pytest.fixture
def certifier():
    return OverlapCertifier(workers=1)


@pytest.fixture
def overlapping_sys():
    """x/3 与 1/5 + x/3：一级包络相交，但没有共同的已知点."""
    return build_system([AffineMap1D(Fraction(1, 3), 0), AffineMap1D(Fraction(1, 3), Fraction(1, 5))])


class TestHullSeparation:
    def test_first_level(self, reference_sys):
        assert hull_separation_check(reference_sys, (1,), (2,)) == HullRelation.DISJOINT
        assert hull_separation_check(reference_sys, (3,), (4,)) == HullRelation.OVERLAPPING
        assert hull_separation_check(reference_sys, (5,), (5,)) == HullRelation.OVERLAPPING

    def test_gap_between_2_and_3(self, reference_params, reference_sys):
        q, r = reference_params.q, reference_params.r
        assert cylinder(reference_sys, "3").lo - cylinder(reference_sys, "2").hi == Fraction(1, 3) - q - r


class TestRefinePair:
    def test_disjoint_pair(self, reference_sys):
        outcome = refine_pair(reference_sys, (5,), (6,), Fraction(1, 10 ** 12))
        assert outcome.resolved
        assert outcome.steps == 1

    def test_common_point_witness(self, reference_params, reference_sys):
        outcome = refine_pair(reference_sys, parse_word("32"), parse_word("45"), Fraction(1, 10 ** 12))
        assert len(outcome.witnesses) == 1
        witness = outcome.witnesses[0]
        assert witness.kind == WitnessKind.COMMON_POINT
        assert witness.point == H - reference_params.r * Fraction(1, 5)
        assert witness.point == Fraction(119, 225)

    def test_coincident_maps(self, coincident_sys):
        outcome = refine_pair(coincident_sys, parse_word("32"), parse_word("465"), Fraction(1, 10 ** 9))
        assert [w.kind for w in outcome.witnesses] == [WitnessKind.COINCIDENT_MAPS]

    def test_below_scale_is_unresolved(self, reference_sys):
        outcome = refine_pair(reference_sys, parse_word("32"), parse_word("45"), Fraction(1, 1000))
        assert not outcome.witnesses
        assert [(u.w1, u.w2) for u in outcome.unresolved] == [("32", "45")]

    def test_step_limit(self, overlapping_sys):
        with pytest.raises(RefinementLimitError):
            refine_pair(overlapping_sys, (1,), (2,), Fraction(1, 10 ** 30), max_steps=0)

    def test_extension_limit_gives_hull_overlap(self, overlapping_sys):
        outcome = refine_pair(overlapping_sys, (1,), (2,), Fraction(0), max_extension=0)
        assert [w.kind for w in outcome.witnesses] == [WitnessKind.HULL_OVERLAP]


class TestBranches:
    def test_family_bounds_strict_mode(self, reference_params, reference_sys):
        r = reference_params.r
        bounds1, bounds2 = family_bounds(reference_sys)
        assert bounds1 == Interval(Fraction(1, 5), 1)
        assert bounds2 == Interval(Fraction(1, 5), 1)
        assert bounds1.lo > r

    def test_hull_assumption(self):
        sys = build_spqr(IFSParams(p="1/40", q="5/6", r="1/40", mode=ParamMode.RELAXED))
        with pytest.raises(HullAssumptionError) as exc:
            family_bounds(sys)
        assert "hull assumption violated" in str(exc.value)

    def test_pruned_branches_are_disjoint(self, reference_sys):
        for m in range(6):
            for n in range(6):
                left, right = branch_distance_intervals(reference_sys, m, n)
                if not branch_survives(reference_sys, m, n):
                    assert left.is_disjoint(right)

    def test_survivors_of_certified_fixture(self, certified_sys):
        branches, stats = surviving_branches(certified_sys, Fraction(1, 10 ** 12))
        assert branches
        assert all(n == 2 * m for m, n in branches)
        assert stats.surviving == len(branches)
        assert stats.examined == stats.pruned + stats.surviving

    def test_exhaustive_above_scale(self, reference_params, reference_sys):
        eps = Fraction(1, 10 ** 6)
        _, stats = surviving_branches(reference_sys, eps)
        p, q, r = reference_params.p, reference_params.q, reference_params.r
        lo = Fraction(1, 5)
        assert q * p ** stats.max_m >= eps * lo > q * p ** (stats.max_m + 1)
        assert r ** (stats.max_n + 1) >= eps * lo > r ** (stats.max_n + 2)
        assert stats.examined >= (stats.max_m + 1) * (stats.max_n + 1)

    def test_eps_must_be_positive(self, reference_sys):
        with pytest.raises(SpqrError) as exc:
            surviving_branches(reference_sys, Fraction(0))
        assert exc.value.code == "INVALID_EPS"


class TestCertifier:
    def test_certified_fixture(self, certifier, certified_sys):
        certificate = certifier.certify_all_pairs(certified_sys, "1e-12")
        assert certificate.certified
        assert certificate.pairs["3-4"].kind == PairStatusKind.CERTIFIED_TOUCH_POINT
        assert certificate.pairs["3-4"].at == H
        assert len(certificate.pairs) == 15
        for key, status in certificate.pairs.items():
            if key != "3-4":
                assert status.kind == PairStatusKind.CERTIFIED_DISJOINT
                assert status.depth == 1

    def test_reference_triple_is_resonant(self, certifier, reference_sys):
        status = certifier.certify_pair_34(reference_sys, "1e-6")
        assert status.kind == PairStatusKind.OVERLAP_WITNESS
        assert any((w.w1, w.w2) == ("32", "45") and w.kind == WitnessKind.COMMON_POINT for w in status.witnesses)

    def test_coincident_fixture(self, certifier, coincident_sys):
        certificate = certifier.certify_all_pairs(coincident_sys, "1e-6")
        assert not certificate.certified
        assert certificate.has_witness
        first = certificate.pairs["3-4"].witnesses[0]
        assert (first.w1, first.w2, first.kind) == ("32", "465", WitnessKind.COINCIDENT_MAPS)
        assert (first.m, first.n) == (0, 1)

    def test_zero_step_limit_is_respected(self, certified_sys):
        strict = OverlapCertifier(workers=1, max_steps=0)
        assert strict.max_steps == 0
        with pytest.raises(RefinementLimitError):
            strict.certify_pair_34(certified_sys, "1e-12")

    def test_solved_q_makes_h_and_g_coincide(self, certifier):
        p, r = Fraction(1, 2025), Fraction(1, 45)
        m, n = 1, 2
        q = r ** (n + 1) / p ** m
        sys = build_spqr(IFSParams(p=p, q=q, r=r))
        assert build_H(sys, m) == build_G(sys, n)
        status = certifier.certify_pair_34(sys, "1e-6")
        assert status.kind == PairStatusKind.OVERLAP_WITNESS
        coincident = {(w.w1, w.w2) for w in status.witnesses if w.kind == WitnessKind.COINCIDENT_MAPS}
        assert ("315", "4662") in coincident

    def test_coarse_scale_is_unknown(self, certifier, reference_sys):
        status = certifier.certify_pair_34(reference_sys, Fraction(1, 1000))
        assert status.kind == PairStatusKind.UNKNOWN_BELOW_SCALE
        assert ("32", "45") in {(u.w1, u.w2) for u in status.unresolved}

    def test_shrinking_eps_keeps_disjoint_pairs(self, certifier, certified_sys):
        coarse = certifier.certify_all_pairs(certified_sys, "1e-3")
        fine = certifier.certify_all_pairs(certified_sys, "1e-12")
        for key, status in coarse.pairs.items():
            if status.kind == PairStatusKind.CERTIFIED_DISJOINT:
                assert fine.pairs[key].kind == PairStatusKind.CERTIFIED_DISJOINT

    def test_critical_addresses(self, certifier, reference_sys):
        first, second = certifier.critical_addresses(reference_sys)
        assert (str(first), str(second)) == ("3(1)", "4(6)")

    def test_certificate_serialization(self, certifier, certified_sys):
        dumped = certifier.certify_all_pairs(certified_sys, "1e-12").model_dump(mode="json")
        assert dumped["eps"] == "1/1000000000000"
        assert dumped["touch_point"] == "8/15"
        assert dumped["pairs"]["3-4"]["kind"] == "certified_touch_point"
        assert "elapsed_seconds" not in dumped["stats"]


class TestBruteForce:
    def test_certified_fixture_only_touches_at_h(self, certified_sys):
        assert brute_force_overlaps(certified_sys, 2) == [((3, 1), (4, 6))]

    def test_reference_triple_overlap_found(self, reference_sys):
        assert ((3, 2), (4, 5)) in brute_force_overlaps(reference_sys, 2)

    def test_only_the_34_family_overlaps(self, certified_sys):
        found = brute_force_overlaps(certified_sys, 4)
        assert ((3, 1, 1, 1), (4, 6, 6, 6)) in found
        assert {(w1[0], w2[0]) for w1, w2 in found} == {(3, 4)}

    @pytest.mark.slow
    def test_depth_six_agrees_with_certificate(self, certifier, certified_sys):
        found = brute_force_overlaps(certified_sys, 6)
        assert ((3, 1, 1, 1, 1, 1), (4, 6, 6, 6, 6, 6)) in found
        for w1, w2 in found:
            assert cylinder(certified_sys, w1).contains(H) or cylinder(certified_sys, w2).contains(H)
        assert certifier.certify_all_pairs(certified_sys, "1e-12").certified


class TestOscHullCheck:
    def test_strict_mode_reference(self, reference_params):
        check = osc_hull_check(reference_params)
        assert check.hull_assumption
        assert "32~45" in check.overlapping
        assert not check.separated

    def test_wide_q_breaks_hull_assumption(self):
        check = osc_hull_check(IFSParams(p="1/40", q="5/6", r="1/40", mode=ParamMode.RELAXED))
        assert not check.hull_assumption
