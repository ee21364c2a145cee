"""精确仿射核心的测试."""
import random
from fractions import Fraction

import pytest

from app.core.errors import NoFixedPointError, NotInvertibleError, SpqrError, WordError
from app.models.params import SPQR_A, SPQR_H
from app.services.affine_core import (
    IDENTITY,
    UNIT_INTERVAL,
    AffineMap1D,
    Interval,
    apply,
    compose,
    compose_all,
    decimal_str,
    fixed_point,
    format_scalar,
    format_word,
    image,
    inverse,
    parse_word,
    to_scalar,
)

H = SPQR_H


def _random_map(rng: random.Random) -> AffineMap1D:
    ratio = Fraction(rng.randint(-9, 9) or 1, rng.randint(10, 40))
    return AffineMap1D(ratio, Fraction(rng.randint(-20, 20), rng.randint(1, 30)))


class TestScalar:
    def test_decimal_strings_are_exact(self):
        assert to_scalar("0.025") == Fraction(1, 40)
        assert to_scalar("1/40") == Fraction(1, 40)
        assert to_scalar("1e-12") == Fraction(1, 10 ** 12)

    def test_float_uses_shortest_repr(self):
        assert to_scalar(0.1) == Fraction(1, 10)

    def test_invalid_string(self):
        with pytest.raises(SpqrError) as exc:
            to_scalar("abc")
        assert exc.value.code == "INVALID_SCALAR"

    def test_format(self):
        assert format_scalar(Fraction(2, 4)) == "1/2"
        assert format_scalar(Fraction(3)) == "3"

    def test_decimal_rendering(self):
        assert decimal_str(Fraction(1, 10), 5) == "0.1"
        assert decimal_str(Fraction(1, 3), 10).startswith("0.333333333")


class TestInterval:
    def test_reversed_endpoints(self):
        with pytest.raises(SpqrError):
            Interval(Fraction(1), Fraction(0))

    def test_touching_intervals(self):
        a = Interval(Fraction(0), Fraction(1, 2))
        b = Interval(Fraction(1, 2), Fraction(1))
        assert a.intersects(b)
        assert not a.is_disjoint(b)
        assert a.intersection(b) == Interval(Fraction(1, 2), Fraction(1, 2))

    def test_disjoint(self):
        a = Interval(Fraction(0), Fraction(1, 3))
        b = Interval(Fraction(1, 2), Fraction(1))
        assert a.is_disjoint(b)
        with pytest.raises(SpqrError):
            a.intersection(b)


class TestMaps:
    def test_apply_examples(self, reference_sys):
        assert apply(reference_sys.symbol_map(1), Fraction(0)) == 0
        assert apply(reference_sys.symbol_map(3), Fraction(0)) == Fraction(8, 15)
        assert apply(reference_sys.symbol_map(6), Fraction(1)) == 1

    def test_compose_examples(self, reference_params, reference_sys):
        s2 = reference_sys.symbol_map(2)
        assert compose(IDENTITY, s2) == s2

        p, q, r = reference_params.p, reference_params.q, reference_params.r
        s31 = compose(reference_sys.symbol_map(3), reference_sys.symbol_map(1))
        assert s31 == AffineMap1D(-q * p, H)

        s46 = compose(reference_sys.symbol_map(4), reference_sys.symbol_map(6))
        assert s46 == AffineMap1D(r * r, H - r * r)

    def test_inverse_examples(self, reference_sys):
        assert inverse(IDENTITY) == IDENTITY
        assert inverse(AffineMap1D(Fraction(1, 2), Fraction(2))) == AffineMap1D(Fraction(2), Fraction(-4))
        assert apply(inverse(reference_sys.symbol_map(3)), H) == 0

    def test_inverse_of_zero_ratio(self):
        with pytest.raises(NotInvertibleError) as exc:
            inverse(AffineMap1D(Fraction(0), Fraction(1)))
        assert exc.value.code == "NOT_INVERTIBLE"

    def test_fixed_points(self, reference_params, reference_sys):
        assert fixed_point(reference_sys.symbol_map(1)) == 0
        assert fixed_point(reference_sys.symbol_map(6)) == 1
        assert fixed_point(reference_sys.symbol_map(3)) == H / (1 + reference_params.q)

    def test_no_fixed_point(self):
        with pytest.raises(NoFixedPointError):
            fixed_point(AffineMap1D(Fraction(1), Fraction(1, 2)))

    def test_image_examples(self, reference_params, reference_sys):
        q, r = reference_params.q, reference_params.r
        assert image(reference_sys.symbol_map(3), UNIT_INTERVAL) == Interval(H - q, H)
        assert image(IDENTITY, UNIT_INTERVAL) == UNIT_INTERVAL
        assert image(reference_sys.symbol_map(4), UNIT_INTERVAL) == Interval(H - r, H)

    def test_power_matches_repeated_composition(self, reference_sys):
        s1 = reference_sys.symbol_map(1)
        assert s1.power(0) == IDENTITY
        assert s1.power(7) == compose_all([s1] * 7)

    def test_algebraic_laws_on_random_maps(self):
        rng = random.Random(7)
        for _ in range(50):
            f, g, k = _random_map(rng), _random_map(rng), _random_map(rng)
            x = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
            iv = Interval(Fraction(rng.randint(0, 5), 7), Fraction(rng.randint(6, 12), 7))

            assert compose(compose(f, g), k) == compose(f, compose(g, k))
            assert inverse(compose(f, g)) == compose(inverse(g), inverse(f))
            assert compose(inverse(f), f) == IDENTITY
            assert image(f, iv).width() == abs(f.ratio) * iv.width()
            assert apply(compose(f, g), x) == apply(f, apply(g, x))


class TestWords:
    def test_parse_forms(self):
        assert parse_word("3116") == (3, 1, 1, 6)
        assert parse_word("") == ()
        assert parse_word("1.2.3") == (1, 2, 3)
        assert parse_word([4, 6]) == (4, 6)

    def test_invalid_symbol(self):
        with pytest.raises(WordError):
            parse_word("37")
        with pytest.raises(WordError):
            parse_word("3a")

    def test_format_roundtrip_for_single_digits(self):
        assert format_word((3, 2)) == "32"
        assert format_word((1, 12)) == "1.12"

    def test_a_constant(self):
        assert SPQR_A == Fraction(1, 5)
