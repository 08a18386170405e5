"""Tests for wpvol.series: truncated Laurent series over the exact ring."""

from fractions import Fraction

import mpmath
import pytest

from wpvol.errors import InvalidArgumentError, NotInvertibleError, TruncationOverflowError
from wpvol.ring import PI2, SQRT2, ExactScalar
from wpvol.series import TruncSeries, series_mul, series_reciprocal


def odd_series(terms, order):
    return TruncSeries.from_terms(terms, order, parity="odd")


class TestTruncSeries:
    def test_coefficient_beyond_order_raises(self):
        s = odd_series({1: 1, 3: 2}, 5)
        assert s[3] == 2
        assert s[4] == 0
        with pytest.raises(TruncationOverflowError) as info:
            s.coefficient(5)
        assert info.value.required == 5
        assert info.value.available == 5

    def test_parity_enforced(self):
        with pytest.raises(InvalidArgumentError, match="odd"):
            TruncSeries.from_terms({1: 1, 2: 1}, 5, parity="odd")

    def test_valuation(self):
        assert odd_series({3: 1}, 9).valuation() == 3
        assert TruncSeries.from_terms({}, 4).valuation() == 4

    def test_shift_flips_parity(self):
        s = odd_series({1: 1}, 5).shift(-1)
        assert s.parity == "even"
        assert s.start == 0
        assert s.order == 4

    def test_add_uses_smaller_order(self):
        s = odd_series({1: 1}, 5) + odd_series({1: 1, 5: 1}, 9)
        assert s.order == 5
        assert s[1] == 2

    def test_pretty(self):
        s = odd_series({1: Fraction(1, 2), 3: PI2 * Fraction(-1, 3)}, 5)
        assert s.pretty() == "1/2·z + -π²/3·z^3 + O(z^5)"

    def test_evaluate(self):
        s = odd_series({1: 1, 3: 1}, 5)
        assert abs(s.evaluate(0.5) - 0.625) < 1e-25


class TestMultiply:
    def test_known_product(self):
        a = TruncSeries.from_terms({0: 1, 1: 1}, 4)
        b = TruncSeries.from_terms({0: 1, 1: -1}, 4)
        c = series_mul(a, b)
        assert c[0] == 1
        assert c[1] == 0
        assert c[2] == -1
        assert c.order == 4

    def test_order_tracks_valuation(self):
        a = odd_series({1: 1}, 5)  # z + O(z^5)
        b = odd_series({-1: 1}, 3)  # 1/z + O(z^3)
        c = a * b
        # z * O(z^3) and O(z^5)/z both limit the product to O(z^4)
        assert c.order == 4
        assert c.parity == "even"


class TestReciprocal:
    def test_geometric(self):
        s = TruncSeries.from_terms({0: 1, 1: -1}, 6)
        inv = series_reciprocal(s)
        assert all(inv[k] == 1 for k in range(6))

    def test_laurent_result(self):
        # 1/(z/2 - pi^2 z^3/3) = 2/z + 4 pi^2 z/3 + ...
        y = odd_series({1: Fraction(1, 2), 3: PI2 * Fraction(-1, 3)}, 5)
        inv = series_reciprocal(y)
        assert inv.start == -1
        assert inv.order == 3
        assert inv[-1] == 2
        assert inv[1] == PI2 * Fraction(4, 3)
        assert inv.parity == "odd"

    def test_sqrt2_leading(self):
        s = odd_series({-1: SQRT2, 1: SQRT2 * PI2 * -2}, 5)
        inv = series_reciprocal(s)
        assert inv[1] == SQRT2 * Fraction(1, 2)
        assert (s * inv)[0] == 1

    def test_non_unit_leading_coefficient(self):
        s = TruncSeries.from_terms({0: PI2 + 1, 1: 1}, 4)
        with pytest.raises(NotInvertibleError):
            series_reciprocal(s)

    def test_unknown_series(self):
        with pytest.raises(NotInvertibleError):
            series_reciprocal(TruncSeries.from_terms({}, 3))
