"""Tests for wpvol.curves: spectral curves, densities and analytic continuation."""

import math
from fractions import Fraction

import mpmath
import pytest

from wpvol.curves import (
    HARD,
    REGULAR,
    DensityParams,
    continuation_residual,
    curve_airy,
    curve_jt,
    curve_jt_super,
    default_order,
    density_of_states,
    make_curve,
)
from wpvol.errors import InvalidArgumentError
from wpvol.ring import PI2, SQRT2, ExactScalar


class TestConstructors:
    def test_jt_leading_terms(self):
        c = curve_jt(9)
        assert c.edge_class == REGULAR
        assert c.y_series[1] == Fraction(1, 2)
        assert c.y_series[3] == PI2 * Fraction(-1, 3)
        assert c.order == 9

    def test_super_leading_terms(self):
        c = curve_jt_super(9)
        assert c.edge_class == HARD
        assert c.density_sign == -1
        assert c.y_series[-1] == SQRT2
        assert c.y_series[1] == SQRT2 * PI2 * -2

    def test_airy(self):
        c = curve_airy("1/2", 5)
        assert c.curve_id == "airy-1/2"
        assert c.y_series[1] == Fraction(1, 2)
        assert c.y_series[5] == 0

    def test_airy_zero_slope(self):
        with pytest.raises(InvalidArgumentError, match="nonzero"):
            curve_airy(0)

    def test_order_too_small(self):
        with pytest.raises(InvalidArgumentError):
            curve_jt(1)

    def test_make_curve_unknown(self):
        with pytest.raises(InvalidArgumentError, match="unknown curve"):
            make_curve("sinh", 9)

    def test_default_order_covers_recursion(self):
        # omega_{g,n} reads 1/(4y) through z^(6g-7+2n)
        assert default_order(0, 0, 3) == 3
        assert default_order(1, 1, 1) >= 3
        assert default_order(3, 3, 2) >= 17


class TestDensity:
    def test_jt_value(self):
        rho = density_of_states(curve_jt(), 1.0)
        assert float(rho) == pytest.approx(math.sinh(2 * math.pi) / (4 * math.pi ** 2), rel=1e-12)
        assert float(rho) == pytest.approx(6.7821, abs=1e-4)

    def test_entropy_weight(self):
        base = density_of_states(curve_jt(), 2.0)
        weighted = density_of_states(curve_jt(), 2.0, DensityParams(1.5))
        assert float(weighted / base) == pytest.approx(math.exp(1.5))

    def test_super_positive(self):
        rho = density_of_states(curve_jt_super(), 1.0)
        expected = math.sqrt(2) * math.cosh(2 * math.pi) / math.pi
        assert float(rho) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("S", [0.0, 1.2])
    def test_super_hard_edge_law(self, S):
        limit = math.sqrt(2) * math.exp(S) / math.pi
        scaled = [float(density_of_states(curve_jt_super(), E, DensityParams(S)) * mpmath.sqrt(E)) for E in (1e-2, 1e-4, 1e-8)]
        gaps = [abs(v - limit) for v in scaled]
        assert gaps[0] > gaps[1] > gaps[2]
        assert scaled[-1] == pytest.approx(limit, rel=1e-6)

    def test_regular_edges_vanish(self):
        for curve in (curve_jt(), curve_airy("1/2")):
            assert float(density_of_states(curve, 1e-8)) < 1e-3

    def test_non_positive_energy(self):
        with pytest.raises(InvalidArgumentError):
            density_of_states(curve_jt(), 0.0)

    def test_infinite_entropy(self):
        with pytest.raises(InvalidArgumentError):
            DensityParams(float("inf"))


class TestContinuation:
    @pytest.mark.parametrize("E", [0.1, 1.0, 5.0])
    def test_super_curve_equation(self, E):
        assert continuation_residual(curve_jt_super(81), E, 40) < 1e-10

    def test_jt_curve_equation(self):
        assert continuation_residual(curve_jt(81), 1.0, 40) < 1e-10

    def test_closed_form_y(self):
        c = curve_jt()
        z = mpmath.mpf("0.3")
        assert abs(c.y(z) - mpmath.sin(2 * mpmath.pi * z) / (4 * mpmath.pi)) < 1e-25
        assert isinstance(c.y_series[1], ExactScalar)
