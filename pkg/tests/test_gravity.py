"""Tests for wpvol.gravity: volumes, closed-form partition functions and quadrature checks."""

import math
from fractions import Fraction

import mpmath
import pytest

from wpvol.curves import curve_jt, curve_jt_super
from wpvol.errors import InvalidArgumentError
from wpvol.gravity import (
    convention_constant,
    correlator_closed_form,
    disc_laplace_check,
    disc_partition,
    double_trumpet,
    evaluate_volume,
    genus_closed_form,
    genus_expansion,
    genus_partition_via_correlator,
    genus_partition_via_gluing,
    gluing_closed_form,
    laplace_transform,
    multi_boundary_partition,
    super_disc_density,
    super_disc_partition,
    super_laplace_check,
    trumpet,
    volume_from_correlator,
)
from wpvol.recursion import RecursionEngine
from wpvol.ring import ExactScalar


def pi_power(coeff, exponent):
    return ExactScalar.monomial(coeff, pi_exp=exponent)


@pytest.fixture(scope="module")
def engine():
    return RecursionEngine(curve_jt(27))


class TestVolumes:
    def test_v11(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1))
        assert V.terms == {(0,): pi_power("1/12", 2), (1,): ExactScalar.rational("1/48")}

    def test_v11_mirzakhani_doubles(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1), "mirzakhani")
        assert V.convention == "mirzakhani"
        assert V.coefficient((1,)) == Fraction(1, 24)
        assert V.coefficient((0,)) == pi_power("1/6", 2)

    def test_mirzakhani_leaves_others(self, engine):
        w = engine.compute_correlator(0, 4)
        assert volume_from_correlator(w, "mirzakhani").terms == volume_from_correlator(w).terms

    def test_v04(self, engine):
        V = volume_from_correlator(engine.compute_correlator(0, 4))
        assert V.coefficient((0, 0, 0, 0)) == pi_power(2, 2)
        for degrees in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]:
            assert V.coefficient(degrees) == Fraction(1, 2)
        assert V.total_degree() == 1

    def test_v12(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 2))
        assert V.coefficient((0, 0)) == pi_power("1/4", 4)
        assert V.coefficient((1, 0)) == pi_power("1/12", 2)
        assert V.coefficient((2, 0)) == Fraction(1, 192)
        assert V.coefficient((1, 1)) == Fraction(1, 96)

    def test_v21(self, engine):
        V = volume_from_correlator(engine.compute_correlator(2, 1))
        assert V.coefficient((0,)) == pi_power("29/192", 8)
        assert V.coefficient((4,)) == Fraction(1, 442368)

    def test_symmetric(self, engine):
        assert volume_from_correlator(engine.compute_correlator(1, 3)).is_symmetric()

    def test_unknown_convention(self, engine):
        with pytest.raises(InvalidArgumentError, match="convention"):
            volume_from_correlator(engine.compute_correlator(1, 1), "weil")


class TestEvaluate:
    def test_v11_at_zero(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1))
        assert evaluate_volume(V, [0.0]) == pytest.approx(math.pi ** 2 / 12)

    def test_v11_at_two(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1))
        assert evaluate_volume(V, [2.0]) == pytest.approx(4 / 48 + math.pi ** 2 / 12)

    def test_wrong_arity(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1))
        with pytest.raises(InvalidArgumentError, match="lengths"):
            evaluate_volume(V, [1.0, 2.0])

    def test_negative_length(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1))
        with pytest.raises(InvalidArgumentError, match="non-negative"):
            evaluate_volume(V, [-1.0])


class TestClosedForms:
    def test_disc_at_one(self):
        assert float(disc_partition(1.0)) == pytest.approx(math.exp(math.pi ** 2) / (4 * math.sqrt(math.pi)))
        assert float(disc_partition(1.0)) == pytest.approx(2726.9, rel=1e-4)

    def test_disc_entropy_weight(self):
        assert float(disc_partition(2.0, S=1.5)) == pytest.approx(math.exp(1.5) * float(disc_partition(2.0)))

    def test_trumpet(self):
        assert float(trumpet(0.0, 1.0)) == pytest.approx(1 / (2 * math.sqrt(math.pi)))
        with pytest.raises(InvalidArgumentError):
            trumpet(-1.0, 1.0)

    def test_double_trumpet(self):
        assert float(double_trumpet(1.0, 1.0)) == pytest.approx(1 / (4 * math.pi))
        assert float(double_trumpet(1.0, 3.0)) == pytest.approx(math.sqrt(3) / (8 * math.pi))

    def test_double_trumpet_is_glued_trumpets(self):
        value = mpmath.quad(lambda b: b * trumpet(b, 1.0) * trumpet(b, 2.0), [0, mpmath.inf])
        assert float(value) == pytest.approx(float(double_trumpet(1.0, 2.0)), rel=1e-10)

    @pytest.mark.parametrize("beta", [0.0, -1.0])
    def test_nonpositive_beta(self, beta):
        with pytest.raises(InvalidArgumentError, match="beta"):
            disc_partition(beta)


class TestGenusPartition:
    def test_genus_one(self, engine):
        beta = 1.7
        expected = math.sqrt(beta) * (beta + math.pi ** 2) / (12 * math.sqrt(math.pi))
        assert float(genus_partition_via_gluing(1, beta, engine=engine)) == pytest.approx(expected)

    def test_genus_weight(self, engine):
        plain = genus_partition_via_gluing(2, 1.0, engine=engine)
        weighted = genus_partition_via_gluing(2, 1.0, S=2.0, engine=engine)
        assert float(weighted) == pytest.approx(math.exp(-6.0) * float(plain))

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_two_pipelines_agree(self, engine, g):
        a = genus_partition_via_gluing(g, 0.8, engine=engine)
        b = genus_partition_via_correlator(g, 0.8, engine=engine)
        assert float(a) == pytest.approx(float(b), rel=1e-12)

    @pytest.mark.parametrize("g", [1, 2])
    def test_convention_constant_is_one(self, engine, g):
        assert convention_constant(g, engine) == 1

    def test_closed_forms_match_exactly(self, engine):
        w = engine.compute_correlator(2, 1)
        assert correlator_closed_form(w).as_map() == gluing_closed_form(volume_from_correlator(w)).as_map()

    def test_genus_zero_rejected(self):
        with pytest.raises(InvalidArgumentError, match="disc"):
            genus_partition_via_gluing(0, 1.0)

    def test_gluing_needs_one_boundary(self, engine):
        with pytest.raises(InvalidArgumentError, match="n = 1"):
            gluing_closed_form(volume_from_correlator(engine.compute_correlator(0, 4)))


class TestMultiBoundary:
    def test_one_boundary_matches_gluing(self, engine):
        V = volume_from_correlator(engine.compute_correlator(1, 1))
        assert float(multi_boundary_partition(V, [1.3], S=0.5)) == pytest.approx(
            float(genus_partition_via_gluing(1, 1.3, S=0.5, engine=engine))
        )

    def test_four_trumpets_on_sphere(self, engine):
        V = volume_from_correlator(engine.compute_correlator(0, 4))
        betas = [1.0, 1.0, 1.0, 1.0]
        # constant term 2 pi^2 and four linear terms of 1/2, each trumpet moment at beta = 1
        expected = 2 * math.pi ** 2 / math.pi ** 2 + 4 * 0.5 * 4 / math.pi ** 2
        assert float(multi_boundary_partition(V, betas)) == pytest.approx(expected)

    def test_arity(self, engine):
        V = volume_from_correlator(engine.compute_correlator(0, 4))
        with pytest.raises(InvalidArgumentError, match="temperatures"):
            multi_boundary_partition(V, [1.0])


class TestExpansion:
    def test_contributions(self, engine):
        expansion = genus_expansion(2.0, 4.0, 2, engine)
        assert [name for name, _ in expansion.contributions] == ["disc", "g=1", "g=2"]
        assert float(expansion.total) == pytest.approx(sum(float(v) for _, v in expansion.contributions))

    def test_suppressed_by_entropy(self, engine):
        expansion = genus_expansion(2.0, 6.0, 2, engine)
        values = [float(v) for _, v in expansion.contributions]
        assert values[0] > values[1] > values[2]


class TestSuper:
    def test_density(self):
        assert float(super_disc_density(1.0)) == pytest.approx(math.sqrt(2) * math.cosh(2 * math.pi) / math.pi)
        with pytest.raises(InvalidArgumentError):
            super_disc_density(0.0)

    def test_partition(self):
        expected = math.sqrt(2) * math.exp(math.pi ** 2 / 2) / math.sqrt(2 * math.pi)
        assert float(super_disc_partition(2.0)) == pytest.approx(expected)

    def test_laplace_both_tolerances(self):
        loose, tight = super_laplace_check(1.0)
        assert loose.relative_error < 1e-6
        assert tight.relative_error < 1e-10


class TestQuadrature:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 4.0])
    def test_disc_laplace(self, beta):
        assert disc_laplace_check(beta, tol=1e-10).relative_error < 1e-6

    def test_exponential(self):
        value = laplace_transform(lambda E: mpmath.exp(-E), 1.0, 1e-12)
        assert float(value) == pytest.approx(0.5, rel=1e-10)


@pytest.fixture(scope="module")
def super_engine():
    return RecursionEngine(curve_jt_super())


class TestSuperGenus:
    @pytest.mark.parametrize("g", [1, 2])
    def test_convention_constant_is_one(self, super_engine, g):
        assert convention_constant(g, super_engine) == 1

    def test_genus_one_carries_density_sign(self, super_engine):
        beta, S = 1.5, 0.3
        # omega_11 = sqrt(2)/32 on a curve with density_sign = -1
        expected = -math.sqrt(2) / 32 * math.sqrt(beta / math.pi) * math.exp(-S)
        assert float(genus_partition_via_gluing(1, beta, S, super_engine)) == pytest.approx(expected)

    @pytest.mark.parametrize("g", [1, 2])
    def test_two_pipelines_agree(self, super_engine, g):
        a = genus_partition_via_gluing(g, 0.9, engine=super_engine)
        b = genus_partition_via_correlator(g, 0.9, engine=super_engine)
        assert float(a) == pytest.approx(float(b), rel=1e-12)
        assert float(a) != 0.0

    def test_closed_forms_match_exactly(self, super_engine):
        glued = genus_closed_form(2, super_engine, "gluing").as_map()
        assert glued == genus_closed_form(2, super_engine, "correlator").as_map()
        assert all(not has_exp for _, has_exp in glued)

    def test_expansion_starts_with_super_disc(self, super_engine):
        expansion = genus_expansion(2.0, 3.0, 2, super_engine)
        assert [name for name, _ in expansion.contributions] == ["disc", "g=1", "g=2"]
        assert float(expansion.contributions[0][1]) == pytest.approx(float(super_disc_partition(2.0, 3.0)))
        assert float(expansion.contributions[1][1]) < 0

    def test_unknown_pipeline(self, super_engine):
        with pytest.raises(InvalidArgumentError, match="pipeline"):
            genus_closed_form(1, super_engine, "direct")
