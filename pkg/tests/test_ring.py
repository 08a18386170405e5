"""Tests for wpvol.ring: exact scalars over Q[pi^2, pi^-2] and sqrt(2)."""

import random
from fractions import Fraction

import mpmath
import pytest

from wpvol.errors import InvalidArgumentError, NotInvertibleError
from wpvol.ring import PI2, SQRT2, ExactScalar, evaluate_numeric, scalar_arith


class TestConstruction:
    def test_zero_terms_dropped(self):
        x = ExactScalar.of([((2, False), Fraction(1, 3)), ((2, False), Fraction(-1, 3))])
        assert x.is_zero()
        assert x == 0

    def test_odd_pi_power_rejected(self):
        with pytest.raises(InvalidArgumentError, match="odd pi exponent"):
            ExactScalar.monomial(1, 3)

    def test_canonical_order_independent(self):
        a = ExactScalar.rational("1/8") + PI2 * Fraction(1, 12)
        b = PI2 * Fraction(1, 12) + Fraction(1, 8)
        assert a == b
        assert hash(a) == hash(b)

    def test_as_rational(self):
        assert ExactScalar.rational("3/4").as_rational() == Fraction(3, 4)
        with pytest.raises(ValueError):
            PI2.as_rational()


class TestArithmetic:
    def test_sqrt2_squared(self):
        assert SQRT2 * SQRT2 == 2

    def test_pi_powers_add(self):
        assert PI2 * PI2 == ExactScalar.monomial(1, 4)
        assert PI2 * ExactScalar.monomial(1, -2) == 1

    def test_parts(self):
        x = ExactScalar.rational(2) + SQRT2 * PI2 * 3
        assert x.part_one() == {0: Fraction(2)}
        assert x.part_sqrt2() == {2: Fraction(3)}

    def test_inverse_of_unit(self):
        x = ExactScalar.monomial(3, 2)
        assert x * x.inverse() == 1
        y = ExactScalar.monomial(Fraction(1, 5), -4, sqrt2=True)
        assert y * y.inverse() == 1

    def test_inverse_of_sum_fails(self):
        with pytest.raises(NotInvertibleError):
            (PI2 + 1).inverse()

    def test_division(self):
        assert PI2 / 4 == ExactScalar.monomial(Fraction(1, 4), 2)
        assert ExactScalar.rational(1) / SQRT2 == SQRT2 * Fraction(1, 2)
        with pytest.raises(ZeroDivisionError):
            PI2 / 0

    def test_scalar_arith(self):
        a, b = ExactScalar.rational(2), PI2
        assert scalar_arith(a, b, "add") == a + b
        assert scalar_arith(a, b, "sub") == a - b
        assert scalar_arith(a, b, "mul") == PI2 * 2
        with pytest.raises(InvalidArgumentError):
            scalar_arith(a, b, "pow")


class TestRendering:
    def test_volume_constant(self):
        x = PI2 * Fraction(1, 12) + Fraction(1, 8)
        assert x.pretty() == "π²/12 + 1/8"

    def test_negative_and_sqrt2(self):
        x = SQRT2 * PI2 * Fraction(-2, 3)
        assert x.pretty() == "-2√2·π²/3"

    def test_zero(self):
        assert ExactScalar().pretty() == "0"


class TestSerialization:
    def test_json_roundtrip(self):
        x = PI2 * Fraction(7, 12) + SQRT2 * Fraction(-1, 32) + ExactScalar.monomial(5, -2)
        assert ExactScalar.from_json(x.to_json()) == x

    def test_json_schema(self):
        data = ExactScalar.monomial(Fraction(1, 12), 2).to_json()
        assert data == {"terms": [{"pi_exp": 2, "num": "1", "den": "12", "sqrt2": False}]}

    def test_malformed(self):
        with pytest.raises(InvalidArgumentError, match="malformed"):
            ExactScalar.from_json({"terms": [{"pi_exp": 2}]})


class TestEvaluateNumeric:
    def test_value(self):
        x = PI2 * Fraction(1, 12) + SQRT2
        with mpmath.workdps(40):
            expected = mpmath.pi ** 2 / 12 + mpmath.sqrt(2)
            assert abs(evaluate_numeric(x, 30) - expected) < mpmath.mpf(10) ** -29

    def test_low_precision_rejected(self):
        with pytest.raises(InvalidArgumentError):
            evaluate_numeric(PI2, 10)


def random_scalar(rng: random.Random, terms: int = 3) -> ExactScalar:
    items = []
    for _ in range(rng.randint(1, terms)):
        basis = (2 * rng.randint(-2, 2), rng.random() < 0.5)
        items.append((basis, Fraction(rng.randint(-9, 9), rng.randint(1, 9))))
    return ExactScalar.of(items)


def random_unit(rng: random.Random) -> ExactScalar:
    num = rng.choice([n for n in range(-9, 10) if n])
    return ExactScalar.monomial(Fraction(num, rng.randint(1, 9)), 2 * rng.randint(-2, 2), rng.random() < 0.5)


SEEDS = range(12)


class TestRingLaws:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_associative(self, seed):
        rng = random.Random(seed)
        a, b, c = (random_scalar(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_commutative_and_distributive(self, seed):
        rng = random.Random(seed)
        a, b, c = (random_scalar(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    @pytest.mark.parametrize("seed", SEEDS)
    def test_inverses(self, seed):
        rng = random.Random(seed)
        a, u = random_scalar(rng), random_unit(rng)
        assert (a + (-a)).is_zero()
        assert a - a == 0
        assert u * u.inverse() == 1
        assert (a * u) / u == a

    @pytest.mark.parametrize("seed", SEEDS)
    def test_evaluation_is_a_homomorphism(self, seed):
        rng = random.Random(seed)
        a, b = random_scalar(rng), random_scalar(rng)
        with mpmath.workdps(40):
            x, y = evaluate_numeric(a, 30), evaluate_numeric(b, 30)
            scale = max(abs(x), abs(y), mpmath.mpf(1)) ** 2
            tol = mpmath.mpf(10) ** -25 * scale
            assert abs(evaluate_numeric(a + b, 30) - (x + y)) < tol
            assert abs(evaluate_numeric(a * b, 30) - x * y) < tol
            assert abs(evaluate_numeric(-a, 30) + x) < tol
