"""Data models for correlators, volume polynomials and partition functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import mpmath

from wpvol import storage
from wpvol.errors import InvalidArgumentError
from wpvol.ring import ExactScalar, evaluate_numeric

MultiIndex = tuple[int, ...]


def distinct_permutations(seq: MultiIndex) -> Iterator[MultiIndex]:
    """Distinct orderings of a multiset, in lexicographic order."""
    items = sorted(seq)
    n = len(items)
    while True:
        yield tuple(items)
        i = n - 2
        while i >= 0 and items[i] >= items[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while items[j] <= items[i]:
            j -= 1
        items[i], items[j] = items[j], items[i]
        items[i + 1:] = reversed(items[i + 1:])


def is_stable(g: int, n: int) -> bool:
    return g >= 0 and n >= 1 and 2 * g - 2 + n > 0


@dataclass(frozen=True)
class CorrelatorKey:
    g: int
    n: int
    curve: str

    def __post_init__(self) -> None:
        if not is_stable(self.g, self.n):
            raise InvalidArgumentError(
                f"(g, n) = ({self.g}, {self.n}) is unstable: need 2g - 2 + n > 0 and n >= 1"
            )

    @property
    def euler(self) -> int:
        """2g - 2 + n, the quantity the recursion lowers by one."""
        return 2 * self.g - 2 + self.n


@dataclass
class Correlator:
    """omega_{g,n} = sum c_k prod dz_i / z_i^(2 k_i + 2), keys stored sorted."""

    key: CorrelatorKey
    terms: dict[MultiIndex, ExactScalar] = field(default_factory=dict)
    _expanded: dict[MultiIndex, ExactScalar] | None = field(default=None, repr=False, compare=False)

    def coefficient(self, ks: MultiIndex) -> ExactScalar:
        return self.terms.get(tuple(sorted(ks)), ExactScalar())

    def expanded(self) -> dict[MultiIndex, ExactScalar]:
        """Coefficients for every ordering of the legs."""
        if self._expanded is None:
            full: dict[MultiIndex, ExactScalar] = {}
            for ks, c in self.terms.items():
                for perm in distinct_permutations(ks):
                    full[perm] = c
            self._expanded = full
        return self._expanded

    def max_total_degree(self) -> int:
        return max((sum(ks) for ks in self.terms), default=-1)

    def top_degree_part(self) -> dict[MultiIndex, ExactScalar]:
        top = self.max_total_degree()
        return {ks: c for ks, c in self.terms.items() if sum(ks) == top}

    def to_json(self) -> dict:
        return {
            "g": self.key.g,
            "n": self.key.n,
            "terms": [[list(ks), c.to_json()] for ks, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: dict, curve: str) -> Correlator:
        key = CorrelatorKey(int(data["g"]), int(data["n"]), curve)
        terms = {}
        for ks, c in data["terms"]:
            ks = tuple(int(k) for k in ks)
            if len(ks) != key.n or list(ks) != sorted(ks):
                raise InvalidArgumentError(f"bad multi-index {ks} for {key}")
            terms[ks] = ExactScalar.from_json(c)
        return cls(key, terms)


@dataclass
class VolumePolynomial:
    """V_{g,n}(b) = sum coeff * prod b_i^(2 d_i), every ordering of degrees stored."""

    g: int
    n: int
    terms: dict[MultiIndex, ExactScalar] = field(default_factory=dict)
    convention: str = "jt"

    def coefficient(self, degrees: MultiIndex) -> ExactScalar:
        return self.terms.get(tuple(degrees), ExactScalar())

    def total_degree(self) -> int:
        return max((sum(d) for d in self.terms), default=-1)

    def is_symmetric(self) -> bool:
        return all(self.coefficient(p) == c for d, c in self.terms.items() for p in distinct_permutations(d))

    def scaled(self, factor: Fraction | int) -> VolumePolynomial:
        return VolumePolynomial(self.g, self.n, {d: c * factor for d, c in self.terms.items()}, self.convention)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        names = ["b"] if self.n == 1 else [f"b{i + 1}" for i in range(self.n)]
        parts = []
        for degrees, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0])):
            mono = "·".join(
                f"{names[i]}^{2 * d}" for i, d in enumerate(degrees) if d
            )
            text = c.pretty()
            if len(c.terms) > 1 and mono:
                text = f"({text})"
            parts.append(f"{text}·{mono}" if mono else text)
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "convention": self.convention,
            "terms": [
                {"degrees": list(d), "coeff": c.to_json()} for d, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> VolumePolynomial:
        terms = {
            tuple(int(x) for x in t["degrees"]): ExactScalar.from_json(t["coeff"]) for t in data["terms"]
        }
        return cls(int(data["g"]), int(data["n"]), terms, data.get("convention", "jt"))

    def save(self, path: Path) -> Path:
        return storage.write_json(path, self.to_json())

    @classmethod
    def load(cls, path: Path) -> VolumePolynomial:
        data = storage.load_json(path)
        if data is None:
            raise InvalidArgumentError(f"no readable volume file at {path}")
        return cls.from_json(data)


@dataclass(frozen=True)
class PartitionTerm:
    beta_power: Fraction  # half-integer
    coeff: ExactScalar
    has_exp_pi2_over_beta: bool = False


@dataclass
class PartitionClosedForm:
    """Z(beta) = e^(S chi) * pi^(-1/2) * sum coeff * beta^power * [exp(pi^2/beta)].

    The common factor pi^(-1/2) lies outside the exact ring and is applied on
    evaluation only.
    """

    chi: int
    terms: list[PartitionTerm] = field(default_factory=list)

    def evaluate(self, beta: float, S: float = 0.0, precision: int = 30) -> mpmath.mpf:
        if not beta > 0:
            raise InvalidArgumentError(f"beta must be positive, got {beta}")
        with mpmath.workdps(precision + 10):
            b = mpmath.mpf(beta)
            total = mpmath.mpf(0)
            for t in self.terms:
                value = evaluate_numeric(t.coeff, precision + 10) * b ** (
                    mpmath.mpf(t.beta_power.numerator) / t.beta_power.denominator
                )
                if t.has_exp_pi2_over_beta:
                    value *= mpmath.exp(mpmath.pi ** 2 / b)
                total += value
            return mpmath.exp(S * self.chi) * total / mpmath.sqrt(mpmath.pi)

    def as_map(self) -> dict[tuple[Fraction, bool], ExactScalar]:
        acc: dict[tuple[Fraction, bool], ExactScalar] = {}
        for t in self.terms:
            k = (t.beta_power, t.has_exp_pi2_over_beta)
            acc[k] = acc.get(k, ExactScalar()) + t.coeff
        return {k: v for k, v in acc.items() if v}

    def pretty(self) -> str:
        parts = []
        for (p, has_exp), c in sorted(self.as_map().items(), key=lambda t: -t[0][0]):
            text = c.pretty()
            if len(c.terms) > 1:
                text = f"({text})"
            parts.append(f"{text}·β^{p}" + ("·exp(π²/β)" if has_exp else ""))
        weight = f"e^({self.chi}S)" if self.chi != 1 else "e^S"
        return f"{weight}·π^(-1/2)·[" + " + ".join(parts) + "]"

    def to_json(self) -> dict:
        return {
            "chi": self.chi,
            "prefactor": "pi^(-1/2)",
            "terms": [
                {
                    "beta_power": str(t.beta_power),
                    "coeff": t.coeff.to_json(),
                    "has_exp_pi2_over_beta": t.has_exp_pi2_over_beta,
                }
                for t in self.terms
            ],
        }
