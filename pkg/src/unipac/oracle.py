"""Sample distributions, target concepts and the labeled-example oracle.

Distributions have finite support and exact rational weights.  Draws use
splitmix64 plus rejection sampling on an integer range, so a seed fixes the
sample sequence bit-for-bit on every platform.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Protocol

from .halting import DEFAULT_EFFORT, decide_halting
from .vm import Program

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, q: int) -> int:
        """Uniform integer in [0, q) by rejection on the low ceil(log2 q) bits."""
        bits = (q - 1).bit_length()
        words = max(1, -(-bits // 64))
        mask = (1 << bits) - 1
        while True:
            r = 0
            for w in range(words):
                r |= self.next_u64() << (64 * w)
            r &= mask
            if r < q:
                return r


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: one splitmix64 output from state ``seed XOR index``."""
    return SplitMix64((seed ^ index) & MASK64).next_u64()


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def canonical_key(s: str) -> tuple[int, str]:
    return (len(s), s)


def _check_bitstring(s: str) -> None:
    if any(ch not in "01" for ch in s):
        raise ValueError(f"not a binary string: {s!r}")


def strings_of_length(length: int) -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=length)]


def strings_up_to(max_length: int) -> list[str]:
    return [s for n in range(max_length + 1) for s in strings_of_length(n)]


@dataclass(frozen=True)
class FiniteDistribution:
    support: tuple[str, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.support) != len(self.weights) or not self.support:
            raise ValueError("support and weights must be nonempty and aligned")
        for s in self.support:
            _check_bitstring(s)
        if len(set(self.support)) != len(self.support):
            raise ValueError("support points must be distinct")
        if list(self.support) != sorted(self.support, key=canonical_key):
            raise ValueError("support must be in canonical length-lex order")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if sum(self.weights) != 1:
            raise ValueError(f"weights sum to {sum(self.weights)}, not 1")

    @classmethod
    def from_weights(cls, weights: Mapping[str, Fraction]) -> "FiniteDistribution":
        points = sorted(weights, key=canonical_key)
        return cls(tuple(points), tuple(Fraction(weights[p]) for p in points))

    @classmethod
    def uniform(cls, points: Iterable[str]) -> "FiniteDistribution":
        points = list(points)
        w = Fraction(1, len(points))
        return cls.from_weights({p: w for p in points})

    @classmethod
    def uniform_maxlen(cls, max_length: int) -> "FiniteDistribution":
        return cls.uniform(strings_up_to(max_length))

    @classmethod
    def uniform_exact_len(cls, length: int) -> "FiniteDistribution":
        return cls.uniform(strings_of_length(length))

    @property
    def denominator(self) -> int:
        return lcm(*(w.denominator for w in self.weights))

    def cumulative(self) -> tuple[int, list[int]]:
        q = self.denominator
        cum, total = [], 0
        for w in self.weights:
            total += w.numerator * (q // w.denominator)
            cum.append(total)
        return q, cum

    def weight(self, x: str) -> Fraction:
        try:
            return self.weights[self.support.index(x)]
        except ValueError:
            return Fraction(0)

    def to_text(self) -> str:
        return "".join(f"{_format_point(s)} {w.numerator}/{w.denominator}\n" for s, w in zip(self.support, self.weights))


def parse_distribution(text: str) -> FiniteDistribution:
    """``<bitstring> <num>/<den>`` per line; ``#`` comments and blank lines ignored.

    The empty string is written as ``""`` or ``-``.
    """
    weights: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<bitstring> <weight>'")
        point = _parse_point(parts[0])
        if point in weights:
            raise ValueError(f"line {lineno}: duplicate point {point!r}")
        weights[point] = Fraction(parts[1])
    return FiniteDistribution.from_weights(weights)


def _parse_point(token: str) -> str:
    point = "" if token in ('""', "-") else token
    _check_bitstring(point)
    return point


def _format_point(point: str) -> str:
    return point if point else '""'


def load_distribution(path: str | Path) -> FiniteDistribution:
    return parse_distribution(Path(path).read_text())


# ---------------------------------------------------------------------------
# Concepts
# ---------------------------------------------------------------------------


class ConceptDivergence(RuntimeError):
    """A program-backed target concept failed to halt on a queried point."""


class Concept(Protocol):
    def label(self, x: str) -> int: ...


@dataclass(frozen=True)
class TableConcept:
    table: Mapping[str, int]
    default: int = 0

    def __post_init__(self):
        for x, bit in self.table.items():
            _check_bitstring(x)
            if bit not in (0, 1):
                raise ValueError(f"label for {x!r} must be 0 or 1")
        if self.default not in (0, 1):
            raise ValueError("default label must be 0 or 1")

    def label(self, x: str) -> int:
        return self.table.get(x, self.default)

    def to_text(self) -> str:
        rows = [f"{_format_point(x)} {self.table[x]}\n" for x in sorted(self.table, key=canonical_key)]
        return "".join(rows) + f"default {self.default}\n"


def parse_concept_table(text: str) -> TableConcept:
    table: dict[str, int] = {}
    default = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise ValueError(f"line {lineno}: expected '<bitstring> <bit>'")
        if parts[0] == "default":
            if default is not None:
                raise ValueError(f"line {lineno}: second default line")
            default = int(parts[1])
            continue
        point = _parse_point(parts[0])
        if point in table:
            raise ValueError(f"line {lineno}: duplicate point {point!r}")
        table[point] = int(parts[1])
    if default is None:
        raise ValueError("concept table needs a 'default <bit>' line")
    return TableConcept(table, default)


def load_concept_table(path: str | Path) -> TableConcept:
    return parse_concept_table(Path(path).read_text())


@dataclass
class ProgramConcept:
    """A BCL program used as a target; must halt wherever it is queried."""

    program: Program
    budget: int = DEFAULT_EFFORT
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def label(self, x: str) -> int:
        bit = self._cache.get(x)
        if bit is None:
            decision = decide_halting(self.program, x, self.budget)
            if not decision.halts:
                what = "diverges" if decision.diverges else f"did not halt within {self.budget} steps"
                raise ConceptDivergence(f"concept {self.program.hex or '<empty>'} {what} on {x!r}")
            bit = self._cache[x] = decision.bit
        return bit


def tabulate(concept: Concept, points: Iterable[str], default: int = 0) -> TableConcept:
    return TableConcept({x: concept.label(x) for x in points}, default)


# ---------------------------------------------------------------------------
# Sample streams and the oracle
# ---------------------------------------------------------------------------


class LabeledSample(NamedTuple):
    point: str
    label: int


class SampleStream:
    def __init__(self, seed: int, distribution: FiniteDistribution):
        self.seed = seed & MASK64
        self.distribution = distribution
        self.rng = SplitMix64(self.seed)
        self._q, self._cum = distribution.cumulative()

    def draw(self) -> str:
        r = self.rng.below(self._q)
        for point, bound in zip(self.distribution.support, self._cum):
            if r < bound:
                return point
        raise AssertionError("cumulative weights do not cover [0, Q)")


class Oracle:
    """Labeled-example oracle: iid draws labeled by the target concept."""

    def __init__(self, stream: SampleStream, concept: Concept):
        self.stream = stream
        self.concept = concept
        self.calls = 0

    def next(self) -> LabeledSample:
        self.calls += 1
        return oracle_next(self.stream, self.concept)


def oracle_next(stream: SampleStream, concept: Concept) -> LabeledSample:
    x = stream.draw()
    return LabeledSample(x, concept.label(x))


def true_error_bounds(
    h: Program, concept: Concept, dist: FiniteDistribution, budget: int = DEFAULT_EFFORT
) -> tuple[Fraction, Fraction]:
    """Interval containing Pr_{x~D}[h(x) != c(x)].

    A non-halting evaluation disagrees with every label; an undecided one
    counts toward the upper end only.
    """
    lower = upper = Fraction(0)
    for x, w in zip(dist.support, dist.weights):
        decision = decide_halting(h, x, budget)
        if decision.halts:
            if decision.bit != concept.label(x):
                lower += w
                upper += w
        elif decision.diverges:
            lower += w
            upper += w
        else:
            upper += w
    return lower, upper
