from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from unipac.oracle import (
    ConceptDivergence,
    FiniteDistribution,
    LabeledSample,
    Oracle,
    ProgramConcept,
    SampleStream,
    SplitMix64,
    TableConcept,
    derive_seed,
    oracle_next,
    parse_concept_table,
    parse_distribution,
    true_error_bounds,
)
from unipac.vm import Program

# Published splitmix64 outputs for state 0.
SPLITMIX_SEED0 = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def ref_splitmix(seed, n):
    out, s = [], seed
    for _ in range(n):
        s = (s + 0x9E3779B97F4A7C15) % 2**64
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) % 2**64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) % 2**64
        out.append(z ^ (z >> 31))
    return out


def test_splitmix_known_vectors():
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == SPLITMIX_SEED0


@given(st.integers(0, 2**64 - 1))
def test_splitmix_matches_reference(seed):
    rng = SplitMix64(seed)
    assert [rng.next_u64() for _ in range(5)] == ref_splitmix(seed, 5)


def test_uniform_two_points_seed0():
    stream = SampleStream(0, FiniteDistribution.uniform(["0", "1"]))
    # one low bit per output word: 0xaf, 0xf4, 0x4f
    assert [stream.draw() for _ in range(3)] == ["1", "0", "1"]
    assert [w & 1 for w in SPLITMIX_SEED0] == [1, 0, 1]


def test_rejection_sampling_by_hand():
    # Q = 3 -> 2 low bits, reject 3
    dist = FiniteDistribution.uniform(["00", "01", "10"])
    words = ref_splitmix(42, 50)
    expected = []
    for w in words:
        r = w & 3
        if r < 3:
            expected.append(["00", "01", "10"][r])
    stream = SampleStream(42, dist)
    assert [stream.draw() for _ in range(len(expected))] == expected


def test_single_point_support():
    for seed in range(20):
        assert SampleStream(seed, FiniteDistribution.uniform(["01"])).draw() == "01"


def test_uniform_frequencies_within_four_sigma():
    d = 7
    dist = FiniteDistribution.uniform([format(i, "03b") for i in range(d)])
    stream = SampleStream(123, dist)
    n = 100_000
    counts = Counter(stream.draw() for _ in range(n))
    p = 1 / d
    sigma = (n * p * (1 - p)) ** 0.5
    for point in dist.support:
        assert abs(counts[point] - n * p) <= 4 * sigma


def test_nonuniform_weights_exact_mapping():
    dist = FiniteDistribution.from_weights({"1": Fraction(1, 4), "": Fraction(1, 2), "0": Fraction(1, 4)})
    assert dist.support == ("", "0", "1")
    assert dist.cumulative() == (4, [2, 3, 4])


def test_reproducibility():
    dist = FiniteDistribution.uniform_maxlen(4)
    a, b = SampleStream(99, dist), SampleStream(99, dist)
    assert [a.draw() for _ in range(10_000)] == [b.draw() for _ in range(10_000)]


def test_derived_seeds():
    assert derive_seed(7, 3) == ref_splitmix(7 ^ 3, 1)[0]
    assert len({derive_seed(5, t) for t in range(1000)}) == 1000


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution(("0", "1"), (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValueError):
        FiniteDistribution(("1", "0"), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ValueError):
        FiniteDistribution(("0", "0"), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ValueError):
        FiniteDistribution(("0", "2"), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ValueError):
        FiniteDistribution(("0", "1"), (Fraction(0), Fraction(1)))


def test_uniform_maxlen_and_exact_len():
    d = FiniteDistribution.uniform_maxlen(4)
    assert len(d.support) == 31
    assert d.support[:4] == ("", "0", "1", "00")
    assert set(d.weights) == {Fraction(1, 31)}
    assert FiniteDistribution.uniform_exact_len(3).support == tuple(format(i, "03b") for i in range(8))


def test_distribution_file_round_trip():
    text = """
    # comment line
    "" 1/4
    01 1/4   # trailing comment
    1 1/2
    """
    dist = parse_distribution(text)
    assert dist.support == ("", "1", "01")
    assert parse_distribution(dist.to_text()) == dist
    with pytest.raises(ValueError):
        parse_distribution("0 1/2\n1 1/3\n")


def test_concept_table_file():
    concept = parse_concept_table("# table\n0 1\n11 0\ndefault 1\n")
    assert concept.label("0") == 1 and concept.label("11") == 0 and concept.label("101") == 1
    assert parse_concept_table(concept.to_text()) == concept
    with pytest.raises(ValueError):
        parse_concept_table("0 1\n")


def test_oracle_examples():
    dist = FiniteDistribution.uniform(["0", "1", "00", "10"])
    stream = SampleStream(1, dist)
    assert all(oracle_next(stream, TableConcept({}, 1)).label == 1 for _ in range(20))
    first_bit = ProgramConcept(Program(bytes([0x40, 0x20])))
    oracle = Oracle(SampleStream(2, dist), first_bit)
    for _ in range(50):
        x, label = oracle.next()
        assert label == int(x[0])
    assert oracle.calls == 50


def test_divergent_concept_is_hard_error():
    oracle = Oracle(SampleStream(0, FiniteDistribution.uniform(["0", "1"])), ProgramConcept(Program(b"\xe0")))
    with pytest.raises(ConceptDivergence):
        oracle.next()


def test_true_error_examples():
    dist = FiniteDistribution.uniform_maxlen(3)
    first_bit = Program(bytes([0x40, 0x20]))
    assert true_error_bounds(first_bit, ProgramConcept(first_bit), dist) == (0, 0)
    assert true_error_bounds(Program(b"\x00"), TableConcept({}, 1), dist) == (1, 1)
    assert true_error_bounds(Program(b"\xe0"), TableConcept({"0": 1}, 0), dist) == (1, 1)
    # constant 0 against the first-bit concept: mass of strings starting with 1
    assert true_error_bounds(Program(b""), ProgramConcept(first_bit), dist) == (Fraction(7, 15), Fraction(7, 15))


def test_true_error_interval_with_undecided_points():
    slow = Program(bytes([0x9F, 0x9F, 0xA4, 0xE2, 0x01]))  # INC 31 x2; count down; HALT 1
    dist = FiniteDistribution.from_weights({"": Fraction(1, 3), "1": Fraction(2, 3)})
    concept = TableConcept({}, 1)
    lo, hi = true_error_bounds(slow, concept, dist, budget=20)
    assert (lo, hi) == (0, 1)
    previous = (lo, hi)
    for budget in (50, 100, 200, 1000):
        lo, hi = true_error_bounds(slow, concept, dist, budget=budget)
        assert previous[0] <= lo <= hi <= previous[1]
        previous = (lo, hi)
    assert previous == (0, 0)


@given(st.dictionaries(st.text(alphabet="01", max_size=3), st.integers(1, 9), min_size=1), st.binary(max_size=4))
def test_true_error_exact_rational_sum(raw_weights, code):
    total = sum(raw_weights.values())
    dist = FiniteDistribution.from_weights({x: Fraction(w, total) for x, w in raw_weights.items()})
    concept = TableConcept({x: len(x) % 2 for x in raw_weights}, 0)
    h = Program(code)
    lo, hi = true_error_bounds(h, concept, dist)
    assert isinstance(lo, Fraction) and 0 <= lo <= hi <= 1
    assert lo == hi  # short programs are always decided
    assert isinstance(LabeledSample("0", 1).label, int)
