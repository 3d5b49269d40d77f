"""Adversarial instances that force a learner to over-sample.

For ``d`` points under the uniform distribution, the probability that a
deterministic learner asks for more than ``m`` samples is computed exactly by
walking its query tree, one equiprobable branch per point.  The worst
labeling over all ``2**d`` is the adversarial concept; if even that labeling
leaves the probability below the lower bound every PAC learner must meet,
the learner is not PAC on the finite class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import AccuracyParams, adversary_rho_bound
from .learner import ResumableLearner, drive
from .oracle import FiniteDistribution, LabeledSample, Oracle, SampleStream, TableConcept, derive_seed

DEFAULT_WORK_CEILING = 1_000_000

Labeling = tuple[int, ...]


def build_point_set(d: int) -> list[str]:
    """Fixed-width big-endian encodings of 0..d-1."""
    if d < 1:
        raise ValueError("need at least one point")
    width = max(1, (d - 1).bit_length())
    return [format(j, f"0{width}b") for j in range(d)]


def labeling_str(labeling: Labeling) -> str:
    return "".join(map(str, labeling))


def _check(d: int, m: int) -> None:
    if not 0 <= m < d:
        raise ValueError(f"need 0 <= m < d, got m={m}, d={d}")


def exact_rho(
    learner: ResumableLearner,
    acc: AccuracyParams,
    labeling: Labeling,
    d: int,
    m: int,
    work_ceiling: int | None = DEFAULT_WORK_CEILING,
    trust_floor: bool = True,
) -> Fraction:
    """Exact Pr[learner queries more than m samples] under uniform draws.

    Each node of the query tree is reached by replaying a fresh session on
    the response prefix.  A branch stops when the session finishes (0) or
    asks for sample m + 1 (its probability d^-m).  With ``trust_floor`` a
    branch also stops, counted as exceeding, once the session announces it
    will not finish before query m + 1.
    """
    _check(d, m)
    if len(labeling) != d:
        raise ValueError("labeling length must equal d")
    points = build_point_set(d)
    responses = [LabeledSample(points[p], labeling[p]) for p in range(d)]

    def explore(prefix: tuple[int, ...]) -> Fraction:
        session = learner.session(acc, work_ceiling)
        try:
            query = next(session)
            for p in prefix:
                query = session.send(responses[p])
        except StopIteration:
            return Fraction(0)
        finally:
            session.close()
        q = len(prefix)
        if query.position > m or (trust_floor and query.floor > m):
            return Fraction(1, d**q)
        return sum((explore(prefix + (p,)) for p in range(d)), Fraction(0))

    return explore(())


@dataclass
class WorstCase:
    labeling: Labeling
    rho: Fraction
    table: dict[str, Fraction] = field(default_factory=dict)


def find_worst_labeling(learner, acc, d, m, **options) -> WorstCase:
    """argmax over all 2^d labelings; ties go to the lexicographically smallest."""
    _check(d, m)
    best = None
    table = {}
    for labeling in itertools.product((0, 1), repeat=d):
        rho = exact_rho(learner, acc, labeling, d, m, **options)
        table[labeling_str(labeling)] = rho
        if best is None or rho > best.rho:
            best = WorstCase(labeling, rho)
    best.table = table
    return best


def instance_for(labeling: Labeling) -> tuple[TableConcept, FiniteDistribution]:
    points = build_point_set(len(labeling))
    return TableConcept(dict(zip(points, labeling)), 0), FiniteDistribution.uniform(points)


def build_adversarial_instance(learner, acc, d, m, **options) -> tuple[TableConcept, FiniteDistribution]:
    return instance_for(find_worst_labeling(learner, acc, d, m, **options).labeling)


def empirical_validate(learner, acc, concept, dist, m, trials, seed) -> Fraction:
    """Fraction of seeded end-to-end runs that query more than m samples."""
    if trials < 1:
        raise ValueError("need at least one trial")
    over = 0
    for t in range(trials):
        oracle = Oracle(SampleStream(derive_seed(seed, t), dist), concept)
        report = drive(learner, acc, oracle)
        over += report.samples_queried > m
    return Fraction(over, trials)


NOT_PAC = "NOT-PAC"
CONSISTENT = "CONSISTENT"
VACUOUS = "VACUOUS"


@dataclass
class PacVerdict:
    verdict: str
    rho_star: Fraction
    bound: float
    witness: Labeling


def pac_violation_check(learner, acc, d, m, worst: WorstCase | None = None, **options) -> PacVerdict:
    bound = adversary_rho_bound(d, m, acc)
    if bound <= 0:
        raise ValueError(f"bound {bound:.6g} is vacuous for d={d}, m={m}")
    if worst is None:
        worst = find_worst_labeling(learner, acc, d, m, **options)
    verdict = NOT_PAC if worst.rho < bound else CONSISTENT
    return PacVerdict(verdict, worst.rho, bound, worst.labeling)


@dataclass
class AdversaryReport:
    d: int
    m: int
    acc: AccuracyParams
    best_labeling: Labeling
    rho_exact: Fraction
    rho_bound: float
    rho_empirical: Fraction
    trials: int
    seed: int
    verdict: str
    rho_table: dict[str, Fraction] | None = None

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "m": self.m,
            "delta": self.acc.delta,
            "epsilon": self.acc.epsilon,
            "best_labeling": labeling_str(self.best_labeling),
            "rho_exact": f"{self.rho_exact.numerator}/{self.rho_exact.denominator}",
            "rho_bound": self.rho_bound,
            "rho_empirical": float(self.rho_empirical),
            "trials": self.trials,
            "seed": self.seed,
            "verdict": self.verdict,
        }
        if self.rho_table is not None:
            out["rho_table"] = {k: f"{v.numerator}/{v.denominator}" for k, v in self.rho_table.items()}
        return out


def run_adversary(learner, acc, d, m, trials, seed, include_table=False, **options) -> AdversaryReport:
    """Worst labeling, exact and empirical exceedance, and the PAC verdict."""
    worst = find_worst_labeling(learner, acc, d, m, **options)
    concept, dist = instance_for(worst.labeling)
    empirical = empirical_validate(learner, acc, concept, dist, m, trials, seed)
    bound = adversary_rho_bound(d, m, acc)
    verdict = pac_violation_check(learner, acc, d, m, worst=worst).verdict if bound > 0 else VACUOUS
    return AdversaryReport(
        d, m, acc, worst.labeling, worst.rho, bound, empirical, trials, seed, verdict,
        rho_table=worst.table if include_table else None,
    )
