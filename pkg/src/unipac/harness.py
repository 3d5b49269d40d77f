"""Monte Carlo checks of the learners' probabilistic guarantees.

Two experiments live here:

* the PAC contract: run the dovetail learner many times per target and count
  runs whose output has true error at least epsilon;
* the truncated union-bound event: over the first ``i_max`` hypotheses, how
  often does some hypothesis with true error >= epsilon agree with the target
  on all of its m(i) samples.

Both return plain dicts that serialize to byte-stable JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .bounds import AccuracyParams, per_hypothesis_risk, sample_bound
from .halting import DEFAULT_EFFORT, Verdict, decide_halting
from .learner import DovetailLearner, Inconclusive, drive
from .oracle import (
    FiniteDistribution,
    Oracle,
    ProgramConcept,
    SampleStream,
    SplitMix64,
    TableConcept,
    derive_seed,
    tabulate,
    true_error_bounds,
)
from .vm import Program, enumerate_program

FIRST_BIT = Program(bytes([0x40, 0x20]))  # READ; OUTA


def three_sigma_threshold(p: float, trials: int) -> float:
    return p + 3 * math.sqrt(p * (1 - p) / trials)


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def dump_report(report: dict, path: str | Path | None = None) -> str:
    text = json.dumps(report, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# Target fixtures
# ---------------------------------------------------------------------------

# Programs of one or two bytes: indices 2..65793 in the enumeration.
_SHORT_FIRST, _SHORT_LAST = 2, 1 + 256 + 65536


def random_table_concept(points, seed: int, effort: int = DEFAULT_EFFORT) -> tuple[TableConcept, Program]:
    """Tabulation of a seeded random short program over ``points``.

    Draws one- and two-byte programs until one halts everywhere on
    ``points``.  A uniformly random table would need a program far beyond
    the reach of the dovetail search; short programs keep it finishable.
    """
    points = list(points)
    rng = SplitMix64(seed)
    while True:
        program = enumerate_program(_SHORT_FIRST + rng.below(_SHORT_LAST - _SHORT_FIRST + 1))
        decisions = [decide_halting(program, x, effort) for x in points]
        if all(d.halts for d in decisions):
            return TableConcept({x: d.bit for x, d in zip(points, decisions)}, 0), program


def pac_targets(dist: FiniteDistribution, seed: int) -> tuple[dict[str, object], Program]:
    """The four contract targets, plus the program behind the random table."""
    table, source = random_table_concept(dist.support, seed)
    targets = {
        "constant-0": TableConcept({}, 0),
        "constant-1": TableConcept({}, 1),
        "first-bit": ProgramConcept(FIRST_BIT),
        "random-table": table,
    }
    return targets, source


# ---------------------------------------------------------------------------
# PAC contract
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PacConfig:
    delta: float = 0.2
    epsilon: float = 0.2
    trials: int = 400
    seed: int = 0
    maxlen: int = 4
    effort: int = DEFAULT_EFFORT

    @property
    def acc(self) -> AccuracyParams:
        return AccuracyParams(self.delta, self.epsilon)


def pac_contract_run(learner, acc, concept, dist, trials, seed, effort=DEFAULT_EFFORT) -> dict:
    """Per-target summary; a run fails when its output's true-error upper bound is >= epsilon."""
    eps = Fraction(acc.epsilon)
    runs, failures = [], 0
    errors: dict[Program, tuple[Fraction, Fraction]] = {}
    for t in range(trials):
        report = drive(learner, acc, Oracle(SampleStream(derive_seed(seed, t), dist), concept))
        h = report.output_program
        if h not in errors:
            errors[h] = true_error_bounds(h, concept, dist, effort)
        lower, upper = errors[h]
        failed = upper >= eps
        failures += failed
        runs.append(
            {
                "trial": t,
                "output_index": report.output_index,
                "samples_queried": report.samples_queried,
                "error_upper": fraction_str(upper),
                "failed": failed,
            }
        )
    threshold = three_sigma_threshold(acc.delta, trials)
    return {
        "trials": trials,
        "failures": failures,
        "failure_fraction": failures / trials,
        "threshold": threshold,
        "passed": failures / trials <= threshold,
        "runs": runs,
    }


def run_pac_contract(config: PacConfig, learner=None) -> dict:
    learner = learner or DovetailLearner(effort=config.effort)
    dist = FiniteDistribution.uniform_maxlen(config.maxlen)
    targets, source = pac_targets(dist, config.seed)
    results = {}
    for name, concept in targets.items():
        results[name] = pac_contract_run(learner, config.acc, concept, dist, config.trials, config.seed, config.effort)
    return {
        "experiment": "pac-contract",
        "config": asdict(config),
        "random_table": targets["random-table"].to_text(),
        "random_table_source_hex": source.hex,
        "targets": results,
        "passed": all(r["passed"] for r in results.values()),
    }


# ---------------------------------------------------------------------------
# Truncated union-bound event
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnionBoundConfig:
    delta: float = 0.15
    epsilon: float = 0.25
    i_max: int = 300
    trials: int = 1000
    seed: int = 0
    maxlen: int = 4
    effort: int = DEFAULT_EFFORT

    @property
    def acc(self) -> AccuracyParams:
        return AccuracyParams(self.delta, self.epsilon)


@dataclass(frozen=True)
class BadHypothesis:
    index: int
    error: Fraction
    disagreements: frozenset[int]  # support positions where h_i is wrong or diverges


def bad_hypotheses(concept, dist: FiniteDistribution, i_max: int, acc: AccuracyParams, effort=DEFAULT_EFFORT):
    """h_1..h_{i_max} whose exact true error is at least epsilon."""
    eps = Fraction(acc.epsilon)
    labels = [concept.label(x) for x in dist.support]
    bad = []
    for i in range(1, i_max + 1):
        program = enumerate_program(i)
        wrong = set()
        for p, x in enumerate(dist.support):
            decision = decide_halting(program, x, effort)
            if decision.verdict is Verdict.UNKNOWN:
                raise Inconclusive(f"h_{i} undecided on {x!r}; true error is not exact")
            if decision.diverges or decision.bit != labels[p]:
                wrong.add(p)
        error = sum((dist.weights[p] for p in wrong), Fraction(0))
        if error >= eps:
            bad.append(BadHypothesis(i, error, frozenset(wrong)))
    return bad


def union_bound_trial(stream: SampleStream, index_of_point, bad, acc) -> list[int]:
    """Indices of bad hypotheses that agree with the target on all their m(i) samples."""
    horizon = max((sample_bound(b.index, acc) for b in bad), default=0)
    first_seen: dict[int, int] = {}
    for j in range(1, horizon + 1):
        first_seen.setdefault(index_of_point[stream.draw()], j)
    survivors = []
    for b in bad:
        earliest = min((first_seen.get(p, horizon + 1) for p in b.disagreements), default=horizon + 1)
        if earliest > sample_bound(b.index, acc):
            survivors.append(b.index)
    return survivors


def run_union_bound(config: UnionBoundConfig, concept=None) -> dict:
    dist = FiniteDistribution.uniform_maxlen(config.maxlen)
    if concept is None:
        concept = tabulate(ProgramConcept(FIRST_BIT), dist.support)
    acc = config.acc
    bad = bad_hypotheses(concept, dist, config.i_max, acc, config.effort)
    index_of_point = {x: p for p, x in enumerate(dist.support)}
    violations, witnesses = 0, []
    for t in range(config.trials):
        survivors = union_bound_trial(SampleStream(derive_seed(config.seed, t), dist), index_of_point, bad, acc)
        if survivors:
            violations += 1
            witnesses.append({"trial": t, "survivors": survivors})
    threshold = three_sigma_threshold(acc.delta, config.trials)
    return {
        "experiment": "union-bound",
        "config": asdict(config),
        "bad_hypotheses": len(bad),
        "union_bound": math.fsum(per_hypothesis_risk(b.index, acc) for b in bad),
        "trials": config.trials,
        "violations": violations,
        "violation_fraction": violations / config.trials,
        "threshold": threshold,
        "passed": violations / config.trials <= threshold,
        "witnesses": witnesses,
    }
