"""Reference learners over a finite point set, used as adversary fixtures.

They speak the same session protocol as the universal learners and output
:class:`~unipac.oracle.TableConcept` hypotheses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .bounds import AccuracyParams, sample_bound
from .learner import LearnerReport, Query
from .oracle import LabeledSample, TableConcept


def _memorize(samples: list[LabeledSample]) -> TableConcept:
    return TableConcept({x: y for x, y in samples}, 0)


def _table_report(samples, hypothesis, index=None, iterations=0) -> LearnerReport:
    return LearnerReport(
        output_index=index,
        output_program=None,
        samples_queried=len(samples),
        schedule_iterations=iterations,
        total_vm_steps=0,
        hypothesis=hypothesis,
    )


def finite_class_sample_size(d: int, acc: AccuracyParams) -> int:
    """ceil((d ln 2 + ln(1/delta)) / epsilon): enough for ERM over all 2^d labelings."""
    return math.ceil((d * math.log(2) + math.log(1 / acc.delta)) / acc.epsilon)


@dataclass
class FixedSizeLearner:
    """Query exactly ``size`` samples, then output the memorized table."""

    size: int
    name: str = "fixed"

    def session(self, acc, work_ceiling=None):
        samples = []
        for j in range(1, self.size + 1):
            samples.append(LabeledSample(*(yield Query(j, self.size))))
        return _table_report(samples, _memorize(samples))


def eager_learner(queries: int = 1) -> FixedSizeLearner:
    return FixedSizeLearner(queries, name="eager")


def erm_learner(d: int, acc: AccuracyParams) -> FixedSizeLearner:
    return FixedSizeLearner(finite_class_sample_size(d, acc), name="erm")


@dataclass
class StopOnOneLearner:
    """Query until a 1-label appears or ``limit`` samples are in; not PAC,
    but its query count depends on the labeling."""

    limit: int
    name: str = "stop-on-one"

    def session(self, acc, work_ceiling=None):
        samples = []
        while len(samples) < self.limit:
            samples.append(LabeledSample(*(yield Query(len(samples) + 1, 1))))
            if samples[-1].label == 1:
                break
        return _table_report(samples, _memorize(samples))


@dataclass
class SequentialLabelingLearner:
    """Tests every labeling of ``points`` in lexicographic order, labeling i
    on the first m(i) samples, and outputs the first consistent one."""

    points: tuple[str, ...]
    name: str = "sequential"

    def session(self, acc, work_ceiling=None):
        samples: list[LabeledSample] = []
        floor = sample_bound(1, acc)
        position = {x: n for n, x in enumerate(self.points)}
        for i, bits in enumerate(itertools.product((0, 1), repeat=len(self.points)), 1):
            m = sample_bound(i, acc)
            for j in range(1, m + 1):
                if j > len(samples):
                    samples.append(LabeledSample(*(yield Query(j, max(floor, j)))))
                x, y = samples[j - 1]
                if bits[position[x]] != y:
                    break
            else:
                return _table_report(samples, TableConcept(dict(zip(self.points, bits)), 0), index=i, iterations=i)
        raise RuntimeError("no labeling of the point set is consistent with the samples")
