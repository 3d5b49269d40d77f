"""The dovetailing learner, the halting-oracle learner and their shared protocol.

Both learners are written as *sessions*: generators that yield a
:class:`Query` whenever they need the next labeled sample and receive a
:class:`~unipac.oracle.LabeledSample` back.  The trajectory is a pure function
of ``(delta, epsilon)`` and the responses, which is what lets the adversary
explore a learner's query tree by replaying sessions.

Dovetailing
-----------
Iteration ``k`` serves threads ``1..k`` in ascending order, giving thread
``i`` its ``(k - i + 1)``-th step; one schedule entry is one VM step of the
thread's current evaluation.  When an evaluation halts inside an entry, the
check is made in that same entry; a mismatch exits the thread, a match bumps
its pass count, and the next evaluation starts at the thread's next entry.
The first thread to collect ``m(i)`` passes wins.

The implementation is event driven rather than entry by entry.  Nothing a
thread does between its own events is observable, so a thread fast-forwards
through every sample that has already been drawn and only re-enters the
event heap when it needs an undrawn sample, completes, or is resumed after a
long evaluation.  Evaluations certified divergent by the decider are parked:
their thread stays live and keeps consuming its entries, it just never
produces another event.  Reports are identical to the literal schedule.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Generator, NamedTuple, Protocol

from .bounds import AccuracyParams, sample_bound
from .halting import DEFAULT_EFFORT, HaltingDecision, Verdict, decide_halting
from .oracle import LabeledSample, Oracle
from .vm import Program, enumerate_program, execute

__all__ = [
    "Query",
    "LearnerReport",
    "ResumableLearner",
    "DovetailLearner",
    "HaltingOracleLearner",
    "Inconclusive",
    "WorkCeilingExceeded",
    "schedule_trace",
    "dovetail_learn",
    "halting_oracle_learn",
    "drive",
    "decide_halting",
]


class Inconclusive(RuntimeError):
    """The halting decider could not settle an evaluation the learner reached."""


class WorkCeilingExceeded(RuntimeError):
    """A session did too much internal work without querying or halting."""


class Query(NamedTuple):
    position: int  # 1-based index of the requested sample
    floor: int  # the session will not finish before issuing this many queries


@dataclass
class LearnerReport:
    output_index: int | None
    output_program: Program | None
    samples_queried: int
    schedule_iterations: int
    total_vm_steps: int
    threads: dict = field(default_factory=dict)
    hypothesis: object = None  # non-BCL hypotheses (baselines)

    def to_dict(self) -> dict:
        return {
            "output_index": self.output_index,
            "output_program_hex": None if self.output_program is None else self.output_program.hex,
            "samples_queried": self.samples_queried,
            "schedule_iterations": self.schedule_iterations,
            "total_vm_steps": self.total_vm_steps,
            "threads": dict(self.threads),
        }


Session = Generator[Query, LabeledSample, LearnerReport]


class ResumableLearner(Protocol):
    name: str

    def session(self, acc: AccuracyParams, work_ceiling: int | None = None) -> Session: ...


def drive(learner: ResumableLearner, acc: AccuracyParams, oracle: Oracle, work_ceiling=None) -> LearnerReport:
    """Run a session to completion, answering queries from ``oracle``."""
    session = learner.session(acc, work_ceiling)
    try:
        next(session)
        while True:
            session.send(oracle.next())
    except StopIteration as stop:
        return stop.value


def schedule_trace(iterations: int) -> list[tuple[int, int]]:
    """(thread, thread-local step) pairs for the first ``iterations`` iterations."""
    if iterations < 1:
        raise ValueError("need at least one iteration")
    return [(i, k - i + 1) for k in range(1, iterations + 1) for i in range(1, k + 1)]


@lru_cache(maxsize=1 << 20)
def cached_decision(program: Program, x: str, effort: int) -> HaltingDecision:
    return decide_halting(program, x, effort)


# ---------------------------------------------------------------------------
# Dovetailing learner
# ---------------------------------------------------------------------------

_SPAWN, _START, _RESUME, _COMPLETE = range(4)


class _Thread:
    __slots__ = ("i", "program", "m", "j", "passes", "exit_k", "complete_k", "state", "parked", "memo")

    def __init__(self, i: int, program: Program, m: int):
        self.i = i
        self.program = program
        self.m = m
        self.j = 1
        self.passes = 0
        self.exit_k = None
        self.complete_k = None
        self.state = None
        self.parked = False
        self.memo = None  # point -> (verdict, bit, steps), shared per program


@dataclass
class DovetailLearner:
    """Universal learner over ``hypotheses(1), hypotheses(2), ...``.

    ``effort`` bounds the decider used to skip provably divergent or quickly
    halting evaluations; ``chunk`` is how many steps an undecided evaluation
    is advanced per event.  Neither changes the result.
    """

    hypotheses: Callable[[int], Program] = enumerate_program
    effort: int = DEFAULT_EFFORT
    chunk: int = 4096
    name: str = "dovetail"
    _memos: dict = field(default_factory=dict, repr=False, compare=False)

    def session(self, acc: AccuracyParams, work_ceiling: int | None = None) -> Session:
        samples: list[LabeledSample] = []
        floor = sample_bound(1, acc)
        threads: dict[int, _Thread] = {}
        pending: dict[int, int] = {}
        heap: list[tuple[int, int]] = [(1, 1)]
        last_query_k = 0

        while True:
            k, i = heapq.heappop(heap)
            if work_ceiling is not None and k - last_query_k > work_ceiling:
                raise WorkCeilingExceeded(f"{k - last_query_k} iterations without a query")
            kind = pending.pop(i, _SPAWN)
            if kind == _SPAWN:
                program = self.hypotheses(i)
                th = threads[i] = _Thread(i, program, sample_bound(i, acc))
                th.memo = self._memos.setdefault(program, {})
                heapq.heappush(heap, (i + 1, i + 1))
                kind = _START
            else:
                th = threads[i]

            if kind == _COMPLETE:
                return self._report(threads, k, i, len(samples))
            if th.j > len(samples):
                sample = yield Query(len(samples) + 1, max(floor, len(samples) + 1))
                samples.append(LabeledSample(*sample))
                last_query_k = k
            if kind == _START:
                self._evaluate_from(th, k, samples, heap, pending)
            else:
                self._resume(th, k, samples, heap, pending)

    def _evaluate_from(self, th, k, samples, heap, pending):
        """Thread ``th`` begins evaluating sample ``th.j`` at entry ``k``.

        Runs through every already drawn sample inline; this loop dominates
        the learner's cost, so the pass/fail bookkeeping of ``_check`` is
        repeated here on locals.
        """
        memo = th.memo
        program = th.program
        n = len(samples)
        j, passes, m = th.j, th.passes, th.m
        while True:
            x, label = samples[j - 1]
            result = memo.get(x)
            if result is None:
                decision = cached_decision(program, x, self.effort)
                result = memo[x] = (decision.verdict, decision.bit, decision.steps)
            verdict, bit, steps = result
            if verdict is not Verdict.HALTS:
                th.j, th.passes = j, passes
                if verdict is Verdict.DIVERGES:
                    th.parked = True
                    return
                raw = execute(program, x, self.chunk)
                if raw.bit is None:
                    th.state = raw.state
                    pending[th.i] = _RESUME
                    heapq.heappush(heap, (k + self.chunk, th.i))
                    return
                k = self._check(th, k + raw.steps - 1, raw.bit, label, samples, heap, pending)
                if k is None:
                    return
                j, passes = th.j, th.passes
                continue
            k += steps - 1
            if bit != label:
                th.j, th.passes = j, passes
                th.exit_k = k
                return
            passes += 1
            if passes == m:
                th.j, th.passes = j, passes
                th.complete_k = k
                pending[th.i] = _COMPLETE
                heapq.heappush(heap, (k, th.i))
                return
            j += 1
            k += 1
            if j > n:
                th.j, th.passes = j, passes
                pending[th.i] = _START
                heapq.heappush(heap, (k, th.i))
                return

    def _resume(self, th, k, samples, heap, pending):
        x, label = samples[th.j - 1]
        raw = execute(th.program, x, self.chunk, th.state)
        if raw.bit is None:
            th.state = raw.state
            pending[th.i] = _RESUME
            heapq.heappush(heap, (k + self.chunk, th.i))
            return
        th.state = None
        k = self._check(th, k + raw.steps - 1, raw.bit, label, samples, heap, pending)
        if k is not None:
            self._evaluate_from(th, k, samples, heap, pending)

    @staticmethod
    def _check(th, check_k, bit, label, samples, heap, pending):
        """Compare at entry ``check_k``; return the entry of the next evaluation
        if it can start on an already drawn sample, else schedule and return None."""
        if bit != label:
            th.exit_k = check_k
            return None
        th.passes += 1
        if th.passes == th.m:
            th.complete_k = check_k
            pending[th.i] = _COMPLETE
            heapq.heappush(heap, (check_k, th.i))
            return None
        th.j += 1
        if th.j > len(samples):
            pending[th.i] = _START
            heapq.heappush(heap, (check_k + 1, th.i))
            return None
        return check_k + 1

    @staticmethod
    def _report(threads, k_star, i_star, samples_queried) -> LearnerReport:
        total = exited = live = 0
        for th in threads.values():
            if th.i == i_star:
                total += k_star - i_star + 1
                continue
            last_k = k_star if th.i < i_star else k_star - 1
            if th.exit_k is not None and th.exit_k <= last_k:
                total += th.exit_k - th.i + 1
                exited += 1
            else:
                total += last_k - th.i + 1
                live += 1
        winner = threads[i_star]
        return LearnerReport(
            output_index=i_star,
            output_program=winner.program,
            samples_queried=samples_queried,
            schedule_iterations=k_star,
            total_vm_steps=total,
            threads={"spawned": len(threads), "exited": exited, "live": live},
        )


# ---------------------------------------------------------------------------
# Halting-oracle learner
# ---------------------------------------------------------------------------


@dataclass
class HaltingOracleLearner:
    """Tests h_1, h_2, ... in order on x_1..x_m(i), asking the decider
    whether each evaluation halts.  Undecided evaluations abort the run."""

    hypotheses: Callable[[int], Program] = enumerate_program
    effort: int = DEFAULT_EFFORT
    name: str = "halting-oracle"

    def session(self, acc: AccuracyParams, work_ceiling: int | None = None) -> Session:
        samples: list[LabeledSample] = []
        floor = sample_bound(1, acc)
        steps = since_query = 0
        i = 0
        while True:
            i += 1
            program = self.hypotheses(i)
            m = sample_bound(i, acc)
            for j in range(1, m + 1):
                if j > len(samples):
                    sample = yield Query(j, max(floor, j))
                    samples.append(LabeledSample(*sample))
                    since_query = 0
                x, label = samples[j - 1]
                decision = cached_decision(program, x, self.effort)
                if decision.verdict is Verdict.UNKNOWN:
                    raise Inconclusive(f"h_{i} = {program.hex or '<empty>'} undecided on {x!r} at effort {self.effort}")
                steps += decision.steps
                since_query += decision.steps
                if work_ceiling is not None and since_query > work_ceiling:
                    raise WorkCeilingExceeded(f"{since_query} steps without a query")
                if decision.diverges or decision.bit != label:
                    break
            else:
                return LearnerReport(
                    output_index=i,
                    output_program=program,
                    samples_queried=len(samples),
                    schedule_iterations=i,
                    total_vm_steps=steps,
                    threads={"tested": i},
                )


def dovetail_learn(acc: AccuracyParams, oracle: Oracle, **options) -> LearnerReport:
    return drive(DovetailLearner(**options), acc, oracle)


def halting_oracle_learn(acc: AccuracyParams, oracle: Oracle, effort: int = DEFAULT_EFFORT, **options) -> LearnerReport:
    return drive(HaltingOracleLearner(effort=effort, **options), acc, oracle)
