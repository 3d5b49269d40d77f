"""Sound, incomplete halting decider for BCL runs.

The decider simulates the run and watches the abstract configuration
``(pc, min(head, |x|), A, C)``.  Once the head is past the input every READ
returns 2, so the abstraction loses nothing.  Two divergence certificates:

* an abstract configuration repeats exactly (deterministic cycle);
* ``(pc, head class, A)`` recurs with a counter at least as large and no
  DECJZ zero-branch was taken in between.  Every DECJZ on the connecting path
  then sees a counter no smaller than before, so the path replays forever.
"""

from __future__ import annotations

import enum
from typing import NamedTuple

from .vm import Program

DEFAULT_EFFORT = 10_000


class Verdict(enum.Enum):
    HALTS = "halts"
    DIVERGES = "diverges"
    UNKNOWN = "unknown"


class HaltingDecision(NamedTuple):
    verdict: Verdict
    bit: int | None = None
    steps: int = 0  # halting step count, or steps explored

    @property
    def halts(self) -> bool:
        return self.verdict is Verdict.HALTS

    @property
    def diverges(self) -> bool:
        return self.verdict is Verdict.DIVERGES


def decide_halting(program: Program, x: str, effort: int = DEFAULT_EFFORT) -> HaltingDecision:
    code = program.code
    n = len(code)
    xl = len(x)
    pc = head = a = c = 0
    zero_branches = 0
    exact: set[tuple[int, int, int, int]] = set()
    lowest_counter: dict[tuple[int, int, int, int], int] = {}
    for used in range(effort):
        hc = head if head < xl else xl
        config = (pc, hc, a, c)
        if config in exact:
            return HaltingDecision(Verdict.DIVERGES, None, used)
        exact.add(config)
        key = (pc, hc, a, zero_branches)
        low = lowest_counter.get(key)
        if low is not None and c >= low:
            return HaltingDecision(Verdict.DIVERGES, None, used)
        if low is None or c < low:
            lowest_counter[key] = c

        if pc >= n:
            return HaltingDecision(Verdict.HALTS, 0, used + 1)
        b = code[pc]
        op = b >> 5
        if op == 0:
            return HaltingDecision(Verdict.HALTS, b & 1, used + 1)
        if op == 1:
            return HaltingDecision(Verdict.HALTS, a & 1, used + 1)
        if op == 2:
            a = (1 if x[head] == "1" else 0) if head < xl else 2
            pc += 1
        elif op == 3:
            head += 1
            pc += 1
        elif op == 4:
            c += b & 0x1F
            pc += 1
        elif op == 5:
            if c == 0:
                zero_branches += 1
                pc = b & 0x1F
            else:
                c -= 1
                pc += 1
        elif op == 6:
            pc = (b & 0x1F) if a == 0 else pc + 1
        else:
            pc = b & 0x1F
    return HaltingDecision(Verdict.UNKNOWN, None, effort)
