"""Independent reference implementations used as test oracles.

Nothing here imports the code paths it checks: the interpreter works from
the disassembly text, the dovetailer unrolls the schedule literally one VM
step per entry, and the query enumerator walks explicit response sequences.
Frozen oracle values and the adversary fixture learners live at the bottom.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from unipac.adversary import build_point_set
from unipac.baselines import FixedSizeLearner, SequentialLabelingLearner, StopOnOneLearner
from unipac.bounds import AccuracyParams
from unipac.learner import DovetailLearner


def ref_interpret(disassembly: str, x: str, budget: int):
    """Return ('halt', bit, steps) or ('budget', None, budget)."""
    prog = []
    for line in disassembly.splitlines():
        name, operand = line.split()
        prog.append((name, int(operand)))
    regs = {"pc": 0, "head": 0, "A": 0, "C": 0}
    for t in range(1, budget + 1):
        if regs["pc"] >= len(prog):
            return ("halt", 0, t)
        name, u = prog[regs["pc"]]
        if name == "HALT":
            return ("halt", u % 2, t)
        if name == "OUTA":
            return ("halt", regs["A"] % 2, t)
        if name == "READ":
            regs["A"] = int(x[regs["head"]]) if regs["head"] < len(x) else 2
            regs["pc"] += 1
        elif name == "RIGHT":
            regs["head"] += 1
            regs["pc"] += 1
        elif name == "INC":
            regs["C"] += u
            regs["pc"] += 1
        elif name == "DECJZ":
            if regs["C"] == 0:
                regs["pc"] = u
            else:
                regs["C"] -= 1
                regs["pc"] += 1
        elif name == "AJZ":
            regs["pc"] = u if regs["A"] == 0 else regs["pc"] + 1
        elif name == "JMP":
            regs["pc"] = u
        else:
            raise AssertionError(name)
    return ("budget", None, budget)


def ref_sample_bound_mp(i, delta, epsilon, dps=60):
    import mpmath

    with mpmath.workdps(dps):
        d = mpmath.mpf(delta)
        e = mpmath.mpf(epsilon)
        interior = (2 * mpmath.log(i) + mpmath.log(1 / d) + mpmath.log(mpmath.pi**2 / 6)) / e
        return int(mpmath.ceil(interior)), interior


def ref_schedule(iterations):
    out = []
    k = 1
    while k <= iterations:
        i = 1
        while i <= k:
            out.append((i, k - i + 1))
            i += 1
        k += 1
    return out


def ref_dovetail(m_of, hypotheses, draw, max_iterations):
    """Literal dovetailing: one VM step per schedule entry.

    ``m_of(i)`` is the sample requirement, ``hypotheses(i)`` a Program,
    ``draw()`` returns the next (point, label).  Returns a dict or None if
    no thread completes within ``max_iterations``.
    """
    from unipac.vm import INITIAL_STATE, Halted, step

    threads = {}
    samples = []
    total = 0
    for k in range(1, max_iterations + 1):
        for i in range(1, k + 1):
            th = threads.get(i)
            if th is None:
                th = threads[i] = {"prog": hypotheses(i), "m": m_of(i), "j": 1, "passes": 0, "state": None, "exited": False}
            if th["exited"]:
                continue
            if th["state"] is None:
                if th["j"] > len(samples):
                    samples.append(draw())
                th["state"] = INITIAL_STATE
            x, label = samples[th["j"] - 1]
            out = step(th["state"], th["prog"], x)
            total += 1
            if isinstance(out, Halted):
                th["state"] = None
                if out.bit != label:
                    th["exited"] = True
                    continue
                th["passes"] += 1
                if th["passes"] == th["m"]:
                    return {
                        "output_index": i,
                        "samples_queried": len(samples),
                        "schedule_iterations": k,
                        "total_vm_steps": total,
                    }
                th["j"] += 1
            else:
                th["state"] = out
    return None


def brute_force_rho(learner, acc, labeling, points, m, work_ceiling=None, trust_floor=False):
    """Pr[learner issues more than m queries], by enumerating every
    response sequence of length m + 1 explicitly.  Unless ``trust_floor``,
    every sequence is played until the learner stops or asks once too often."""
    d = len(points)
    exceed = 0
    for seq in itertools.product(range(d), repeat=m + 1):
        session = learner.session(acc, work_ceiling)
        asked = 0
        over = False
        try:
            query = next(session)
            while True:
                asked += 1
                if asked > m or (trust_floor and query.floor > m):
                    over = True
                    break
                p = seq[asked - 1]
                query = session.send((points[p], labeling[p]))
        except StopIteration:
            pass
        finally:
            session.close()
        exceed += over
    return Fraction(exceed, d ** (m + 1))


# m(i) on the (i, delta, epsilon) grid, from a 60-digit mpmath evaluation.
# Every interior value is at least 7e-4 away from an integer.
FROZEN_GRID = {
    1: {0.01: (511, 52, 26, 13), 0.1: (281, 29, 15, 8), 0.2: (211, 22, 11, 6)},
    2: {0.01: (649, 65, 33, 17), 0.1: (419, 42, 21, 11), 0.2: (350, 35, 18, 9)},
    3: {0.01: (731, 74, 37, 19), 0.1: (500, 50, 25, 13), 0.2: (431, 44, 22, 11)},
    10: {0.01: (971, 98, 49, 25), 0.1: (741, 75, 38, 19), 0.2: (672, 68, 34, 17)},
    100: {0.01: (1432, 144, 72, 36), 0.1: (1202, 121, 61, 31), 0.2: (1132, 114, 57, 29)},
    16674: {0.01: (2455, 246, 123, 62), 0.1: (2225, 223, 112, 56), 0.2: (2156, 216, 108, 54)},
}
EPSILONS = (0.01, 0.1, 0.2, 0.4)


LOOSE = AccuracyParams(0.5, 0.45)  # dovetail m(1) = 3
SEQ = AccuracyParams(0.9, 0.45)  # sequential m(1) = 2, m(2) = 5
MID = AccuracyParams(0.2, 0.2)  # dovetail m(1) = 11, above every fixture's m


def adversary_fixtures(d):
    """(learner, accuracy) pairs used against the brute-force query tree."""
    points = tuple(build_point_set(d))
    return [
        (StopOnOneLearner(3), LOOSE),
        (SequentialLabelingLearner(points), SEQ),
        (FixedSizeLearner(1), LOOSE),
        (FixedSizeLearner(2), LOOSE),
        (FixedSizeLearner(3), LOOSE),
        (DovetailLearner(), MID),
    ]
