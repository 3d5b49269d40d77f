"""Command line entry point: ``unipac <subcommand> [options]``.

Every option may also come from a ``--config`` file of ``key value`` lines
(``#`` starts a comment); flags given on the command line win.  Tables are
written as TSV with a header row, everything else as one JSON object that
embeds the resolved configuration.

Exit codes: 0 success, 2 bad configuration or precondition, 3 the halting
decider could not settle an evaluation, 4 a verification subcommand found
its invariant violated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import NamedTuple

from .adversary import DEFAULT_WORK_CEILING, VACUOUS, run_adversary
from .baselines import StopOnOneLearner, eager_learner, erm_learner
from .bounds import AccuracyParams, adversary_rho_bound, per_hypothesis_risk, sample_bound
from .halting import DEFAULT_EFFORT, decide_halting
from .harness import UnionBoundConfig, PacConfig, dump_report, run_union_bound, run_pac_contract
from .learner import DovetailLearner, HaltingOracleLearner, Inconclusive, WorkCeilingExceeded, drive
from .oracle import (
    ConceptDivergence,
    FiniteDistribution,
    Oracle,
    ProgramConcept,
    SampleStream,
    load_concept_table,
    load_distribution,
    tabulate,
)
from .vm import EnumerationOverflow, Program, enumerate_program, execute

EXIT_OK, EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_VIOLATION = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


# Defaults applied after the config file, so the file can fill any option.
DEFAULTS = {
    "delta": "0.2",
    "epsilon": "0.2",
    "seed": "0",
    "budget": "10000",
    "effort": str(DEFAULT_EFFORT),
    "chunk": "4096",
    "work_ceiling": None,
    "min_index": "1",
    "max_index": "20",
    "learner": "dovetail",
    "include_table": False,
}


def _add_accuracy(p):
    p.add_argument("--delta", help="confidence parameter, decimal (default 0.2)")
    p.add_argument("--epsilon", help="accuracy parameter, decimal (default 0.2)")


def _add_sources(p):
    p.add_argument("--concept-hex", help="target concept as BCL program hex")
    p.add_argument("--concept-table", help="target concept as a '<bitstring> <bit>' table file")
    p.add_argument("--dist-file", help="distribution as '<bitstring> <num>/<den>' lines")
    p.add_argument("--dist-uniform-exact-len", type=int, metavar="L")
    p.add_argument("--dist-uniform-maxlen", type=int, metavar="L")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of 'key value' lines; flags override it")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="unipac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list programs h_i..h_j")
    p.add_argument("first", type=int)
    p.add_argument("last", type=int)

    p = sub.add_parser("eval", parents=[common], help="run a program on one input")
    p.add_argument("program_hex", help="program bytes as hex; '-' or '\"\"' for the empty program")
    p.add_argument("input", help="binary input string; '-' or '\"\"' for the empty string")
    p.add_argument("--budget")
    p.add_argument("--effort", help="also ask the halting decider with this effort")

    p = sub.add_parser("bounds", parents=[common], help="m(i) and risk table, or the adversary bound over m")
    _add_accuracy(p)
    p.add_argument("--min-index")
    p.add_argument("--max-index")
    p.add_argument("--rho-d", type=int, metavar="D", help="tabulate the over-sampling bound for m < D instead")

    for name, text in (("learn", "dovetail learner"), ("learn-ho", "halting-oracle learner")):
        p = sub.add_parser(name, parents=[common], help=f"run the {text} once")
        _add_accuracy(p)
        _add_sources(p)
        p.add_argument("--seed")
        p.add_argument("--effort")
        p.add_argument("--work-ceiling")
        if name == "learn":
            p.add_argument("--chunk")

    p = sub.add_parser("adversary", parents=[common], help="worst labeling, exact and empirical over-sampling")
    _add_accuracy(p)
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--learner", choices=["dovetail", "eager", "erm", "stop-on-one"])
    p.add_argument("--trials")
    p.add_argument("--seed")
    p.add_argument("--work-ceiling")
    p.add_argument("--include-table", action="store_const", const=True)

    p = sub.add_parser("lemma1", parents=[common], help="Monte Carlo check of the truncated union bound")
    _add_accuracy(p)
    _add_sources(p)
    p.add_argument("--i-max")
    p.add_argument("--trials")
    p.add_argument("--seed")
    p.add_argument("--effort")

    p = sub.add_parser("pac", parents=[common], help="Monte Carlo check of the PAC contract")
    _add_accuracy(p)
    p.add_argument("--trials")
    p.add_argument("--seed")
    p.add_argument("--maxlen")
    p.add_argument("--effort")
    return parser


def read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        if not value.strip():
            raise ConfigError(f"{path}:{lineno}: expected 'key value'")
        values[key.lstrip("-").replace("-", "_")] = value.strip()
    return values


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over defaults."""
    given = {k: v for k, v in vars(args).items() if k not in ("config", "output")}
    from_file = read_config_file(args.config) if args.config else {}
    unknown = set(from_file) - set(given)
    if unknown:
        raise ConfigError(f"unknown config keys for '{args.command}': {', '.join(sorted(unknown))}")
    resolved = {}
    for key, value in given.items():
        if value is None:
            value = from_file.get(key, DEFAULTS.get(key))
        resolved[key] = value
    return resolved


def _int(cfg, key, low=None, high=None):
    value = cfg.get(key)
    if value is None:
        raise ConfigError(f"--{key.replace('_', '-')} is required")
    try:
        value = int(value, 0) if isinstance(value, str) else int(value)
    except ValueError as exc:
        raise ConfigError(f"--{key.replace('_', '-')}: not an integer: {value!r}") from exc
    if (low is not None and value < low) or (high is not None and value > high):
        raise ConfigError(f"--{key.replace('_', '-')} out of range: {value}")
    return value


def _optional_int(cfg, key, low=None):
    return None if cfg.get(key) is None else _int(cfg, key, low)


def _int_or(cfg, key, default, low=None, high=None):
    return default if cfg.get(key) is None else _int(cfg, key, low, high)


def _flag(cfg, key) -> bool:
    value = cfg.get(key)
    if isinstance(value, str):
        if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key}: expected true or false, got {value!r}")
        return value.lower() in ("true", "1", "yes")
    return bool(value)


def _accuracy(cfg) -> tuple[AccuracyParams, dict]:
    texts = {k: str(cfg[k]) for k in ("delta", "epsilon")}
    try:
        acc = AccuracyParams(float(texts["delta"]), float(texts["epsilon"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    echo = {
        "delta": acc.delta,
        "delta_text": texts["delta"],
        "epsilon": acc.epsilon,
        "epsilon_text": texts["epsilon"],
    }
    return acc, echo


def _seed(cfg) -> int:
    return _int(cfg, "seed", 0, 2**64 - 1)


def _program(text: str) -> Program:
    if text in ("-", '""'):
        return Program(b"")
    try:
        return Program.from_hex(text)
    except ValueError as exc:
        raise ConfigError(f"bad program hex {text!r}") from exc


def _concept(cfg, required=True):
    sources = [k for k in ("concept_hex", "concept_table") if cfg.get(k) is not None]
    if len(sources) > 1 or (required and not sources):
        raise ConfigError("give exactly one of --concept-hex, --concept-table")
    if not sources:
        return None
    if sources[0] == "concept_hex":
        return ProgramConcept(_program(cfg["concept_hex"]), _int(cfg, "effort", 0))
    try:
        return load_concept_table(cfg["concept_table"])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"concept table: {exc}") from exc


def _distribution(cfg) -> FiniteDistribution:
    sources = [k for k in ("dist_file", "dist_uniform_exact_len", "dist_uniform_maxlen") if cfg.get(k) is not None]
    if len(sources) != 1:
        raise ConfigError("give exactly one of --dist-file, --dist-uniform-exact-len, --dist-uniform-maxlen")
    key = sources[0]
    if key == "dist_file":
        try:
            return load_distribution(cfg[key])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"distribution: {exc}") from exc
    length = _int(cfg, key, 0, 20)
    if key == "dist_uniform_exact_len":
        return FiniteDistribution.uniform_exact_len(length)
    return FiniteDistribution.uniform_maxlen(length)


def _tsv(header, rows) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Subcommands.  Each returns (exit code, report text).
# ---------------------------------------------------------------------------


def cmd_enumerate(cfg):
    first, last = _int(cfg, "first", 1), _int(cfg, "last", 1)
    if last < first:
        raise ConfigError("last index must be >= first")
    rows = []
    for i in range(first, last + 1):
        try:
            program = enumerate_program(i)
        except EnumerationOverflow as exc:
            raise ConfigError(str(exc)) from exc
        text = "; ".join(str(ins) for ins in program.instructions) or "(empty; halts with 0)"
        rows.append((i, program.hex, text))
    return EXIT_OK, _tsv(["index", "hex", "disassembly"], rows)


def cmd_eval(cfg):
    program = _program(cfg["program_hex"])
    x = "" if cfg["input"] in ("-", '""') else cfg["input"]
    if any(ch not in "01" for ch in x):
        raise ConfigError(f"not a binary string: {x!r}")
    budget = _int(cfg, "budget", 0)
    raw = execute(program, x, budget)
    report = {
        "config": {"program_hex": program.hex, "input": x, "budget": budget},
        "halted": raw.bit is not None,
        "bit": raw.bit,
        "steps": raw.steps,
    }
    if cfg.get("effort") is not None:
        decision = decide_halting(program, x, _int(cfg, "effort", 0))
        report["config"]["effort"] = _int(cfg, "effort", 0)
        report["decider"] = {"verdict": decision.verdict.value, "bit": decision.bit, "steps": decision.steps}
    return EXIT_OK, _json(report)


def cmd_bounds(cfg):
    acc, _ = _accuracy(cfg)
    if cfg.get("rho_d") is not None:
        d = _int(cfg, "rho_d", 1)
        return EXIT_OK, _tsv(["m", "rho_bound"], [(m, repr(adversary_rho_bound(d, m, acc))) for m in range(d)])
    lo, hi = _int(cfg, "min_index", 1), _int(cfg, "max_index", 1)
    if hi < lo:
        raise ConfigError("--max-index must be >= --min-index")
    rows = [(i, sample_bound(i, acc), repr(per_hypothesis_risk(i, acc))) for i in range(lo, hi + 1)]
    return EXIT_OK, _tsv(["i", "m", "risk"], rows)


def cmd_learn(cfg, oracle_learner=False):
    acc, echo = _accuracy(cfg)
    seed = _seed(cfg)
    effort = _int(cfg, "effort", 0)
    concept, dist = _concept(cfg), _distribution(cfg)
    ceiling = _optional_int(cfg, "work_ceiling", 1)
    if oracle_learner:
        learner = HaltingOracleLearner(effort=effort)
    else:
        learner = DovetailLearner(effort=effort, chunk=_int(cfg, "chunk", 1))
    report = drive(learner, acc, Oracle(SampleStream(seed, dist), concept), ceiling)
    out = report.to_dict()
    out.update(seed=seed, delta=acc.delta, epsilon=acc.epsilon)
    out["config"] = {**_source_echo(cfg), **echo, "seed": seed, "effort": effort, "work_ceiling": ceiling}
    if not oracle_learner:
        out["config"]["chunk"] = _int(cfg, "chunk", 1)
    return EXIT_OK, _json(out)


def _source_echo(cfg) -> dict:
    keys = ("concept_hex", "concept_table", "dist_file", "dist_uniform_exact_len", "dist_uniform_maxlen")
    return {k: cfg[k] for k in keys if cfg.get(k) is not None}


def _adversary_learner(name, d, acc, m):
    if name == "dovetail":
        return DovetailLearner()
    if name == "eager":
        return eager_learner()
    if name == "erm":
        return erm_learner(d, acc)
    if name == "stop-on-one":
        return StopOnOneLearner(d + m + 1)
    raise ConfigError(f"unknown learner {name!r}")


def cmd_adversary(cfg):
    acc, echo = _accuracy(cfg)
    d, m = _int(cfg, "d", 1, 16), _int(cfg, "m", 0)
    if m >= d:
        raise ConfigError(f"need m < d, got m={m}, d={d}")
    trials, seed = _int_or(cfg, "trials", 2000, 1), _seed(cfg)
    ceiling = _optional_int(cfg, "work_ceiling", 1) or DEFAULT_WORK_CEILING
    learner = _adversary_learner(cfg["learner"], d, acc, m)
    report = run_adversary(learner, acc, d, m, trials, seed, include_table=_flag(cfg, "include_table"), work_ceiling=ceiling)
    out = report.to_dict()
    rho = float(report.rho_exact)
    band = 3 * math.sqrt(rho * (1 - rho) / trials)
    within = abs(float(report.rho_empirical) - rho) <= band
    out["empirical_within_3sigma"] = within
    out["config"] = {**echo, "d": d, "m": m, "learner": cfg["learner"], "trials": trials, "seed": seed, "work_ceiling": ceiling}
    if report.verdict == VACUOUS:
        out["note"] = "bound is not positive at these parameters; no verdict"
    return (EXIT_OK if within else EXIT_VIOLATION), _json(out)


def cmd_lemma1(cfg):
    acc, echo = _accuracy(cfg)
    config = UnionBoundConfig(
        delta=acc.delta,
        epsilon=acc.epsilon,
        i_max=_int_or(cfg, "i_max", UnionBoundConfig.i_max, 1),
        trials=_int_or(cfg, "trials", UnionBoundConfig.trials, 1),
        seed=_seed(cfg),
        maxlen=UnionBoundConfig.maxlen,
        effort=_int(cfg, "effort", 0),
    )
    dist_given = any(cfg.get(k) is not None for k in ("dist_file", "dist_uniform_exact_len", "dist_uniform_maxlen"))
    if dist_given:
        raise ConfigError("lemma1 uses the uniform distribution over strings of length <= 4")
    concept = _concept(cfg, required=False)
    if concept is not None:
        concept = tabulate(concept, FiniteDistribution.uniform_maxlen(config.maxlen).support)
    report = run_union_bound(config, concept)
    report["config"] = {**asdict(config), **echo, **_source_echo(cfg)}
    return (EXIT_OK if report["passed"] else EXIT_VIOLATION), dump_report(report)


def cmd_pac(cfg):
    acc, echo = _accuracy(cfg)
    config = PacConfig(
        delta=acc.delta,
        epsilon=acc.epsilon,
        trials=_int_or(cfg, "trials", PacConfig.trials, 1),
        seed=_seed(cfg),
        maxlen=_int_or(cfg, "maxlen", PacConfig.maxlen, 0, 10),
        effort=_int(cfg, "effort", 0),
    )
    report = run_pac_contract(config)
    report["config"] = {**asdict(config), **echo}
    return (EXIT_OK if report["passed"] else EXIT_VIOLATION), dump_report(report)


COMMANDS = {
    "enumerate": cmd_enumerate,
    "eval": cmd_eval,
    "bounds": cmd_bounds,
    "learn": cmd_learn,
    "learn-ho": lambda cfg: cmd_learn(cfg, oracle_learner=True),
    "adversary": cmd_adversary,
    "lemma1": cmd_lemma1,
    "pac": cmd_pac,
}


class CommandResult(NamedTuple):
    code: int
    text: str  # the report, or an error message when ``error``
    error: bool = False
    output: str | None = None


def run_command(argv=None) -> CommandResult:
    """Parse ``argv`` and run the subcommand, writing the report to ``--output`` if given."""
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        code, text = COMMANDS[args.command](cfg)
    except (ConfigError, ConceptDivergence) as exc:
        return CommandResult(EXIT_CONFIG, f"error: {exc}\n", True)
    except Inconclusive as exc:
        return CommandResult(EXIT_INCONCLUSIVE, f"inconclusive: {exc}\n", True)
    except WorkCeilingExceeded as exc:
        return CommandResult(EXIT_VIOLATION, f"work ceiling exceeded: {exc}\n", True)
    if args.output:
        Path(args.output).write_text(text)
    return CommandResult(code, text, False, args.output)


def main(argv=None) -> int:
    result = run_command(argv)
    if result.error:
        sys.stderr.write(result.text)
    elif result.output is None:
        sys.stdout.write(result.text)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
