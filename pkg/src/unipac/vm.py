"""Binary Classifier Language (BCL): encoding, interpreter and enumeration.

Every byte is one instruction: the high 3 bits select the opcode, the low
5 bits are the operand ``u``.  Decoding is total, so every byte string is a
program and the length-lexicographic order over byte strings is a recursive
enumeration ``h_1, h_2, ...`` of the whole hypothesis space.

Machine: program counter, input head, accumulator ``A`` and counter ``C``.

    HALT u   halt with output u mod 2
    OUTA     halt with output A mod 2
    READ     A <- input[head], or 2 past the end of the input
    RIGHT    head <- head + 1
    INC u    C <- C + u
    DECJZ u  if C == 0 jump to u, else C <- C - 1
    AJZ u    if A == 0 jump to u
    JMP u    jump to u

Falling off the end (pc >= len, including via a jump) halts with output 0,
which makes the empty program ``h_1`` the constant-0 classifier.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

HALT, OUTA, READ, RIGHT, INC, DECJZ, AJZ, JMP = range(8)
OPCODE_NAMES = ("HALT", "OUTA", "READ", "RIGHT", "INC", "DECJZ", "AJZ", "JMP")
_OPCODE_BY_NAME = {name: code for code, name in enumerate(OPCODE_NAMES)}

# Jump operands address at most 32 instructions; longer programs are legal
# but their tail is only reachable by fall-through.
MAX_PROGRAM_LENGTH = 32


class Instruction(NamedTuple):
    opcode: int
    operand: int

    @classmethod
    def from_byte(cls, b: int) -> "Instruction":
        return cls(b >> 5, b & 0x1F)

    def to_byte(self) -> int:
        return (self.opcode << 5) | self.operand

    @property
    def name(self) -> str:
        return OPCODE_NAMES[self.opcode]

    def __str__(self) -> str:
        return f"{self.name} {self.operand}"


@dataclass(frozen=True)
class Program:
    code: bytes = b""

    @cached_property
    def instructions(self) -> tuple[Instruction, ...]:
        return tuple(Instruction.from_byte(b) for b in self.code)

    def __len__(self) -> int:
        return len(self.code)

    @classmethod
    def from_hex(cls, text: str) -> "Program":
        return cls(bytes.fromhex(text.strip()))

    @classmethod
    def from_instructions(cls, instructions) -> "Program":
        return cls(bytes(Instruction(*ins).to_byte() for ins in instructions))

    @property
    def hex(self) -> str:
        return self.code.hex()

    def disassemble(self) -> str:
        return "\n".join(str(ins) for ins in self.instructions)

    def __repr__(self) -> str:
        return f"Program({self.hex!r})"


def decode(code: bytes) -> Program:
    return Program(bytes(code))


def encode(program: Program) -> bytes:
    return bytes(ins.to_byte() for ins in program.instructions)


def assemble(text: str) -> Program:
    """Parse the one-instruction-per-line ``OPCODE u`` format."""
    instructions = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        name = parts[0].upper()
        if name not in _OPCODE_BY_NAME:
            raise ValueError(f"unknown opcode {parts[0]!r}")
        operand = int(parts[1]) if len(parts) > 1 else 0
        if not 0 <= operand <= 31:
            raise ValueError(f"operand out of range: {operand}")
        instructions.append(Instruction(_OPCODE_BY_NAME[name], operand))
    return Program.from_instructions(instructions)


# ---------------------------------------------------------------------------
# Outcomes and machine state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Halted:
    bit: int


@dataclass(frozen=True)
class OutOfBudget:
    pass


OUT_OF_BUDGET = OutOfBudget()
EvalOutcome = Union[Halted, OutOfBudget]


@dataclass(frozen=True)
class MachineState:
    pc: int = 0
    head: int = 0
    a: int = 0
    c: int = 0
    steps_used: int = 0


INITIAL_STATE = MachineState()


def step(state: MachineState, program: Program, x: str) -> Union[MachineState, Halted]:
    """Execute exactly one instruction (or the fall-off halt)."""
    pc, head, a, c = state.pc, state.head, state.a, state.c
    steps = state.steps_used + 1
    code = program.code
    if pc >= len(code):
        return Halted(0)
    b = code[pc]
    op, u = b >> 5, b & 0x1F
    if op == HALT:
        return Halted(u & 1)
    if op == OUTA:
        return Halted(a & 1)
    if op == READ:
        a = int(x[head]) if head < len(x) else 2
        pc += 1
    elif op == RIGHT:
        head += 1
        pc += 1
    elif op == INC:
        c += u
        pc += 1
    elif op == DECJZ:
        if c == 0:
            pc = u
        else:
            c -= 1
            pc += 1
    elif op == AJZ:
        pc = u if a == 0 else pc + 1
    else:
        pc = u
    return MachineState(pc, head, a, c, steps)


class RawRun(NamedTuple):
    """Result of the fast interpreter loop: ``bit`` is None when unhalted."""

    bit: int | None
    steps: int
    state: MachineState


def execute(program: Program, x: str, budget: int, state: MachineState = INITIAL_STATE) -> RawRun:
    """Run at most ``budget`` steps from ``state``.

    Same semantics as repeated :func:`step`, written as a tight loop.  When
    the machine halts, ``steps`` counts the halting step; otherwise it equals
    ``budget`` and ``state`` is the state to resume from.
    """
    code = program.code
    n = len(code)
    xl = len(x)
    pc, head, a, c = state.pc, state.head, state.a, state.c
    used = 0
    while used < budget:
        used += 1
        if pc >= n:
            return RawRun(0, used, MachineState(pc, head, a, c, state.steps_used + used))
        b = code[pc]
        op = b >> 5
        if op == 0:
            return RawRun(b & 1, used, MachineState(pc, head, a, c, state.steps_used + used))
        if op == 1:
            return RawRun(a & 1, used, MachineState(pc, head, a, c, state.steps_used + used))
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
                pc = b & 0x1F
            else:
                c -= 1
                pc += 1
        elif op == 6:
            pc = (b & 0x1F) if a == 0 else pc + 1
        else:
            pc = b & 0x1F
    return RawRun(None, used, MachineState(pc, head, a, c, state.steps_used + used))


def run(program: Program, x: str, budget: int) -> EvalOutcome:
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    raw = execute(program, x, budget)
    return OUT_OF_BUDGET if raw.bit is None else Halted(raw.bit)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


class EnumerationOverflow(ValueError):
    pass


def _programs_shorter_than(length: int) -> int:
    # 1 + 256 + ... + 256**(length-1)
    return (256**length - 1) // 255


def enumerate_program(i: int, max_length: int = MAX_PROGRAM_LENGTH) -> Program:
    """The i-th program (1-based) in length-lexicographic byte order."""
    if i < 1:
        raise ValueError("enumeration index starts at 1")
    length = 0
    while _programs_shorter_than(length + 1) < i:
        length += 1
        if length > max_length:
            raise EnumerationOverflow(f"index {i} exceeds programs of length <= {max_length}")
    offset = i - 1 - _programs_shorter_than(length)
    return Program(offset.to_bytes(length, "big"))


def index_of(program: Program) -> int:
    code = program.code
    return 1 + _programs_shorter_than(len(code)) + int.from_bytes(code, "big")
