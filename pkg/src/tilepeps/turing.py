"""Nondeterministic single-tape Turing machines with bounded acceptance search."""

from __future__ import annotations

import enum
import json
from itertools import product
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInput


class Move(enum.Enum):
    LEFT = -1
    STAY = 0
    RIGHT = 1

    @classmethod
    def parse(cls, token) -> Move:
        if isinstance(token, Move):
            return token
        key = str(token).strip().upper()
        aliases = {
            "L": cls.LEFT, "LEFT": cls.LEFT, "-1": cls.LEFT,
            "S": cls.STAY, "STAY": cls.STAY, "0": cls.STAY, "N": cls.STAY,
            "R": cls.RIGHT, "RIGHT": cls.RIGHT, "1": cls.RIGHT, "+1": cls.RIGHT,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInput(f"unknown head move {token!r}") from None

    @property
    def code(self) -> str:
        return self.name[0]


@dataclass(frozen=True)
class Quintuple:
    state: str
    read: str
    next_state: str
    write: str
    move: Move

    def as_list(self) -> list:
        return [self.state, self.read, self.next_state, self.write, self.move.code]


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    accepting: str
    program: tuple[Quintuple, ...]
    blank: str = "#"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(
            self,
            "program",
            tuple(q if isinstance(q, Quintuple) else _quintuple(q) for q in self.program),
        )

    @property
    def deterministic(self) -> bool:
        prefixes = [(q.state, q.read) for q in self.program]
        return len(prefixes) == len(set(prefixes))

    def instructions(self, state: str, symbol: str) -> tuple[Quintuple, ...]:
        return self._table.get((state, symbol), ())

    @property
    def _table(self) -> dict:
        # cached lazily on the frozen instance
        try:
            return self.__dict__["_table_cache"]
        except KeyError:
            table: dict = {}
            for q in self.program:
                table.setdefault((q.state, q.read), ())
                table[(q.state, q.read)] += (q,)
            object.__setattr__(self, "_table_cache", table)
            return table

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "blank": self.blank,
            "initial": self.initial,
            "accepting": self.accepting,
            "program": [q.as_list() for q in self.program],
        }

    @classmethod
    def from_json(cls, data: dict) -> TuringMachine:
        try:
            return cls(
                states=tuple(data["states"]),
                alphabet=tuple(data["alphabet"]),
                blank=data.get("blank", "#"),
                initial=data["initial"],
                accepting=data["accepting"],
                program=tuple(_quintuple(row) for row in data["program"]),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed machine description: {exc}") from None

    @classmethod
    def load(cls, path) -> TuringMachine:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _quintuple(row) -> Quintuple:
    if len(row) != 5:
        raise InvalidInput(f"quintuple must have 5 entries, got {row!r}")
    q, s, q2, s2, m = row
    return Quintuple(str(q), str(s), str(q2), str(s2), Move.parse(m))


@dataclass(frozen=True)
class InstantDescription:
    tape: tuple[str, ...]
    head: int
    state: str

    def __post_init__(self):
        object.__setattr__(self, "tape", tuple(self.tape))

    def __str__(self) -> str:
        cells = [f"[{self.state}]{s}" if i == self.head else s for i, s in enumerate(self.tape)]
        return " ".join(cells)


def validate_tm(tm: TuringMachine) -> list[str]:
    """Return every violated well-formedness condition (empty when valid)."""
    problems = []
    states, alphabet = set(tm.states), set(tm.alphabet)
    if len(states) != len(tm.states):
        problems.append("duplicate entries in states")
    if len(alphabet) != len(tm.alphabet):
        problems.append("duplicate entries in alphabet")
    if tm.blank not in alphabet:
        problems.append(f"blank symbol {tm.blank!r} not in alphabet")
    if tm.initial not in states:
        problems.append(f"initial state q0={tm.initial!r} not in states")
    if tm.accepting not in states:
        problems.append(f"accepting state qF={tm.accepting!r} not in states")
    for i, q in enumerate(tm.program):
        for what, value, domain in (
            ("state", q.state, states),
            ("read symbol", q.read, alphabet),
            ("next state", q.next_state, states),
            ("write symbol", q.write, alphabet),
        ):
            if value not in domain:
                problems.append(f"quintuple {i}: {what} {value!r} undeclared")
    if len(set(tm.program)) != len(tm.program):
        problems.append("duplicate quintuples in program")
    return problems


def require_valid(tm: TuringMachine) -> None:
    problems = validate_tm(tm)
    if problems:
        raise InvalidInput("invalid Turing machine: " + "; ".join(problems))


def _check_id(tm: TuringMachine, id_: InstantDescription) -> None:
    if not 0 <= id_.head < len(id_.tape):
        raise InvalidInput(f"head {id_.head} outside tape of length {len(id_.tape)}")


def step(tm: TuringMachine, id_: InstantDescription) -> frozenset[InstantDescription]:
    """All successors of ``id_``; the tape grows by one blank when the head runs off an end."""
    _check_id(tm, id_)
    out = set()
    for q in tm.instructions(id_.state, id_.tape[id_.head]):
        tape = list(id_.tape)
        tape[id_.head] = q.write
        head = id_.head + q.move.value
        if head < 0:
            tape.insert(0, tm.blank)
            head = 0
        elif head == len(tape):
            tape.append(tm.blank)
        out.add(InstantDescription(tuple(tape), head, q.next_state))
    return frozenset(out)


def initial_id(tm: TuringMachine, word: Sequence[str], tape_bound: int) -> InstantDescription:
    symbols = _symbols(word)
    if len(symbols) > tape_bound or tape_bound < 1:
        raise InvalidInput(f"tape bound {tape_bound} too small for word of length {len(symbols)}")
    tape = list(symbols) + [tm.blank] * (tape_bound - len(symbols))
    return InstantDescription(tuple(tape), 0, tm.initial)


def _symbols(word) -> tuple[str, ...]:
    return tuple(word) if not isinstance(word, str) else tuple(word)


def is_accepting(tm: TuringMachine, id_: InstantDescription, strict_halt: bool) -> bool:
    if id_.state != tm.accepting:
        return False
    if not strict_halt:
        return True
    return id_.head == 0 and all(s == tm.blank for s in id_.tape)


@dataclass(frozen=True)
class AcceptResult:
    accepted: bool
    witness: tuple[InstantDescription, ...] | None = field(default=None)

    def __bool__(self) -> bool:
        return self.accepted


def _bounded_successors(tm: TuringMachine, id_: InstantDescription):
    for q in tm.instructions(id_.state, id_.tape[id_.head]):
        head = id_.head + q.move.value
        if not 0 <= head < len(id_.tape):
            continue
        tape = id_.tape[: id_.head] + (q.write,) + id_.tape[id_.head + 1:]
        yield InstantDescription(tape, head, q.next_state)


def accepts_within(
    tm: TuringMachine,
    word: Sequence[str] | str,
    t: int,
    tape_bound: int,
    *,
    strict_halt: bool = False,
) -> AcceptResult:
    """Decide whether some computation of at most ``t`` steps accepts ``word``.

    The tape is the first ``tape_bound`` cells; branches moving the head
    outside them are discarded. With ``strict_halt`` the final ID must be
    ``qF`` on the leftmost cell of an all-blank tape.
    """
    if t < 0:
        raise InvalidInput(f"step bound must be nonnegative, got {t}")
    symbols = _symbols(word)
    for s in symbols:
        if s not in tm.alphabet or s == tm.blank:
            raise InvalidInput(f"input symbol {s!r} must be a non-blank alphabet symbol")
    start = initial_id(tm, symbols or (tm.blank,), tape_bound)

    # DFS; an ID is re-expanded only when reached at a strictly smaller depth
    best_depth = {start: 0}
    path: list[InstantDescription] = [start]
    stack = [iter(_bounded_successors(tm, start))]
    if is_accepting(tm, start, strict_halt):
        return AcceptResult(True, (start,))
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            path.pop()
            continue
        depth = len(path)
        if best_depth.get(nxt, t + 1) <= depth:
            continue
        best_depth[nxt] = depth
        path.append(nxt)
        if is_accepting(tm, nxt, strict_halt):
            return AcceptResult(True, tuple(path))
        if depth < t:
            stack.append(iter(_bounded_successors(tm, nxt)))
        else:
            path.pop()
    return AcceptResult(False, None)


# Small reference machines used throughout the tests and the CLI docs.

def immediate_accept_machine() -> TuringMachine:
    return TuringMachine(
        states=("q0", "qF"),
        alphabet=("#", "1"),
        initial="q0",
        accepting="qF",
        program=(("q0", "#", "qF", "#", "S"),),
    )


def eraser_machine() -> TuringMachine:
    return TuringMachine(
        states=("q0", "qF"),
        alphabet=("#", "1"),
        initial="q0",
        accepting="qF",
        program=(("q0", "1", "q0", "#", "R"), ("q0", "#", "qF", "#", "S")),
    )


def wandering_eraser_machine() -> TuringMachine:
    """Two-state nondeterministic machine: on ``1`` it may erase in place or step right,
    on ``#`` it may step left or accept."""
    return TuringMachine(
        states=("q0", "qF"),
        alphabet=("#", "1"),
        initial="q0",
        accepting="qF",
        program=(
            ("q0", "1", "q0", "#", "S"),
            ("q0", "1", "q0", "1", "R"),
            ("q0", "#", "q0", "#", "L"),
            ("q0", "#", "qF", "#", "S"),
        ),
    )


def words(alphabet: Iterable[str], blank: str, max_len: int):
    """All words over the non-blank symbols, shortest first."""
    letters = [s for s in alphabet if s != blank]
    for n in range(max_len + 1):
        for w in product(letters, repeat=n):
            yield "".join(w) if all(len(s) == 1 for s in w) else w
