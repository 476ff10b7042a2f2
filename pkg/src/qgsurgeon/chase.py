"""Dimension chases through exact sequences of finite-dimensional spaces.

Only the Euler-characteristic consequence of exactness is used: along
``0 -> V_1 -> ... -> V_k -> 0`` the alternating sum of dimensions vanishes.
A sequence with a single unknown dimension determines it; solving repeats
that step until nothing changes.

File format::

    # comments allowed
    know h1(Omega_V) = 21
    seq 0 h0(Omega_V|E(E)) h1(Omega_V) h1(Omega_V(E)) h1(Omega_V|E(E)) 0
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

__all__ = [
    "ChaseError",
    "ExactSequence",
    "ExactSequenceSystem",
    "Contradiction",
    "ChaseResult",
    "parse_system",
    "solve",
]


class ChaseError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class ExactSequence:
    terms: tuple[str, ...]
    line: int = 0

    def __str__(self) -> str:
        return "0 -> " + " -> ".join(self.terms) + " -> 0"

    def alternating_sum(self, values: Mapping[str, int]) -> int:
        return sum(values[t] * (-1) ** i for i, t in enumerate(self.terms))


@dataclass(frozen=True)
class ExactSequenceSystem:
    knowns: Mapping[str, int]
    sequences: tuple[ExactSequence, ...]

    @property
    def variables(self) -> list[str]:
        seen = dict.fromkeys(self.knowns)
        for s in self.sequences:
            seen.update(dict.fromkeys(s.terms))
        return list(seen)


@dataclass(frozen=True)
class Contradiction:
    sequence: ExactSequence
    index: int
    reason: str

    def __str__(self) -> str:
        where = f" (line {self.sequence.line})" if self.sequence.line else ""
        return f"sequence #{self.index}{where} {self.sequence}: {self.reason}"


@dataclass
class ChaseResult:
    values: dict[str, int]
    unknowns: list[str]
    contradictions: list[Contradiction] = field(default_factory=list)
    derived: list[tuple[str, int, int]] = field(default_factory=list)  # (name, value, seq index)

    @property
    def ok(self) -> bool:
        return not self.contradictions

    def as_dict(self) -> dict:
        return {
            "values": dict(sorted(self.values.items())),
            "unknowns": sorted(self.unknowns),
            "contradictions": [str(c) for c in self.contradictions],
            "derived": [
                {"name": n, "value": v, "sequence": i} for n, v, i in self.derived
            ],
        }


def parse_system(text: str) -> ExactSequenceSystem:
    knowns: dict[str, int] = {}
    sequences: list[ExactSequence] = []
    know_lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        head, _, rest = body.partition(" ")
        if head == "know":
            name, eq, value = rest.partition("=")
            name = name.strip()
            if not eq or not name or len(name.split()) != 1:
                raise ChaseError("expected 'know <name> = <uint>'", lineno)
            try:
                dim = int(value.strip())
            except ValueError:
                raise ChaseError(f"dimension {value.strip()!r} is not an integer", lineno) from None
            if dim < 0:
                raise ChaseError(f"negative dimension for {name}", lineno)
            if name in knowns and knowns[name] != dim:
                raise ChaseError(
                    f"{name} known as {knowns[name]} (line {know_lines[name]}) and as {dim}", lineno
                )
            knowns[name] = dim
            know_lines[name] = lineno
        elif head == "seq":
            toks = rest.split()
            if len(toks) < 3 or toks[0] != "0" or toks[-1] != "0":
                raise ChaseError("expected 'seq 0 <name> ... 0'", lineno)
            terms = tuple(toks[1:-1])
            if "0" in terms:
                raise ChaseError("zero terms are only allowed at the ends", lineno)
            sequences.append(ExactSequence(terms, lineno))
        else:
            raise ChaseError(f"unknown statement {head!r} (expected know or seq)", lineno)
    used = {t for s in sequences for t in s.terms}
    for name in knowns:
        if name not in used:
            raise ChaseError(f"known variable {name!r} appears in no sequence", know_lines[name])
    return ExactSequenceSystem(knowns, tuple(sequences))


def solve(system: ExactSequenceSystem, knowns: Optional[Mapping[str, int]] = None) -> ChaseResult:
    """Propagate known dimensions through the sequences to a fixed point.

    ``knowns`` overrides the system's own.  Contradictions (a negative forced
    dimension, or a fully known sequence whose alternating sum is nonzero)
    are reported per sequence rather than raised.
    """
    values = dict(system.knowns if knowns is None else knowns)
    derived: list[tuple[str, int, int]] = []
    flagged: dict[int, str] = {}
    progress = True
    while progress:
        progress = False
        for idx, seq in enumerate(system.sequences):
            if idx in flagged:
                continue
            missing = sorted({t for t in seq.terms if t not in values})
            if len(missing) != 1:
                continue
            name = missing[0]
            # sum of signs over every position the unknown occupies
            coeff = sum((-1) ** i for i, t in enumerate(seq.terms) if t == name)
            rest = sum(values[t] * (-1) ** i for i, t in enumerate(seq.terms) if t != name)
            if coeff == 0:
                continue
            if rest % coeff:
                flagged[idx] = f"{name} would be the non-integer {-rest}/{coeff}"
                continue
            val = -rest // coeff
            if val < 0:
                flagged[idx] = f"{name} would be negative ({val})"
                continue
            values[name] = val
            derived.append((name, val, idx))
            progress = True

    contradictions = [
        Contradiction(system.sequences[i], i, reason) for i, reason in sorted(flagged.items())
    ]
    for idx, seq in enumerate(system.sequences):
        if idx in flagged or any(t not in values for t in seq.terms):
            continue
        total = seq.alternating_sum(values)
        if total:
            contradictions.append(
                Contradiction(seq, idx, f"alternating sum of dimensions is {total}, not 0")
            )
    contradictions.sort(key=lambda c: c.index)
    unknowns = [v for v in system.variables if v not in values]
    return ChaseResult(values, unknowns, contradictions, derived)
