"""Curve configurations on a smooth surface and the construction-script DSL.

A configuration is a weighted incidence graph: every curve carries its
self-intersection, its degree against the canonical class and its arithmetic
genus, and pairs of curves carry a nonnegative intersection number.  Named
points record which curves pass through them and with what local
multiplicity; they are the places a later ``blowup`` statement acts on.

Script grammar (one statement per line, ``#`` starts a comment)::

    surface K3
    surface custom { k2=-1, euler=25, sigma=-17, chi=2 }
    curve F { self = 0, pa = 1 }
    meet A B mult 2
    point p on F:2, S1:1
    point q
    blowup p as E1
    chain C1 = A B E1
    expect { k2 = 2, euler = 22, chi = 2, torsion = Z/2 }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence, Union

__all__ = [
    "AmbientInvariants",
    "K3",
    "PRESETS",
    "Curve",
    "Configuration",
    "ConfigError",
    "ScriptError",
    "SurfaceStmt",
    "CurveStmt",
    "MeetStmt",
    "PointStmt",
    "BlowupStmt",
    "ChainStmt",
    "ExpectStmt",
    "Expectations",
    "ConstructionScript",
    "parse_script",
    "format_script",
    "intersection_matrix",
    "validate",
]


class ConfigError(ValueError):
    """Raised when a configuration is malformed or an id is missing."""


@dataclass(frozen=True)
class AmbientInvariants:
    k2: int
    euler: int
    signature: int
    chi: int
    irregularity_assumed_zero: bool = True

    def violations(self) -> list[str]:
        out = []
        if self.k2 + self.euler != 12 * self.chi:
            out.append(
                f"Noether: k2 + euler = {self.k2 + self.euler} != 12*chi = {12 * self.chi}"
            )
        if (self.signature + self.euler) != 4 * self.chi:
            out.append(
                f"chi != (signature + euler)/4: ({self.signature} + {self.euler})/4 vs chi={self.chi}"
            )
        return out

    def blown_up(self, times: int = 1) -> "AmbientInvariants":
        return replace(
            self,
            k2=self.k2 - times,
            euler=self.euler + times,
            signature=self.signature - times,
        )

    def as_dict(self) -> dict:
        return {
            "k2": self.k2,
            "euler": self.euler,
            "signature": self.signature,
            "chi": self.chi,
        }


K3 = AmbientInvariants(k2=0, euler=24, signature=-16, chi=2)
PRESETS = {"K3": K3}


@dataclass(frozen=True)
class Curve:
    id: str
    self_int: int
    k_dot: int
    arithmetic_genus: int

    @classmethod
    def from_genus(cls, id: str, self_int: int, arithmetic_genus: int) -> "Curve":
        """Build a curve whose canonical degree is forced by adjunction."""
        return cls(id, self_int, 2 * arithmetic_genus - 2 - self_int, arithmetic_genus)

    def violations(self) -> list[str]:
        out = []
        if self.arithmetic_genus < 0:
            out.append(f"curve {self.id}: negative arithmetic genus {self.arithmetic_genus}")
        if self.self_int + self.k_dot != 2 * self.arithmetic_genus - 2:
            out.append(
                f"curve {self.id}: adjunction fails, C.C + K.C = "
                f"{self.self_int + self.k_dot} != 2*pa - 2 = {2 * self.arithmetic_genus - 2}"
            )
        return out


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, eq=True)
class Configuration:
    """Immutable curve configuration.

    ``pairings`` is keyed by sorted id pairs and holds only positive
    off-diagonal intersection numbers; ``points`` maps a point id to its
    incidences ``((curve id, multiplicity), ...)``.
    """

    ambient: AmbientInvariants
    curves: Mapping[str, Curve] = field(default_factory=dict)
    pairings: Mapping[tuple[str, str], int] = field(default_factory=dict)
    points: Mapping[str, tuple[tuple[str, int], ...]] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def pairing(self, a: str, b: str) -> int:
        if a == b:
            return self.curves[a].self_int
        return self.pairings.get(_key(a, b), 0)

    def neighbours(self, cid: str) -> dict[str, int]:
        out = {}
        for (a, b), v in self.pairings.items():
            if a == cid:
                out[b] = v
            elif b == cid:
                out[a] = v
        return out

    def with_curve(self, curve: Curve) -> "Configuration":
        if curve.id in self.curves:
            raise ConfigError(f"duplicate curve id {curve.id!r}")
        curves = dict(self.curves)
        curves[curve.id] = curve
        return replace(self, curves=curves)

    def with_pairing(self, a: str, b: str, value: int) -> "Configuration":
        if a == b:
            raise ConfigError(f"self-pairing of {a!r} belongs in self_int")
        for cid in (a, b):
            if cid not in self.curves:
                raise ConfigError(f"unknown curve id {cid!r}")
        if value < 0:
            raise ConfigError(f"negative intersection number {a}.{b} = {value}")
        pairings = dict(self.pairings)
        if value:
            pairings[_key(a, b)] = value
        else:
            pairings.pop(_key(a, b), None)
        return replace(self, pairings=pairings)

    def with_point(self, pid: str, incidences: Iterable[tuple[str, int]]) -> "Configuration":
        if pid in self.points:
            raise ConfigError(f"duplicate point id {pid!r}")
        inc = tuple(incidences)
        for cid, m in inc:
            if cid not in self.curves:
                raise ConfigError(f"point {pid}: unknown curve id {cid!r}")
            if m < 1:
                raise ConfigError(f"point {pid}: multiplicity {m} < 1 on {cid}")
        points = dict(self.points)
        points[pid] = inc
        return replace(self, points=points)

    def without_curve(self, cid: str) -> "Configuration":
        """Drop a curve together with its pairings and point incidences."""
        if cid not in self.curves:
            raise ConfigError(f"unknown curve id {cid!r}")
        curves = {k: v for k, v in self.curves.items() if k != cid}
        pairings = {k: v for k, v in self.pairings.items() if cid not in k}
        points = {
            pid: tuple((c, m) for c, m in inc if c != cid) for pid, inc in self.points.items()
        }
        return replace(self, curves=curves, pairings=pairings, points=points)


def validate(cfg: Configuration) -> list[str]:
    """Return every invariant violation of ``cfg``; empty means consistent."""
    out = list(cfg.ambient.violations())
    for curve in cfg.curves.values():
        out.extend(curve.violations())
    for (a, b), v in cfg.pairings.items():
        if a == b:
            out.append(f"self-pairing entry for {a}")
        if a not in cfg.curves or b not in cfg.curves:
            out.append(f"pairing {a}.{b} references an unknown curve")
        if v < 0:
            out.append(f"negative pairing {a}.{b} = {v}")
    for pid, inc in cfg.points.items():
        for cid, m in inc:
            if cid not in cfg.curves:
                out.append(f"point {pid} lies on unknown curve {cid}")
            if m < 1:
                out.append(f"point {pid} has multiplicity {m} on {cid}")
    return out


def intersection_matrix(cfg: Configuration, ids: Sequence[str]) -> list[list[int]]:
    if len(set(ids)) != len(ids):
        raise ConfigError(f"repeated id in {list(ids)}")
    for cid in ids:
        if cid not in cfg.curves:
            raise ConfigError(f"unknown curve id {cid!r}")
    return [[cfg.pairing(a, b) for b in ids] for a in ids]


# --------------------------------------------------------------------------
# script statements

@dataclass(frozen=True)
class SurfaceStmt:
    tag: str
    ambient: AmbientInvariants
    line: int = 0


@dataclass(frozen=True)
class CurveStmt:
    id: str
    self_int: int
    pa: int
    k_dot: Optional[int] = None  # None: forced by adjunction
    line: int = 0

    def curve(self) -> Curve:
        if self.k_dot is None:
            return Curve.from_genus(self.id, self.self_int, self.pa)
        return Curve(self.id, self.self_int, self.k_dot, self.pa)


@dataclass(frozen=True)
class MeetStmt:
    a: str
    b: str
    mult: int = 1
    line: int = 0


@dataclass(frozen=True)
class PointStmt:
    id: str
    incidences: tuple[tuple[str, int], ...] = ()
    line: int = 0


@dataclass(frozen=True)
class BlowupStmt:
    point: str
    new_id: str
    line: int = 0


@dataclass(frozen=True)
class ChainStmt:
    id: str
    members: tuple[str, ...]
    line: int = 0


@dataclass(frozen=True)
class Expectations:
    k2: Optional[int] = None
    euler: Optional[int] = None
    chi: Optional[int] = None
    torsion: Optional[tuple[int, ...]] = None  # () is the trivial group


@dataclass(frozen=True)
class ExpectStmt:
    expect: Expectations
    line: int = 0


Statement = Union[CurveStmt, MeetStmt, PointStmt, BlowupStmt, ChainStmt, ExpectStmt]


@dataclass(frozen=True)
class ConstructionScript:
    base: AmbientInvariants
    base_tag: str
    statements: tuple[Statement, ...] = ()

    def of_type(self, kind) -> list:
        return [s for s in self.statements if isinstance(s, kind)]

    @property
    def expectations(self) -> Optional[Expectations]:
        found = self.of_type(ExpectStmt)
        return found[-1].expect if found else None

    def structure(self) -> tuple:
        """Statements with line numbers stripped, for structural comparison."""
        return (
            self.base_tag,
            self.base,
            tuple(replace(s, line=0) for s in self.statements),
        )


# --------------------------------------------------------------------------
# parser

class ScriptError(ValueError):
    """Parse or name-resolution failure with a source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0, expected: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        where = f"line {line}, column {column}: " if line else ""
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}{message}{hint}")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>[+-]?\d+(?:\.\d*)?)|(?P<group>Z/\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>[{}=,:+/]))"
)
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_KEYWORDS = {"surface", "curve", "meet", "mult", "point", "on", "blowup", "as", "chain", "expect", "custom"}


class _Line:
    """Token cursor over one source line."""

    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
                raise ScriptError(f"unexpected character {text[col - 1]!r}", lineno, col)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start + 1))
            pos = m.end()
        self.i = 0
        self.end_col = len(text) + 1

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self) -> int:
        tok = self.peek()
        return tok[2] if tok else self.end_col

    def fail(self, message: str, expected: str = "") -> ScriptError:
        return ScriptError(message, self.lineno, self.col(), expected)

    def take(self, kind: str, expected: str) -> str:
        tok = self.peek()
        if tok is None:
            raise self.fail("unexpected end of line", expected)
        if tok[0] != kind:
            raise self.fail(f"unexpected {tok[1]!r}", expected)
        self.i += 1
        return tok[1]

    def sym(self, s: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != s:
            got = "end of line" if tok is None else repr(tok[1])
            raise self.fail(f"unexpected {got}", repr(s))
        self.i += 1

    def at(self, s: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[1] == s

    def name(self, what: str = "identifier") -> str:
        value = self.take("name", what)
        if value in _KEYWORDS:
            self.i -= 1
            raise self.fail(f"keyword {value!r} used as a name", what)
        return value

    def keyword(self, kw: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != kw:
            got = "end of line" if tok is None else repr(tok[1])
            raise self.fail(f"unexpected {got}", repr(kw))
        self.i += 1

    def integer(self, what: str = "integer", minimum: Optional[int] = None) -> int:
        col = self.col()
        raw = self.take("num", what)
        if "." in raw:
            raise ScriptError(f"non-integer value {raw}", self.lineno, col, what)
        value = int(raw)
        if minimum is not None and value < minimum:
            raise ScriptError(f"value {value} is below {minimum}", self.lineno, col, what)
        return value

    def done(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise self.fail(f"trailing input {tok[1]!r}", "end of line")

    def fields(self, spec: Mapping[str, str]) -> dict:
        """Parse ``{ key = value, ... }``; spec maps key -> 'int' | 'uint' | 'group'."""
        self.sym("{")
        out: dict = {}
        while True:
            col = self.col()
            key = self.take("name", "one of " + ", ".join(spec))
            if key not in spec:
                raise ScriptError(f"unknown field {key!r}", self.lineno, col, "one of " + ", ".join(spec))
            if key in out:
                raise ScriptError(f"field {key!r} given twice", self.lineno, col)
            self.sym("=")
            kind = spec[key]
            if kind == "group":
                out[key] = self.group()
            else:
                out[key] = self.integer(key, 0 if kind == "uint" else None)
            if self.at(","):
                self.i += 1
                continue
            self.sym("}")
            return out

    def group(self) -> tuple[int, ...]:
        tok = self.peek()
        if tok is not None and tok[1] in ("0", "trivial"):
            self.i += 1
            return ()
        orders = [self._cyclic()]
        while self.at("+"):
            self.i += 1
            orders.append(self._cyclic())
        return tuple(sorted(orders))

    def _cyclic(self) -> int:
        col = self.col()
        raw = self.take("group", "Z/<n>")
        order = int(raw[2:])
        if order < 2:
            raise ScriptError(f"cyclic factor of order {order}", self.lineno, col, "Z/<n> with n >= 2")
        return order


def parse_script(text: Union[str, bytes]) -> ConstructionScript:
    """Parse and name-resolve a construction script."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScriptError(f"input is not UTF-8: {exc}") from None
    base, tag = K3, "K3"
    seen_surface = False
    statements: list[Statement] = []
    names: dict[str, str] = {}  # name -> kind, single namespace

    def declare(name: str, kind: str, ln: _Line, col: int) -> None:
        if name in names:
            raise ScriptError(f"duplicate name {name!r} (already a {names[name]})", ln.lineno, col)
        names[name] = kind

    def resolve(name: str, kind: str, ln: _Line, col: int) -> None:
        if names.get(name) != kind:
            what = "undeclared" if name not in names else f"a {names[name]}, not a {kind}"
            raise ScriptError(f"{name!r} is {what}", ln.lineno, col, f"a previously declared {kind}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        ln = _Line(body, lineno)
        head_col = ln.col()
        head = ln.take("name", "a statement keyword")
        if head == "surface":
            if seen_surface or statements:
                raise ScriptError("surface must be the first statement and appear once", lineno, head_col)
            seen_surface = True
            col = ln.col()
            tag = ln.take("name", "K3 or custom")
            if tag == "custom":
                f = ln.fields({"k2": "int", "euler": "int", "sigma": "int", "chi": "int"})
                missing = {"k2", "euler", "sigma", "chi"} - set(f)
                if missing:
                    raise ScriptError(f"custom surface lacks {sorted(missing)}", lineno, col)
                base = AmbientInvariants(f["k2"], f["euler"], f["sigma"], f["chi"])
            elif tag in PRESETS:
                base = PRESETS[tag]
            else:
                raise ScriptError(f"unknown surface preset {tag!r}", lineno, col, "K3 or custom")
        elif head == "curve":
            col = ln.col()
            cid = ln.name("curve id")
            f = ln.fields({"self": "int", "pa": "uint", "k": "int"})
            if "self" not in f or "pa" not in f:
                raise ScriptError("curve needs both self and pa", lineno, ln.col())
            declare(cid, "curve", ln, col)
            statements.append(CurveStmt(cid, f["self"], f["pa"], f.get("k"), lineno))
        elif head == "meet":
            ca = ln.col()
            a = ln.name("curve id")
            cb = ln.col()
            b = ln.name("curve id")
            mult = 1
            if ln.at("mult"):
                ln.keyword("mult")
                mult = ln.integer("multiplicity", 1)
            resolve(a, "curve", ln, ca)
            resolve(b, "curve", ln, cb)
            if a == b:
                raise ScriptError("a curve cannot meet itself; use self", lineno, cb)
            statements.append(MeetStmt(a, b, mult, lineno))
        elif head == "point":
            col = ln.col()
            pid = ln.name("point id")
            inc: list[tuple[str, int]] = []
            if ln.at("on"):
                ln.keyword("on")
                while True:
                    cc = ln.col()
                    cid = ln.name("curve id")
                    ln.sym(":")
                    m = ln.integer("multiplicity >= 1", 1)
                    resolve(cid, "curve", ln, cc)
                    if any(c == cid for c, _ in inc):
                        raise ScriptError(f"curve {cid!r} listed twice", lineno, cc)
                    inc.append((cid, m))
                    if ln.at(","):
                        ln.i += 1
                        continue
                    break
            declare(pid, "point", ln, col)
            statements.append(PointStmt(pid, tuple(inc), lineno))
        elif head == "blowup":
            cp = ln.col()
            pid = ln.name("point id")
            ln.keyword("as")
            ce = ln.col()
            eid = ln.name("curve id")
            resolve(pid, "point", ln, cp)
            declare(eid, "curve", ln, ce)
            statements.append(BlowupStmt(pid, eid, lineno))
        elif head == "chain":
            col = ln.col()
            chid = ln.name("chain id")
            ln.sym("=")
            members = []
            while ln.peek() is not None:
                cc = ln.col()
                cid = ln.name("curve id")
                resolve(cid, "curve", ln, cc)
                members.append(cid)
            if not members:
                raise ln.fail("empty chain", "curve id")
            declare(chid, "chain", ln, col)
            statements.append(ChainStmt(chid, tuple(members), lineno))
        elif head == "expect":
            f = ln.fields({"k2": "int", "euler": "int", "chi": "int", "torsion": "group"})
            statements.append(ExpectStmt(Expectations(**f), lineno))
        else:
            raise ScriptError(f"unknown statement {head!r}", lineno, head_col,
                              "surface, curve, meet, point, blowup, chain or expect")
        ln.done()
    return ConstructionScript(base, tag, tuple(statements))


def _format_group(orders: tuple[int, ...]) -> str:
    return " + ".join(f"Z/{n}" for n in orders) if orders else "0"


def format_script(script: ConstructionScript) -> str:
    """Serialize a script back to DSL text; ``parse_script`` inverts it."""
    b = script.base
    if script.base_tag in PRESETS and PRESETS[script.base_tag] == b:
        lines = [f"surface {script.base_tag}"]
    else:
        lines = [f"surface custom {{ k2={b.k2}, euler={b.euler}, sigma={b.signature}, chi={b.chi} }}"]
    for s in script.statements:
        if isinstance(s, CurveStmt):
            extra = f", k = {s.k_dot}" if s.k_dot is not None else ""
            lines.append(f"curve {s.id} {{ self = {s.self_int}, pa = {s.pa}{extra} }}")
        elif isinstance(s, MeetStmt):
            lines.append(f"meet {s.a} {s.b}" + (f" mult {s.mult}" if s.mult != 1 else ""))
        elif isinstance(s, PointStmt):
            inc = ", ".join(f"{c}:{m}" for c, m in s.incidences)
            lines.append(f"point {s.id}" + (f" on {inc}" if inc else ""))
        elif isinstance(s, BlowupStmt):
            lines.append(f"blowup {s.point} as {s.new_id}")
        elif isinstance(s, ChainStmt):
            lines.append(f"chain {s.id} = {' '.join(s.members)}")
        elif isinstance(s, ExpectStmt):
            e = s.expect
            parts = [f"{k} = {getattr(e, k)}" for k in ("k2", "euler", "chi") if getattr(e, k) is not None]
            if e.torsion is not None:
                parts.append(f"torsion = {_format_group(e.torsion)}")
            lines.append("expect { " + ", ".join(parts) + " }")
    return "\n".join(lines) + "\n"


def is_valid_name(name: str) -> bool:
    return bool(_NAME.match(name)) and name not in _KEYWORDS
