"""Blow-ups of a curve configuration at a named point, and script execution."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .config import (
    AmbientInvariants,
    BlowupStmt,
    ChainStmt,
    ConfigError,
    Configuration,
    ConstructionScript,
    Curve,
    CurveStmt,
    ExpectStmt,
    Expectations,
    MeetStmt,
    PointStmt,
    _key,
    validate,
)

__all__ = ["BlowupError", "BlowupRecord", "ScriptRun", "blow_up", "run_script"]


class BlowupError(ValueError):
    pass


@dataclass(frozen=True)
class BlowupRecord:
    point: str
    exceptional: str
    incidences: tuple[tuple[str, int], ...]
    ambient_after: AmbientInvariants


def blow_up(cfg: Configuration, point: str, new_id: str) -> Configuration:
    """Blow up ``cfg`` at ``point``; the exceptional curve is named ``new_id``.

    A curve through the point with multiplicity m loses m**2 in
    self-intersection, gains m in canonical degree and m(m-1)/2 is taken off
    its arithmetic genus.  Two curves through the point with multiplicities
    m1, m2 lose m1*m2 from their mutual intersection.
    """
    if point not in cfg.points:
        raise BlowupError(f"unknown or already blown-up point {point!r}")
    if new_id in cfg.curves:
        raise BlowupError(f"curve id {new_id!r} is already in use")
    inc = cfg.points[point]

    curves = dict(cfg.curves)
    for cid, m in inc:
        c = curves[cid]
        pa = c.arithmetic_genus - m * (m - 1) // 2
        if pa < 0:
            raise BlowupError(
                f"point {point}: multiplicity {m} on {cid} exceeds its arithmetic genus {c.arithmetic_genus}"
            )
        curves[cid] = Curve(cid, c.self_int - m * m, c.k_dot + m, pa)
    curves[new_id] = Curve(new_id, -1, -1, 0)

    pairings = dict(cfg.pairings)
    for i, (a, ma) in enumerate(inc):
        for b, mb in inc[i + 1:]:
            k = _key(a, b)
            left = pairings.get(k, 0) - ma * mb
            if left < 0:
                raise BlowupError(
                    f"point {point}: {a}.{b} = {pairings.get(k, 0)} cannot absorb "
                    f"multiplicities {ma}*{mb} at one point"
                )
            if left:
                pairings[k] = left
            else:
                pairings.pop(k, None)
    for cid, m in inc:
        pairings[_key(cid, new_id)] = m

    points = {pid: v for pid, v in cfg.points.items() if pid != point}
    return replace(
        cfg,
        ambient=cfg.ambient.blown_up(),
        curves=curves,
        pairings=pairings,
        points=points,
    )


@dataclass
class ScriptRun:
    """Outcome of executing a script: final configuration plus bookkeeping."""

    base: AmbientInvariants
    config: Configuration
    chains: dict[str, tuple[str, ...]] = field(default_factory=dict)
    expectations: Expectations | None = None
    blowups: list[BlowupRecord] = field(default_factory=list)


def _check(cfg: Configuration, line: int) -> None:
    bad = validate(cfg)
    if bad:
        raise ConfigError(f"line {line}: configuration inconsistent: " + "; ".join(bad))


def run_script(script: ConstructionScript) -> ScriptRun:
    cfg = Configuration(script.base)
    _check(cfg, 0)
    run = ScriptRun(base=script.base, config=cfg)
    for stmt in script.statements:
        try:
            if isinstance(stmt, CurveStmt):
                cfg = cfg.with_curve(stmt.curve())
            elif isinstance(stmt, MeetStmt):
                if cfg.pairing(stmt.a, stmt.b):
                    raise ConfigError(f"{stmt.a}.{stmt.b} already declared")
                cfg = cfg.with_pairing(stmt.a, stmt.b, stmt.mult)
            elif isinstance(stmt, PointStmt):
                cfg = cfg.with_point(stmt.id, stmt.incidences)
            elif isinstance(stmt, BlowupStmt):
                cfg = blow_up(cfg, stmt.point, stmt.new_id)
                run.blowups.append(
                    BlowupRecord(stmt.point, stmt.new_id, run.config.points[stmt.point], cfg.ambient)
                )
            elif isinstance(stmt, ChainStmt):
                run.chains[stmt.id] = stmt.members
            elif isinstance(stmt, ExpectStmt):
                run.expectations = stmt.expect
        except (ConfigError, BlowupError) as exc:
            raise type(exc)(f"line {stmt.line}: {exc}") from None
        _check(cfg, stmt.line)
        run.config = cfg
    for name, members in run.chains.items():
        missing = [m for m in members if m not in cfg.curves]
        if missing:
            raise ConfigError(f"chain {name} references unknown curves {missing}")
    return run
