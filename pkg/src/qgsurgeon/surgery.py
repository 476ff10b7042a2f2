"""Contract class T chains and compute the invariants of the smoothing.

K^2 of the general fiber is computed three ways that share no code path:

* ``formula``      base K^2 plus ``r - d + 1`` per chain (from the T-type),
* ``discrepancy``  base K^2 plus ``-sum a_j (b_j - 2)`` per chain, solving for
                   the discrepancies of the contracted surface,
* ``topological``  ``3 sigma + 2 e`` of the smoothed surface, where each chain
                   trades its plumbing (b2 = r, negative definite) for a
                   Milnor fiber with b2 = mu.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

from .blowup import BlowupError, ScriptRun, run_script
from .config import (
    AmbientInvariants,
    ConfigError,
    Configuration,
    ConstructionScript,
    CurveStmt,
    parse_script,
    validate,
)
from .tsing import TType, format_chain, k2_correction_via_discrepancies, recognize_T

__all__ = [
    "ChainError",
    "SurgeryError",
    "RouteDisagreement",
    "ValidatedChain",
    "ChainContribution",
    "SurgeryReport",
    "FixtureReport",
    "extract_chain",
    "check_disjoint",
    "smooth",
    "verify_run",
    "verify_fixture",
    "verify_path",
    "fixture_tier",
]

ASSUMPTIONS = (
    "a global Q-Gorenstein smoothing of the contracted surface exists",
    "b1 = 0 (used for b2 = e - 2)",
    "q = 0 (used for p_g = chi - 1)",
    "minimality of the general fiber is not checked",
)


class ChainError(ValueError):
    """A declared chain cannot be contracted; ``kind`` names the failure."""

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class SurgeryError(ValueError):
    pass


class RouteDisagreement(ArithmeticError):
    """The independent K^2 routes disagree: an internal inconsistency."""


@dataclass(frozen=True)
class ValidatedChain:
    ids: tuple[str, ...]
    weights: tuple[int, ...]
    ttype: TType
    name: str = ""


def extract_chain(cfg: Configuration, ids: Sequence[str], name: str = "") -> ValidatedChain:
    ids = tuple(ids)
    label = name or "-".join(ids)
    if not ids:
        raise ChainError("empty", f"chain {label} has no curves")
    missing = [i for i in ids if i not in cfg.curves]
    if missing:
        raise ChainError("unknown-id", f"chain {label} references unknown curves {missing}")
    if len(set(ids)) != len(ids):
        raise ChainError("not-linear", f"chain {label} repeats a curve")
    for cid in ids:
        if cfg.curves[cid].arithmetic_genus != 0:
            raise ChainError(
                "non-rational",
                f"chain {label}: {cid} has arithmetic genus {cfg.curves[cid].arithmetic_genus}",
            )
    for i, a in enumerate(ids):
        for j in range(i + 1, len(ids)):
            want = 1 if j == i + 1 else 0
            got = cfg.pairing(a, ids[j])
            if got != want:
                raise ChainError(
                    "not-linear", f"chain {label}: {a}.{ids[j]} = {got}, expected {want}"
                )
    weights = tuple(-cfg.curves[cid].self_int for cid in ids)
    if any(b < 2 for b in weights):
        raise ChainError(
            "bad-weight", f"chain {label}: self-intersections {[-b for b in weights]} must all be <= -2"
        )
    ttype = recognize_T(weights)
    if ttype is None:
        raise ChainError("not-class-T", f"chain {label} {format_chain(weights)} is not of class T")
    return ValidatedChain(ids, weights, ttype, name)


def check_disjoint(chains: Sequence[ValidatedChain], cfg: Configuration) -> list[str]:
    """Violations of pairwise disjointness; empty when the chains are disjoint."""
    out = []
    owner: dict[str, str] = {}
    for k, ch in enumerate(chains):
        label = ch.name or f"#{k}"
        for cid in ch.ids:
            if cid in owner:
                out.append(f"curve {cid} lies in both {owner[cid]} and {label}")
            else:
                owner[cid] = label
    for i, a in enumerate(chains):
        for b in chains[i + 1:]:
            for x in a.ids:
                for y in b.ids:
                    if x != y and cfg.pairing(x, y):
                        out.append(
                            f"{x} ({a.name or 'chain'}) meets {y} ({b.name or 'chain'}) "
                            f"with multiplicity {cfg.pairing(x, y)}"
                        )
    return out


@dataclass(frozen=True)
class ChainContribution:
    name: str
    weights: tuple[int, ...]
    ttype: TType
    k2_discrepancy: Fraction

    @property
    def delta_k2(self) -> int:
        return self.ttype.delta_k2

    def as_dict(self) -> dict:
        t = self.ttype
        return {
            "name": self.name,
            "weights": list(self.weights),
            "type": t.label(),
            "kind": t.kind,
            "d": t.d,
            "n": t.n,
            "a": t.a,
            "delta_k2": t.delta_k2,
            "delta_e": t.delta_e,
            "delta_sigma": t.delta_sigma,
            "discrepancy_k2": str(self.k2_discrepancy),
        }


@dataclass(frozen=True)
class SurgeryReport:
    ambient_before: AmbientInvariants
    chains: tuple[ChainContribution, ...]
    k2_routes: dict
    after: AmbientInvariants
    assumptions: tuple[str, ...] = ASSUMPTIONS

    @property
    def b2(self) -> int:
        return self.after.euler - 2

    @property
    def pg(self) -> int:
        return self.after.chi - 1

    @property
    def routes_agree(self) -> bool:
        return len(set(self.k2_routes.values())) == 1

    def as_dict(self) -> dict:
        return {
            "ambient_before": self.ambient_before.as_dict(),
            "ambient_after": self.after.as_dict(),
            "chains": [c.as_dict() for c in self.chains],
            "routes": {k: str(v) for k, v in self.k2_routes.items()},
            "b2": self.b2,
            "pg": self.pg,
            "assumptions": list(self.assumptions),
        }


def smooth(cfg: Configuration, chains: Sequence[ValidatedChain]) -> SurgeryReport:
    problems = check_disjoint(chains, cfg)
    if problems:
        raise SurgeryError("chains are not disjoint: " + "; ".join(problems))
    before = cfg.ambient
    contribs = []
    k2_formula = before.k2
    k2_disc = Fraction(before.k2)
    euler, sigma = before.euler, before.signature
    for k, ch in enumerate(chains):
        t = ch.ttype
        if t is None:
            raise SurgeryError(f"chain {ch.name or k} has no class T type")
        corr = k2_correction_via_discrepancies(ch.weights)
        contribs.append(ChainContribution(ch.name or f"#{k}", ch.weights, t, corr))
        k2_formula += len(ch.weights) - t.d + 1 if t.kind == "T" else 0
        k2_disc += corr
        euler += t.mu - len(ch.weights)
        sigma += len(ch.weights) - t.mu
    routes = {
        "formula": Fraction(k2_formula),
        "discrepancy": k2_disc,
        "topological": Fraction(3 * sigma + 2 * euler),
    }
    if len(set(routes.values())) != 1:
        raise RouteDisagreement(
            "K^2 routes disagree: " + ", ".join(f"{k}={v}" for k, v in routes.items())
        )
    after = AmbientInvariants(k2_formula, euler, sigma, before.chi, before.irregularity_assumed_zero)
    return SurgeryReport(before, tuple(contribs), routes, after)


def fixture_tier(script: ConstructionScript, run: ScriptRun) -> str:
    """``"B"`` when some chain weight comes out of a blow-up, else ``"A"``.

    Tier A declares chain curves directly at their final weights; tier B
    derives them from curves on the base surface through the blow-ups.
    """
    declared = {s.id: s.self_int for s in script.of_type(CurveStmt)}
    for members in run.chains.values():
        for cid in members:
            if cid not in declared or run.config.curves[cid].self_int != declared[cid]:
                return "B"
    return "A"


@dataclass
class FixtureReport:
    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)
    surgery: Optional[SurgeryReport] = None
    run: Optional[ScriptRun] = None
    tier: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values()) and not self.errors

    @property
    def n_blowups(self) -> int:
        return len(self.run.blowups) if self.run else 0

    @property
    def k2_expected(self) -> Optional[int]:
        e = self.run.expectations if self.run else None
        return e.k2 if e else None

    @property
    def k2_computed(self) -> Optional[int]:
        return self.surgery.after.k2 if self.surgery else None

    def as_dict(self) -> dict:
        out = {
            "schema": 1,
            "fixture": self.name,
            "tier": self.tier,
            "status": "pass" if self.passed else "fail",
            "blowups": self.n_blowups,
            "checks": {k: ("pass" if v else "fail") for k, v in self.checks.items()},
            "errors": list(self.errors),
            "notes": list(self.notes),
        }
        if self.run is not None:
            out["ambient_before"] = self.run.base.as_dict()
            out["ambient_surface"] = self.run.config.ambient.as_dict()
        if self.surgery is not None:
            s = self.surgery.as_dict()
            out["ambient_after"] = s["ambient_after"]
            out["chains"] = s["chains"]
            out["routes"] = s["routes"]
            out["b2"] = s["b2"]
            out["pg"] = s["pg"]
            out["assumptions"] = s["assumptions"]
        return out


def verify_run(run: ScriptRun, name: str = "", script: Optional[ConstructionScript] = None) -> FixtureReport:
    """Extract, check and smooth the chains of an executed script.

    Chain failures become failed checks rather than exceptions; only a K^2
    route disagreement propagates.
    """
    rep = FixtureReport(name=name, run=run)
    cfg = run.config
    if script is not None:
        rep.tier = fixture_tier(script, run)
    bad = validate(cfg)
    rep.checks["configuration valid"] = not bad
    rep.errors.extend(bad)

    chains = []
    for cname, members in run.chains.items():
        try:
            chains.append(extract_chain(cfg, members, cname))
            rep.checks[f"chain {cname} class T"] = True
        except ChainError as exc:
            rep.checks[f"chain {cname} class T"] = False
            rep.errors.append(str(exc))
    problems = check_disjoint(chains, cfg)
    rep.checks["chains disjoint"] = not problems
    rep.errors.extend(problems)
    if problems or len(chains) != len(run.chains):
        return rep

    rep.surgery = smooth(cfg, chains)
    after = rep.surgery.after
    rep.checks["K2 routes agree"] = rep.surgery.routes_agree
    rep.checks["Noether after smoothing"] = not after.violations()
    rep.checks["chi preserved"] = after.chi == cfg.ambient.chi

    exp = run.expectations
    if exp is None:
        rep.notes.append("no expect block")
        return rep
    for key, got in (("k2", after.k2), ("euler", after.euler), ("chi", after.chi)):
        want = getattr(exp, key)
        if want is not None:
            rep.checks[f"expected {key}"] = got == want
            if got != want:
                rep.errors.append(f"{key}: computed {got}, expected {want}")
    if exp.torsion is not None:
        group = " + ".join(f"Z/{n}" for n in exp.torsion) or "0"
        rep.notes.append(f"H1 torsion {group} is asserted by the fixture, not computed")
    return rep


def verify_fixture(script: ConstructionScript, name: str = "") -> FixtureReport:
    return verify_run(run_script(script), name, script)


def verify_path(path: Union[str, Path]) -> FixtureReport:
    """Parse and verify a fixture file.

    Parse errors propagate (``ScriptError``); configuration and blow-up errors
    are reported as a failed check.
    """
    path = Path(path)
    script = parse_script(path.read_bytes())
    try:
        return verify_fixture(script, path.stem)
    except (ConfigError, BlowupError) as exc:
        rep = FixtureReport(name=path.stem)
        rep.checks["script executes"] = False
        rep.errors.append(str(exc))
        return rep
