"""``qgsurgeon`` command line interface.

Exit status: 0 when every check passes, 1 when a check fails, 2 for usage
or input errors, 3 when the independent K^2 routes disagree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .blowup import BlowupError, run_script
from .chase import ChaseError, parse_system, solve
from .config import ConfigError, ScriptError, parse_script
from .lattice import LatticeError, discriminant_group, read_matrix, smith_normal_form
from .surgery import FixtureReport, RouteDisagreement, verify_path, verify_run
from .tsing import (
    ChainValueError,
    chain_gram,
    format_chain,
    generate_T,
    hj_expand,
    hj_value,
    parse_chain,
    recognize_T,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fixtures_dir() -> Path:
    return Path(str(resources.files("qgsurgeon") / "fixtures"))


def _color(text: str, ok: bool) -> str:
    if os.environ.get("QGS_COLOR") != "1":
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def _minus(n) -> str:
    s = str(n)
    return "−" + s[1:] if s.startswith("-") else s


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _read(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_bytes()


# ---------------------------------------------------------------- subcommands

def cmd_hj(args) -> int:
    raw = args.value
    try:
        if "/" in raw:
            num, _, den = raw.partition("/")
            f = Fraction(int(num), int(den))
            if f.denominator != int(den):
                raise UsageError(f"{raw} is not in lowest terms")
            chain = hj_expand(f)
        else:
            chain = parse_chain(raw)
            f = hj_value(chain)
    except (ValueError, ChainValueError) as exc:
        raise UsageError(str(exc)) from None
    _emit(args, {"p": f.numerator, "q": f.denominator, "chain": list(chain)},
          f"{f.numerator}/{f.denominator} = {format_chain(chain)}")
    return EXIT_OK


def _chain_arg(raw: str):
    try:
        return parse_chain(raw)
    except ChainValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_recognize(args) -> int:
    chain = _chain_arg(args.chain)
    t = recognize_T(chain)
    f = hj_value(chain)
    payload = {"chain": list(chain), "p": f.numerator, "q": f.denominator,
               "type": t.as_dict() if t else None}
    if t is None:
        _emit(args, payload, f"not class T: {format_chain(chain)} = {f.numerator}/{f.denominator}")
        return EXIT_FAIL
    if t.kind == "RDP":
        text = f"RDP A{t.length} deltaK2=0"
    else:
        text = f"T d={t.d} n={t.n} a={t.a} deltaK2={t.delta_k2}"
    _emit(args, payload, text)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.max_len < 1 or args.max_weight < 4:
        raise UsageError("need --max-len >= 1 and --max-weight >= 4")
    chains = generate_T(args.max_len, args.max_weight)
    if args.json or args.format == "json":
        rows = []
        for c in chains:
            t = recognize_T(c)
            rows.append({"chain": list(c), "d": t.d, "n": t.n, "a": t.a, "delta_k2": t.delta_k2})
        print(json.dumps({"max_len": args.max_len, "max_weight": args.max_weight,
                          "count": len(rows), "chains": rows}, indent=2))
    else:
        for c in chains:
            print(f"{format_chain(c)}  {recognize_T(c).label()}")
        print(f"{len(chains)} chains")
    return EXIT_OK


def cmd_snf(args) -> int:
    try:
        m = read_matrix(_read(args.matrix).decode())
    except LatticeError as exc:
        raise UsageError(str(exc)) from None
    u, d, v = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    text = "D = diag(" + ", ".join(map(str, diag)) + ")"
    _emit(args, {"U": u, "D": d, "V": v, "diagonal": diag}, text)
    return EXIT_OK


def cmd_disc(args) -> int:
    chain = _chain_arg(args.chain)
    group = discriminant_group(chain_gram(chain))
    t = recognize_T(chain)
    text = f"{format_chain(chain)}: {group} (order {group.order})"
    if t is not None and t.kind == "T":
        text += f", d*n^2 = {t.order}"
    _emit(args, {"chain": list(chain), "group": group.as_dict(), "order": group.order,
                 "cyclic": group.is_cyclic}, text)
    return EXIT_OK


def cmd_chase(args) -> int:
    try:
        system = parse_system(_read(args.file).decode())
    except ChaseError as exc:
        raise UsageError(str(exc)) from None
    result = solve(system)
    lines = [f"{name} = {val}    (sequence #{idx})" for name, val, idx in result.derived]
    lines += [f"unknown: {u}" for u in result.unknowns]
    lines += [_color(f"CONTRADICTION {c}", False) for c in result.contradictions]
    if not lines:
        lines = ["nothing to derive"]
    _emit(args, {"schema": 1, **result.as_dict()}, "\n".join(lines))
    return EXIT_OK if result.ok else EXIT_FAIL


def _verify(path: Path) -> FixtureReport:
    try:
        return verify_path(path)
    except ScriptError as exc:
        rep = FixtureReport(name=path.stem)
        rep.checks["script parses"] = False
        rep.errors.append(str(exc))
        return rep


def _report_text(rep: FixtureReport) -> str:
    lines = [f"{rep.name}: " + _color("PASS" if rep.passed else "FAIL", rep.passed)]
    for name, ok in rep.checks.items():
        lines.append(f"  [{'ok' if ok else 'FAIL'}] {name}")
    if rep.surgery is not None:
        routes = ", ".join(f"{k}={v}" for k, v in rep.surgery.k2_routes.items())
        lines.append(f"  K2 routes: {routes}")
    for e in rep.errors:
        lines.append(f"  error: {e}")
    for n in rep.notes:
        lines.append(f"  note: {n}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    path = Path(args.file)
    if not path.is_file():
        raise UsageError(f"no such file: {args.file}")
    try:
        rep = verify_path(path)
    except ScriptError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, rep.as_dict(), _report_text(rep))
    return EXIT_OK if rep.passed else EXIT_FAIL


def run_corpus(directory: Path) -> list[FixtureReport]:
    return [_verify(p) for p in sorted(directory.glob("*.qgs"))]


def cmd_corpus(args) -> int:
    directory = Path(args.dir) if args.dir else fixtures_dir()
    if not directory.is_dir():
        raise UsageError(f"no such directory: {directory}")
    reports = run_corpus(directory)
    if not reports:
        raise UsageError(f"no .qgs fixtures in {directory}")
    passed = sum(r.passed for r in reports)
    if args.json:
        print(json.dumps({"schema": 1, "passed": passed, "total": len(reports),
                          "fixtures": [r.as_dict() for r in reports]}, indent=2))
    else:
        head = f"{'fixture':<10} {'tier':>4} {'k2(Z)':>6} {'blowups':>7} {'sum dK2':>7} {'K2':>4} {'expect':>6}  status"
        print(head)
        print("-" * len(head))
        for r in reports:
            z = r.run.config.ambient.k2 if r.run else "-"
            total = sum(c.delta_k2 for c in r.surgery.chains) if r.surgery else "-"
            k2 = r.k2_computed if r.k2_computed is not None else "-"
            exp = r.k2_expected if r.k2_expected is not None else "-"
            status = _color("pass" if r.passed else "FAIL", r.passed)
            print(f"{r.name:<10} {r.tier or '-':>4} {z!s:>6} {r.n_blowups:>7} {total!s:>7} {k2!s:>4} {exp!s:>6}  {status}")
        print(f"{passed}/{len(reports)} pass")
        for r in reports:
            for e in r.errors:
                print(f"{r.name}: {e}")
    return EXIT_OK if passed == len(reports) else EXIT_FAIL


def describe(script_text: bytes | str, name: str = "") -> str:
    """Readable account of a construction: base, blow-ups, chains, result."""
    script = parse_script(script_text)
    b = script.base
    lines = []
    title = f"{name}: " if name else ""
    lines.append(f"{title}base surface {script.base_tag}: K²={_minus(b.k2)}, e={b.euler}, "
                 f"σ={_minus(b.signature)}, χ={b.chi}")
    if not script.statements:
        return "\n".join(lines)
    run = run_script(script)
    if run.blowups:
        lines.append(f"blow-ups ({len(run.blowups)}):")
        for i, rec in enumerate(run.blowups, 1):
            where = ", ".join(f"{c}:{m}" for c, m in rec.incidences) or "free point"
            a = rec.ambient_after
            lines.append(f"  {i:>2}. {rec.point} ({where}) -> {rec.exceptional}   "
                         f"K²={_minus(a.k2)}, e={a.euler}, σ={_minus(a.signature)}")
    z = run.config.ambient
    lines.append(f"Z: K²={_minus(z.k2)}, e={z.euler}, σ={_minus(z.signature)}, χ={z.chi}")
    rep = verify_run(run, name, script)
    if run.chains:
        lines.append(f"chains ({len(run.chains)}):")
        contrib = {c.name: c for c in rep.surgery.chains} if rep.surgery else {}
        for cname, members in run.chains.items():
            weights = [-run.config.curves[m].self_int for m in members]
            c = contrib.get(cname)
            if c is None:
                lines.append(f"  {cname} {format_chain(weights)}  not contractible")
                continue
            t = c.ttype
            lines.append(f"  {cname} {format_chain(weights)}  {t.label()}  "
                         f"ΔK²=+{t.delta_k2}  Δe={_minus(t.delta_e)}  Δσ=+{t.delta_sigma}")
    for e in rep.errors:
        lines.append(f"  problem: {e}")
    if rep.surgery is not None:
        a = rep.surgery.after
        lines.append(f"X_t: K²={_minus(a.k2)}, e={a.euler}, σ={_minus(a.signature)}, "
                     f"χ={a.chi}, p_g={rep.surgery.pg} (q=0 assumed)")
    return "\n".join(lines)


def cmd_describe(args) -> int:
    data = _read(args.file)
    try:
        text = describe(data, Path(args.file).stem)
    except (ScriptError, ConfigError, BlowupError) as exc:
        raise UsageError(str(exc)) from None
    _emit(args, {"schema": 1, "fixture": Path(args.file).stem, "narrative": text.splitlines()}, text)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a structured JSON report")

    parser = argparse.ArgumentParser(
        prog="qgsurgeon",
        description="Verify the arithmetic of rational blow-down / Q-Gorenstein smoothing constructions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="verify one fixture")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("corpus", parents=[common], help="verify every .qgs file in a directory")
    p.add_argument("dir", nargs="?", help="defaults to the bundled fixtures")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("hj", parents=[common], help="expand p/q, or evaluate a chain")
    p.add_argument("value", help="p/q such as 121/43, or weights such as 3,6,2,3,2")
    p.set_defaults(func=cmd_hj)

    p = sub.add_parser("recognize", parents=[common], help="class T type of a chain")
    p.add_argument("chain")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("enumerate", parents=[common], help="list class T chains within bounds")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--max-weight", type=int, default=10)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form of a matrix file")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("disc", parents=[common], help="discriminant group of a chain")
    p.add_argument("chain")
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("chase", parents=[common], help="solve an exact-sequence dimension system")
    p.add_argument("file")
    p.set_defaults(func=cmd_chase)

    p = sub.add_parser("describe", parents=[common], help="narrate a construction")
    p.add_argument("file")
    p.set_defaults(func=cmd_describe)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qgsurgeon {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RouteDisagreement as exc:
        print(f"qgsurgeon {args.command}: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
