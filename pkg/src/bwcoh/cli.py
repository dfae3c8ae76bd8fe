"""Command-line driver: ``bwcoh {bw,group,diagram,spectral,psi,verify}``.

Exit codes: 0 on success, 1 when a reported property fails, 2 on input
errors (the message names the file and the offending entity).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import chaincomplex as cc
from . import diagramcoh as dg
from . import fincat as fc
from . import groupcoh as gc
from . import natsys as ns
from . import psiring as ps
from .exactlinalg import LinAlgError, ring_from_tag
from .verify import MODULES, run_verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULT_CAPS = {
    **dg.DEFAULT_CAPS,
    "category_morphisms": fc.DEFAULT_MAX_MORPHISMS,
    "bar_tuples": gc.DEFAULT_MAX_BAR_TUPLES,
    "enum_bound": ps.DEFAULT_ENUM_BOUND,
    "degree_cap": ps.DEFAULT_DEGREE_CAP,
}

INPUT_ERRORS = (
    fc.CategoryError,
    ns.NaturalityViolation,
    gc.GroupError,
    gc.ModuleError,
    gc.CapExceeded,
    dg.DiagramError,
    dg.ConventionMismatch,
    dg.CapExceeded,
    ps.PsiError,
    LinAlgError,
    cc.NotBounded,
    KeyError,
    TypeError,
    ValueError,
)


class InputError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# helpers


def load_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(path, f"cannot read file ({e.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(path, f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def parse(path: str, fn, *args):
    """Run a loader, attaching the file name to any validation error."""
    try:
        return fn(*args)
    except INPUT_ERRORS as e:
        raise InputError(path, _describe(e)) from None


def _describe(e: Exception) -> str:
    msg = str(e) if not isinstance(e, KeyError) else f"missing field {e.args[0]!r}"
    return f"{type(e).__name__}: {msg}"


def parse_caps(items: Sequence[str] | None) -> dict:
    caps = dict(DEFAULT_CAPS)
    changed = {}
    for item in items or []:
        for part in item.split(","):
            key, sep, val = part.partition("=")
            key = key.strip()
            if not sep or key not in DEFAULT_CAPS:
                raise InputError("--caps", f"unknown cap {part!r}; known caps: {', '.join(sorted(DEFAULT_CAPS))}")
            try:
                changed[key] = int(val)
            except ValueError:
                raise InputError("--caps", f"cap {key!r} needs an integer value") from None
    if changed:
        print(
            "warning: overriding default caps: " + ", ".join(f"{k}={v}" for k, v in sorted(changed.items())),
            file=sys.stderr,
        )
    caps.update(changed)
    return caps


def emit(report: dict, text: str, fmt: str):
    if fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def format_table(table: list[list[int]], title: str) -> str:
    """Grid with q increasing upwards and p to the right; '.' marks cells
    outside the computed range."""
    if not table:
        return f"{title}: (empty)"
    P = len(table)
    Q = max(len(col) for col in table)
    width = max(2, max((len(str(x)) for col in table for x in col), default=1))
    lines = [f"{title} (rows q, columns p)"]
    for q in range(Q - 1, -1, -1):
        cells = [str(table[p][q]) if q < len(table[p]) else "." for p in range(P)]
        lines.append(f"q={q:<2}| " + " ".join(c.rjust(width) for c in cells))
    lines.append("     " + "-" * (P * (width + 1)))
    lines.append("   p= " + " ".join(str(p).rjust(width) for p in range(P)))
    return "\n".join(lines)


def clip(table: list[list[int]], pmax: int | None, qmax: int | None) -> list[list[int]]:
    cols = table if pmax is None else table[: pmax + 1]
    return [col if qmax is None else col[: qmax + 1] for col in cols]


def ring_label(tag: str) -> str:
    t = tag.strip().lower()
    return {"z": "Z", "q": "Q"}.get(t, t.upper())


def groups_json(H) -> list[dict]:
    return [{"degree": n, "group": h.to_json(), "text": str(h)} for n, h in enumerate(H)]


def groups_text(H, label: str = "H") -> str:
    return "\n".join(f"{label}^{n} = {h}" for n, h in enumerate(H))


# ---------------------------------------------------------------------------
# commands


def cmd_bw(args) -> int:
    ring = ring_from_tag(args.ring)
    caps = parse_caps(args.caps)
    cat_data = load_json(args.category)
    I = parse(args.category, fc.category_from_json, cat_data, caps["category_morphisms"])
    sys_data = load_json(args.system)
    D = parse(args.system, ns.natural_system_from_json, I, ring, sys_data)
    H = parse(args.system, ns.bw_cohomology, D, args.nmax)
    report = {"command": "bw", "ring": args.ring, "n_max": args.nmax, "cohomology": groups_json(H)}
    text = f"Baues-Wirsching cohomology over {ring_label(args.ring)}\n" + groups_text(H)
    emit(report, text, args.format)
    return EXIT_OK


def _load_group_bundle(path: str, ring):
    data = load_json(path)

    def build():
        G = gc.group_from_json(data["group"] if "group" in data else data)
        M = gc.module_from_json(data.get("module", {"dim": 1}), G, ring)
        return G, M

    return parse(path, build)


def cmd_group(args) -> int:
    ring = ring_from_tag(args.ring)
    caps = parse_caps(args.caps)
    G, M = _load_group_bundle(args.file, ring)
    H = parse(args.file, gc.group_cohomology, G, M, args.nmax, caps["bar_tuples"])
    report = {
        "command": "group",
        "ring": args.ring,
        "n_max": args.nmax,
        "group_order": G.order,
        "module_dim": M.dim,
        "cohomology": groups_json(H),
    }
    text = f"group cohomology of a group of order {G.order} with coefficients of rank {M.dim} over {ring_label(args.ring)}\n"
    emit(report, text + groups_text(H), args.format)
    return EXIT_OK


def _diagram_report(args, A, M, caps, path) -> tuple[dict, str, bool]:
    rep = parse(path, dg.local_to_global, A, M, args.nmax, args.convention, "ranks", caps)
    H = parse(path, dg.diagram_cohomology, A, M, args.nmax, args.convention, caps)
    e2, einf, e2bw = (clip(t, args.pmax, args.qmax) for t in (rep.e2, rep.einf, rep.e2_bw))
    report = {
        "command": "diagram",
        "ring": args.ring,
        "convention": args.convention,
        "n_max": args.nmax,
        "cohomology": groups_json(H),
        "e2": e2,
        "e2_local_systems": e2bw,
        "einf": einf,
        "r_max": rep.r_max,
        "total_dims": rep.total,
        "e2_matches": rep.e2_matches,
        "converges": rep.converges,
        "verdict": "PASS" if rep.ok else "FAIL",
    }
    diag = [sum(rep.einf[p][n - p] for p in range(n + 1)) for n in range(args.nmax + 1)]
    lines = [
        f"diagram cohomology over {ring_label(args.ring)}, {args.convention} convention",
        groups_text(H),
        "",
        format_table(e2, "E_2"),
        "",
        format_table(einf, "E_inf"),
        "",
        f"E_2 equals BW cohomology of the local systems: {'yes' if rep.e2_matches else 'no'}",
        f"pages are stable from E_{rep.r_max} on",
        "convergence: " + ("PASS" if rep.converges else "FAIL") + f" (E_inf diagonals {diag}, dim H^n(Tot) {rep.total})",
        f"verdict: {report['verdict']}",
    ]
    return report, "\n".join(lines), rep.ok


def _require_convention(args):
    if args.convention is None:
        raise InputError("--convention", "spectral output requires --convention plain|cegarra")


def cmd_diagram(args) -> int:
    _require_convention(args)
    ring = ring_from_tag(args.ring)
    caps = parse_caps(args.caps)
    data = load_json(args.bundle)
    A, M = parse(args.bundle, dg.diagram_from_json, data, ring, caps["category_morphisms"])
    report, text, ok = _diagram_report(args, A, M, caps, args.bundle)
    emit(report, text, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spectral(args) -> int:
    """Spectral sequence of a double complex file, or of the bicomplex of a
    diagram bundle."""
    _require_convention(args)
    ring = ring_from_tag(args.ring)
    caps = parse_caps(args.caps)
    data = load_json(args.file)
    if isinstance(data, dict) and "index" in data:
        A, M = parse(args.file, dg.diagram_from_json, data, ring, caps["category_morphisms"])
        report, text, ok = _diagram_report(args, A, M, caps, args.file)
        report["command"] = "spectral"
        emit(report, text, args.format)
        return EXIT_OK if ok else EXIT_FAIL
    D = parse(args.file, cc.double_complex_from_json, data, ring)
    S = parse(args.file, cc.spectral_sequence, D)
    pages = {str(r): clip(S.page(r), args.pmax, args.qmax) for r in range(S.r_max + 1)}
    report = {
        "command": "spectral",
        "ring": args.ring,
        "convention": args.convention,
        "pages": pages,
        "einf": clip(S.einf, args.pmax, args.qmax),
        "r_max": S.r_max,
        "total_dims": list(S.total),
        "converges": S.converges(),
        "verdict": "PASS" if S.converges() else "FAIL",
    }
    parts = [f"spectral sequence of a double complex over {ring_label(args.ring)} ({args.convention} convention recorded)"]
    for r in range(S.r_max + 1):
        parts += ["", format_table(pages[str(r)], f"E_{r}")]
    parts += ["", format_table(report["einf"], "E_inf"), "", f"dim H^n(Tot) = {list(S.total)}"]
    parts.append(f"convergence: {report['verdict']}")
    emit(report, "\n".join(parts), args.format)
    return EXIT_OK if S.converges() else EXIT_FAIL


def _load_psi(path: str, check: bool):
    data = load_json(path)

    def build():
        R = ps.psi_ring_from_json(data, check=check)
        M = ps.module_from_json(R, data.get("module", "regular"), check=check)
        return R, M

    return data, parse(path, build)


def cmd_psi(args) -> int:
    caps = parse_caps(args.caps)
    bound = caps["enum_bound"]
    path = args.file
    data = load_json(path)
    if args.action in ("check", "free") and "symbolic" in data:
        return _psi_free(args, path, data, caps)
    if args.action == "free":
        raise InputError(path, "the free subcommand needs a 'symbolic' section")
    if args.action == "check":
        _, (R, P) = _load_psi(path, check=False)
        ring_res = [r.to_json() for r in R.check_axioms()]
        mod_res = [r.to_json() for r in P.check_axioms()]
        ok = all(r["verdict"] == "PASS" for r in ring_res + mod_res)
        report = {"command": "psi check", "ring_axioms": ring_res, "module_axioms": mod_res, "verdict": "PASS" if ok else "FAIL"}
        lines = [f"ψ-ring of order {R.size} acted on by a monoid of order {R.monoid.order}"]
        for label, res in (("ring", ring_res), ("module", mod_res)):
            for r in res:
                lines.append(f"{label} {r['axiom']}: {r['verdict']}" + (f"  {r['witness']}" if r["witness"] else ""))
        lines.append(f"verdict: {report['verdict']}")
        emit(report, "\n".join(lines), args.format)
        return EXIT_OK if ok else EXIT_FAIL
    _, (R, P) = _load_psi(path, check=True)
    ring, mod = R.ring, P.module
    if args.action == "derivations":
        ders = parse(path, ps.psi_derivations, P, bound)
        listing = [{ring.name(x): mod.name(v) for x, v in enumerate(d)} for d in ders]
        report = {"command": "psi derivations", "count": len(ders), "derivations": listing}
        lines = [f"{len(ders)} ψ-derivation(s)"]
        lines += ["  " + ", ".join(f"d({k}) = {v}" for k, v in d.items()) for d in listing]
        emit(report, "\n".join(lines), args.format)
        return EXIT_OK
    if args.action == "sections":
        rep = parse(path, ps.pair_sections_with_derivations, P, bound)
        report = {"command": "psi sections", **rep.to_json(P)}
        lines = [f"{len(rep.sections)} section(s), {len(rep.derivations)} ψ-derivation(s)"]
        for pair in report["pairs"]:
            sec = ", ".join(f"σ({k}) = {v}" for k, v in pair["section"].items())
            der = ", ".join(f"d({k}) = {v}" for k, v in pair["derivation"].items())
            lines.append(f"  {sec}\n    pairs with {der}")
        lines.append(f"pairing σ(x) = (x, d(x)) is a bijection: {report['verdict']}")
        emit(report, "\n".join(lines), args.format)
        return EXIT_OK if rep.ok else EXIT_FAIL
    if args.action == "bw":
        D = parse(path, ps.psi_derivation_system, P)
        H = parse(path, ns.bw_cohomology, D, args.nmax)
        count = len(parse(path, ps.psi_derivations, P, bound))
        p = D.ring.p
        ok = p ** H[0].rank == count
        report = {
            "command": "psi bw",
            "n_max": args.nmax,
            "ring": f"f{p}",
            "dims": {D.base.morphisms[f]: D.dims[f] for f in range(D.base.n_morphisms)},
            "cohomology": groups_json(H),
            "psi_derivations": count,
            "h0_matches_psi_derivations": ok,
            "verdict": "PASS" if ok else "FAIL",
        }
        lines = ["BW cohomology of the derivation system f ↦ Der(R, M^f)", groups_text(H)]
        lines.append(f"H^0 has {p ** H[0].rank} elements; ψ-derivations counted directly: {count} ({report['verdict']})")
        emit(report, "\n".join(lines), args.format)
        return EXIT_OK if ok else EXIT_FAIL
    raise InputError(path, f"unknown psi action {args.action!r}")


def _psi_free(args, path, data, caps) -> int:
    F = parse(path, ps.free_psi_ring_from_json, data)
    F.degree_cap = min(F.degree_cap, caps["degree_cap"])
    res = [r.to_json() for r in F.check_axioms()]
    ok = all(r["verdict"] == "PASS" for r in res)
    report = {"command": f"psi {args.action}", "free_ring": F.to_json(), "axioms": res, "verdict": "PASS" if ok else "FAIL"}
    lines = [f"free ψ-ring on {', '.join(F.generators)} over a monoid of order {F.monoid.order}"]
    lines.append("variables: " + ", ".join(F.var_name(v) for v in range(len(F.variables))))
    for m, e in enumerate(F.monoid.elements):
        images = ", ".join(f"{F.var_name(v)} ↦ {F.fmt(F.psi(m, F._v(v)))}" for v in range(len(F.variables)))
        lines.append(f"Ψ^{e}: {images}")
    for r in res:
        lines.append(f"{r['axiom']}: {r['verdict']}" + (f"  {r['witness']}" if r["witness"] else ""))
    lines.append(f"verdict: {report['verdict']}")
    emit(report, "\n".join(lines), args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.scope not in ("all",) + MODULES:
        raise InputError("verify", f"unknown scope {args.scope!r}; choose all or one of {', '.join(MODULES)}")
    progress = (lambda name: print(f"running {name}", file=sys.stderr)) if args.progress else None
    rep = run_verify(args.scope, args.seed, progress)
    emit(rep.to_json(), rep.to_text(), args.format)
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default="f2", help="coefficients: z, q or f<p> (default f2)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--caps", action="append", metavar="KEY=VALUE", help="override a size cap (repeatable)")
    degrees = argparse.ArgumentParser(add_help=False)
    degrees.add_argument("--nmax", type=int, default=3, help="highest cohomological degree (default 3)")
    spectral = argparse.ArgumentParser(add_help=False)
    spectral.add_argument("--pmax", type=int, default=None, help="largest p shown in tables")
    spectral.add_argument("--qmax", type=int, default=None, help="largest q shown in tables")
    spectral.add_argument("--convention", choices=dg.CONVENTIONS, default=None, help="required for spectral output")

    p = argparse.ArgumentParser(prog="bwcoh", description="Baues-Wirsching and diagram cohomology at desk scale.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bw", parents=[common, degrees], help="BW cohomology of a category with a natural system")
    s.add_argument("category")
    s.add_argument("system")
    s.set_defaults(func=cmd_bw)

    s = sub.add_parser("group", parents=[common, degrees], help="group cohomology from the bar complex")
    s.add_argument("file")
    s.set_defaults(func=cmd_group)

    s = sub.add_parser("diagram", parents=[common, degrees, spectral], help="cohomology of a diagram of groups")
    s.add_argument("bundle")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("spectral", parents=[common, degrees, spectral], help="spectral sequence of a double complex")
    s.add_argument("file")
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("psi", parents=[common, degrees], help="ψ-rings: axioms, derivations, sections")
    s.add_argument("action", choices=("check", "derivations", "sections", "free", "bw"))
    s.add_argument("file")
    s.set_defaults(func=cmd_psi)

    s = sub.add_parser("verify", parents=[common], help="run the property suite")
    s.add_argument("scope", nargs="?", default="all", help=f"all or one of: {', '.join(MODULES)}")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--progress", action="store_true", help="print property names to stderr")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if hasattr(args, "ring"):
            try:
                ring_from_tag(args.ring)
            except ValueError as e:
                raise InputError("--ring", str(e)) from None
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
