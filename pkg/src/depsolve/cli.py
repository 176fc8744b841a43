"""Command-line front end.

Subcommands: imply, closure, armstrong, check, noninteract, profile.
Exit codes for imply: 0 implied, 1 not implied, 2 unknown, 3 unsupported,
64 parse error. DEPSOLVE_BUDGET overrides the default search budgets.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import armstrong as armstrong_mod
from . import axioms, chase, dispatch, noninteract, parser, polyengine, profiler
from .core import FD, IA, IND, DependencySet, Implied, NotImplied, Unknown, Unsupported
from .errors import DepsolveError
from .parser import ParseFailure
from .semantics import Database, satisfies, violating_witness

EXIT_IMPLIED = 0
EXIT_NOT_IMPLIED = 1
EXIT_UNKNOWN = 2
EXIT_UNSUPPORTED = 3
EXIT_PARSE_ERROR = 64


def _budget(default: int = 10_000) -> int:
    raw = os.environ.get("DEPSOLVE_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _db_to_dict(db: Database) -> dict:
    return {
        name: [list(map(str, row)) for row in db.sorted_rows(name)]
        for name, _ in db.schema.relations
    }


def _witness_payload(verdict) -> tuple[str, object]:
    w = getattr(verdict, "witness", None)
    if w is None:
        return "none", None
    if isinstance(w, Database):
        return "counterexample", _db_to_dict(w)
    if isinstance(w, axioms.Deduction):
        return "deduction", w.pretty().splitlines()
    if isinstance(w, chase.ChaseTrace):
        return "chase_trace", json.loads(w.to_json())
    return "note", str(w)


def _load_spec(path: str) -> DependencySet:
    return parser.parse_spec(Path(path).read_text(encoding="utf-8"), file=path)


def cmd_imply(args) -> int:
    try:
        sigma = _load_spec(args.spec)
        query = parser.parse_dependency(args.query, sigma.schema)
    except (ParseFailure, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE_ERROR
    if args.engine == "derive":
        decision = _derive_decision(sigma, query, args.mode)
    else:
        decision = dispatch.decide_implication(
            sigma, query, mode=args.mode, engine=args.engine, budget=_budget(args.budget)
        )
    verdict = decision.verdict
    kind, witness = _witness_payload(verdict)
    name = {
        Implied: "implied",
        NotImplied: "not_implied",
        Unknown: "unknown",
        Unsupported: "unsupported",
    }[type(verdict)]
    payload = {
        "verdict": name,
        "mode": decision.mode,
        "engine": decision.engine,
        "query": str(query),
    }
    if isinstance(verdict, Unsupported):
        payload["reason"] = verdict.reason
    if args.explain or isinstance(verdict, NotImplied):
        payload["witness_kind"] = kind
        payload["witness"] = witness
    _emit(payload)
    return {
        "implied": EXIT_IMPLIED,
        "not_implied": EXIT_NOT_IMPLIED,
        "unknown": EXIT_UNKNOWN,
        "unsupported": EXIT_UNSUPPORTED,
    }[name]


def _derive_decision(sigma: DependencySet, query, mode: str):
    from .core import classify

    profile = classify(sigma, query)
    complete = True
    if not profile.has_fd:
        system = axioms.SYSTEM_IND_IA
    elif not profile.has_ind and profile.all_fds_unary and not profile.has_ia:
        system = axioms.SYSTEM_FD_IA
    elif profile.all_fds_unary and profile.all_inds_unary and not profile.multi_relational:
        system = (
            axioms.SYSTEM_UNARY_FINITE if mode == "finite" else axioms.SYSTEM_UNARY_UNRESTRICTED
        )
    elif not profile.has_ind:
        system = axioms.SYSTEM_FD_IA
        complete = False
    else:
        return dispatch.Decision(
            Unsupported(dispatch.FD_IND_WALL), "derive", mode
        )
    result = axioms.derive(sigma, query, system)
    if isinstance(result, axioms.Deduction):
        verdict = Implied(witness=result)
    elif isinstance(result, axioms.NotDerivable):
        verdict = (
            NotImplied(note="saturation completed without a derivation")
            if complete
            else Unknown(reason="not derivable, but this rule system is incomplete here")
        )
    else:
        verdict = Unknown(reason="derivation budget exhausted")
    return dispatch.Decision(verdict, "derive", mode)


def cmd_closure(args) -> int:
    try:
        sigma = _load_spec(args.spec)
    except (ParseFailure, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE_ERROR
    if args.kind == "fd":
        attrs = args.attrs.split(",") if args.attrs else []
        closure = polyengine.fd_closure(sigma.fds(), attrs)
        _emit({"kind": "fd", "attrs": sorted(attrs), "closure": sorted(closure)})
    elif args.kind == "ca":
        cc = chase.uind_ca_closure(sigma)
        _emit({"kind": "ca", "constants": sorted(cc.constants)})
    elif args.kind == "uind":
        cc = chase.uind_ca_closure(sigma)
        edges = sorted(
            f"{a} <= {b}" for a, targets in cc.adj.items() for b in targets
        )
        _emit({"kind": "uind", "constants": sorted(cc.constants), "edges": edges})
    elif args.kind == "alg1":
        result = polyengine.algorithm1(sigma.fds(), sigma.ias())
        _emit(
            {
                "kind": "alg1",
                "Z": sorted(result.constants),
                "iaStar": [
                    [sorted(ia.left), sorted(ia.right)] for ia in result.ia_star
                ],
            }
        )
    else:  # star
        closure = polyengine.build_star_closure(sigma, args.mode)
        _emit(
            {
                "kind": "star",
                "mode": args.mode,
                "Z": sorted(closure.constants),
                "iaStar": [
                    [sorted(ia.left), sorted(ia.right)] for ia in closure.ia_star
                ],
                "red_edges": sorted(f"{a}->{b}" for a, b in closure.graph.red),
                "black_edges": sorted(f"{a}->{b}" for a, b in closure.graph.black),
                "scc": dict(sorted(closure.graph.scc_number.items())),
            }
        )
    return 0


def cmd_armstrong(args) -> int:
    try:
        sigma = _load_spec(args.spec)
    except (ParseFailure, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE_ERROR
    try:
        if args.kind == "ufd-ia":
            report = armstrong_mod.armstrong_ufd_ia(sigma, arity_bound=args.arity_bound)
        elif args.kind == "star-finite":
            report = armstrong_mod.armstrong_star_finite(sigma, arity_bound=args.arity_bound)
        else:
            report = armstrong_mod.armstrong_ind_ia(sigma, arity_bound=args.arity_bound or 2)
    except DepsolveError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.out) if args.out else None
    written = []
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
        for name, attrs in report.database.schema.relations:
            path = outdir / f"{name}.csv"
            with path.open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(attrs)
                for row in report.database.sorted_rows(name):
                    writer.writerow([str(v) for v in row])
            written.append(str(path))
    _emit(
        {
            "checked_space": report.checked_space,
            "exact": report.exact,
            "violations": [
                {"dependency": str(d), "implied": e, "holds": a}
                for d, e, a in report.violations
            ],
            "rows": {n: len(report.database.rows(n)) for n, _ in sigma.schema.relations},
            "files": written,
        }
    )
    return 0 if report.exact else 1


def cmd_check(args) -> int:
    try:
        sigma = _load_spec(args.spec)
    except (ParseFailure, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE_ERROR
    tables = {}
    for item in args.data:
        if "=" not in item:
            print(f"expected rel=path, got {item}", file=sys.stderr)
            return EXIT_PARSE_ERROR
        rel, path = item.split("=", 1)
        name, attrs, rows = parser.load_csv(
            path, delimiter=args.delimiter, header=not args.no_header
        )
        order = sigma.schema.attributes(rel)
        if set(order) != set(attrs):
            print(
                f"{path}: columns {list(attrs)} do not match schema {rel}({', '.join(order)})",
                file=sys.stderr,
            )
            return EXIT_PARSE_ERROR
        idx = [attrs.index(a) for a in order]
        tables[rel] = [tuple(row[i] for i in idx) for row in rows]
    db = Database(sigma.schema, tables)
    violations = []
    for dep in sigma.deps:
        if not satisfies(db, dep):
            witness = violating_witness(db, dep)
            violations.append(
                {
                    "dependency": str(dep),
                    "witness": [list(map(str, t)) for t in witness] if witness else [],
                }
            )
    _emit({"violations": violations, "ok": not violations})
    return 1 if violations else 0


def cmd_noninteract(args) -> int:
    try:
        sigma = _load_spec(args.spec)
    except (ParseFailure, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE_ERROR
    report = noninteract.noninteract_report(sigma, args.mode)
    _emit(report.to_dict())
    return 0 if report.guaranteed else 1


def cmd_profile(args) -> int:
    try:
        relation = parser.load_csv(
            args.csv, delimiter=args.delimiter, header=not args.no_header
        )
    except (DepsolveError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE_ERROR
    config = profiler.MiningConfig(
        max_arity=args.max_arity,
        include_overlapping=args.overlapping,
        compute_ratios=args.ratios,
    )
    result = profiler.mine_ias(relation, config)
    name, attrs, _ = relation
    lines = [f"schema {name}({','.join(attrs)})"]
    lines.extend(str(ia) for ia in result.maximal)
    payload = result.to_dict()
    if args.ratios:
        payload["ratios"] = {
            f"{' '.join(sorted(x))} _|_ {' '.join(sorted(y))}": round(v, 6)
            for (x, y), v in sorted(result.ratios.items(), key=repr)
        }
    payload["dsl"] = lines
    _emit(payload)
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="depsolve",
        description="Implication, Armstrong samples, and profiling for FDs, INDs, and IAs",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("imply", help="decide whether the spec implies a dependency")
    p.add_argument("spec")
    p.add_argument("--query", required=True)
    p.add_argument("--mode", choices=["finite", "unrestricted"], default="finite")
    p.add_argument(
        "--engine",
        choices=["auto", "chase", "hgraph", "star", "graphchase", "derive"],
        default="auto",
    )
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_imply)

    p = sub.add_parser("closure", help="dump closure structures")
    p.add_argument("spec")
    p.add_argument("--kind", choices=["fd", "ca", "uind", "alg1", "star"], required=True)
    p.add_argument("--attrs", default="", help="comma separated, for --kind fd")
    p.add_argument("--mode", choices=["finite", "unrestricted"], default="finite")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("armstrong", help="construct and verify an Armstrong database")
    p.add_argument("spec")
    p.add_argument("--kind", choices=["ufd-ia", "star-finite", "ind-ia"], required=True)
    p.add_argument("--arity-bound", type=int, default=None)
    p.add_argument("--out", default=None, help="directory for one CSV per relation")
    p.set_defaults(func=cmd_armstrong)

    p = sub.add_parser("check", help="check CSV relations against a spec")
    p.add_argument("spec")
    p.add_argument("data", nargs="+", help="relation=path.csv")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("noninteract", help="non-interaction criteria report")
    p.add_argument("spec")
    p.add_argument("--mode", choices=["finite", "unrestricted"], default="finite")
    p.set_defaults(func=cmd_noninteract)

    p = sub.add_parser("profile", help="mine maximal independence atoms from a CSV")
    p.add_argument("csv")
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("--overlapping", action="store_true")
    p.add_argument("--ratios", action="store_true")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.set_defaults(func=cmd_profile)
    return top


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
