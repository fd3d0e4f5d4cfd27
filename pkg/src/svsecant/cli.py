"""Command-line front end.

Every command builds one JSON-able dict; ``--json`` prints it with sorted
keys, otherwise a short text rendering of the same object is printed.

Exit codes: 0 ok, 1 usage error, 2 disagreement or failed identity,
3 budget exceeded.
"""
from __future__ import annotations

import argparse
import fnmatch
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .classify import SMOOTH, cross_check, expected_tag
from .cumulants import (
    DisconnectedComplex,
    SymbolicBudgetExceeded,
    binomial_vanishes,
    parse_complex,
    sv_complex,
    toric_binomials,
    verify_reparametrization,
    verify_secant_identity,
)
from .normality import check_lattice_saturation, check_normality
from .polytope import InstanceTooLarge
from .segre_veronese import (
    DEFAULT_MAX_POINTS,
    SVParams,
    build_polytope,
    cross_check_facets,
    expected_point_count,
)
from .singular import singular_report

EXIT_OK, EXIT_USAGE, EXIT_DISAGREE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return vals


def _params(args) -> SVParams:
    if args.a is None or args.b is None:
        raise UsageError("both --a and --b are required")
    if len(args.a) != len(args.b):
        raise UsageError("--a and --b must have the same length")
    return SVParams(args.a, args.b)


def _polytope(p: SVParams, args):
    return build_polytope(p, args.max_points)


# -- single-instance commands ---------------------------------------------------

def _singular_section(p, P, status) -> dict:
    if P.dim < 1:
        return {"count": 0, "components": [], "expected": None, "agree": None}
    s = singular_report(p, P, status == SMOOTH)
    return {
        "count": s["n_components"],
        "components": s["components"],
        "expected": s["expected"],
        "agree": s["agree"],
    }


def cmd_classify(args) -> tuple[dict, int]:
    p = _params(args)
    P = _polytope(p, args)
    facets = cross_check_facets(p, P)
    c = cross_check(p, P)
    sing = _singular_section(p, P, c.status)
    out = {
        "params": p.as_dict(),
        "dim_case": facets["expected"]["dim_case"],
        "facets": facets,
        "gorenstein": c.as_dict(),
        "singular": sing,
    }
    ok = facets["agree"] and c.agree and sing["agree"] is not False
    return out, EXIT_OK if ok else EXIT_DISAGREE


def cmd_facets(args) -> tuple[dict, int]:
    p = _params(args)
    out = cross_check_facets(p, _polytope(p, args))
    out["params"] = p.as_dict()
    return out, EXIT_OK if out["agree"] else EXIT_DISAGREE


def cmd_singular(args) -> tuple[dict, int]:
    p = _params(args)
    P = _polytope(p, args)
    if P.dim < 1:
        return {"params": p.as_dict(), "n_components": 0, "components": [], "note": "polytope of dimension < 1"}, EXIT_OK
    status = cross_check(p, P).status
    out = singular_report(p, P, status == SMOOTH)
    return out, EXIT_OK if out["agree"] else EXIT_DISAGREE


def cmd_normality(args) -> tuple[dict, int]:
    p = _params(args)
    P = _polytope(p, args)
    if len(P.points) == 0:
        return {"params": p.as_dict(), "empty": True}, EXIT_OK
    out = check_normality(P, s_max=args.smax)
    out["lattice"] = check_lattice_saturation(P)
    out["params"] = p.as_dict()
    out["s_max"] = args.smax
    return out, EXIT_OK if out["normal_up_to"] == args.smax else EXIT_DISAGREE


def _complex(args):
    if bool(args.file) == bool(args.sv):
        raise UsageError("give exactly one of --file or --sv")
    if args.file:
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            raise UsageError(str(exc))
        return parse_complex(text), {"file": args.file}
    a, b = (_int_list(x) for x in args.sv)
    if len(a) != len(b):
        raise UsageError("--sv needs lists of equal length")
    p = SVParams(a, b)
    return sv_complex(p), {"sv": p.as_dict()}


def _binomial_section(cx, bound: int) -> list[dict]:
    return [
        {"binomial": str(b), "degree": b.degree, "vanishes": binomial_vanishes(cx, b)}
        for b in toric_binomials(cx, bound)
    ]


def cmd_cumulants(args) -> tuple[dict, int]:
    cx, source = _complex(args)
    ok, residuals = verify_secant_identity(cx)
    rep = verify_reparametrization(cx)
    out = {
        "source": source,
        "n_simplices": len(cx.simplices) - 1,
        "secant_identity": {
            "ok": ok,
            "nonzero": sorted(cx.name(s) for s, r in residuals.items() if not r.is_zero()),
        },
        "reparametrization": {
            "ok": rep["ok"],
            "convention": rep["convention"],
            "conventions_vanishing": rep["conventions_vanishing"],
        },
    }
    good = ok and rep["ok"]
    if args.degree_bound:
        out["binomials"] = _binomial_section(cx, args.degree_bound)
        good = good and all(b["vanishes"] for b in out["binomials"])
    return out, EXIT_OK if good else EXIT_DISAGREE


def cmd_binomials(args) -> tuple[dict, int]:
    cx, source = _complex(args)
    bound = args.degree_bound or 4
    out = {"source": source, "degree_bound": bound, "binomials": _binomial_section(cx, bound)}
    return out, EXIT_OK if all(b["vanishes"] for b in out["binomials"]) else EXIT_DISAGREE


# -- scan -----------------------------------------------------------------------

def grid(k_max: int, a_max: int, b_max: int) -> list[SVParams]:
    """Canonical parameter tuples with ``k <= k_max``, ``a_i <= a_max``, ``b_i <= b_max``."""
    pairs = [(a, b) for a in range(1, a_max + 1) for b in range(1, b_max + 1)]
    out = []
    for k in range(1, k_max + 1):
        for combo in itertools.combinations_with_replacement(pairs, k):
            out.append(SVParams([c[0] for c in combo], [c[1] for c in combo]))
    return out


def scan_instance(p: SVParams, max_points: Optional[int] = DEFAULT_MAX_POINTS) -> dict:
    """Facet, classification and singular-locus checks for one instance."""
    row = {"params": str(p), "a": list(p.a), "b": list(p.b), "tag": expected_tag(p)}
    try:
        P = build_polytope(p, max_points)
    except InstanceTooLarge:
        row.update(skipped=True, points=expected_point_count(p))
        return row
    f = cross_check_facets(p, P)
    c = cross_check(p, P)
    row.update(
        skipped=False,
        points=len(P.points),
        dim=P.dim,
        facets_agree=f["agree"],
        status=c.status,
        beta=c.beta_json(),
        class_agree=c.agree,
    )
    if P.dim >= 1:
        s = singular_report(p, P, c.status == SMOOTH)
        row.update(singular=s["n_components"], singular_expected=s["expected"], singular_agree=s["agree"])
    else:
        row.update(singular=0, singular_expected=None, singular_agree=None)
    row["agree"] = bool(f["agree"] and c.agree and row["singular_agree"] is not False)
    return row


def _scan_worker(item):
    a, b, max_points = item
    return scan_instance(SVParams(a, b), max_points)


def cmd_scan(args) -> tuple[dict, int]:
    if args.k_max > 5:
        raise UsageError("--k-max is limited to 5")
    params = grid(args.k_max, args.a_max, args.b_max)
    if args.only_tags:
        params = [p for p in params if fnmatch.fnmatchcase(expected_tag(p) or "", args.only_tags)]
    items = [(p.a, p.b, args.max_points) for p in params]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_scan_worker, items, chunksize=8))
    else:
        rows = [_scan_worker(it) for it in items]
    checked = [r for r in rows if not r["skipped"]]
    bad = [r["params"] for r in checked if not r["agree"]]
    out = {
        "rows": rows,
        "summary": {
            "instances": len(checked),
            "skipped": [r["params"] for r in rows if r["skipped"]],
            "disagreements": len(bad),
            "disagreeing": bad,
        },
    }
    return out, EXIT_OK if not bad else EXIT_DISAGREE


# -- rendering --------------------------------------------------------------------

def _render(command: str, out: dict) -> str:
    if command == "scan":
        lines = [f"{'params':<34} {'tag':<5} {'status':<17} {'sing':>4} {'exp':>4}  ok"]
        for r in out["rows"]:
            if r["skipped"]:
                lines.append(f"{r['params']:<34} skipped ({r['points']} points)")
                continue
            exp = "-" if r["singular_expected"] is None else r["singular_expected"]
            lines.append(
                f"{r['params']:<34} {r['tag'] or '-':<5} {r['status']:<17} "
                f"{r['singular']:>4} {exp:>4}  {'yes' if r['agree'] else 'NO'}"
            )
        s = out["summary"]
        lines.append(f"instances {s['instances']}, skipped {len(s['skipped'])}, disagreements {s['disagreements']}")
        return "\n".join(lines)
    if command == "classify":
        g, s = out["gorenstein"], out["singular"]
        return "\n".join([
            f"a={out['params']['a']} b={out['params']['b']}  case {out['dim_case']}",
            f"facets: {' '.join(out['facets']['computed']['facets']) or '(none)'}"
            f"  [{'agree' if out['facets']['agree'] else 'DISAGREE'}]",
            f"status: {g['status']}  beta: {g['beta']}  tag: {g['tag']}  "
            f"[{'agree' if g['agree'] else 'DISAGREE'}]",
            f"singular components: {s['count']} (expected {s['expected']})",
        ] + [f"  {c['kind']}{tuple(c['indices'])}: {c.get('description')}" for c in s["components"]])
    return json.dumps(out, sort_keys=True, indent=2)


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="svsecant", description="Lattice polytope checks for secants of Segre-Veronese varieties.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance(sp):
        sp.add_argument("--a", type=_int_list, help="degrees, e.g. 1,2,3")
        sp.add_argument("--b", type=_int_list, help="dimensions, e.g. 1,1,1")

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print JSON with sorted keys")
        sp.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS, help="lattice point budget")

    for name, fn in (("classify", cmd_classify), ("facets", cmd_facets), ("singular", cmd_singular)):
        sp = sub.add_parser(name)
        instance(sp)
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("normality")
    instance(sp)
    common(sp)
    sp.add_argument("--smax", type=int, default=3)
    sp.set_defaults(func=cmd_normality)

    sp = sub.add_parser("scan")
    common(sp)
    sp.add_argument("--k-max", type=int, default=4)
    sp.add_argument("--a-max", type=int, default=4)
    sp.add_argument("--b-max", type=int, default=4)
    sp.add_argument("--only-tags", help="glob on the closed-form tag, e.g. 'G*'")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_scan)

    for name, fn in (("cumulants", cmd_cumulants), ("binomials", cmd_binomials)):
        sp = sub.add_parser(name)
        sp.add_argument("--file", help="complex file: one generator per line")
        sp.add_argument("--sv", nargs=2, metavar=("A", "B"), help="Segre-Veronese complex, e.g. --sv 2 2")
        sp.add_argument("--degree-bound", type=int, default=None)
        sp.add_argument("--json", action="store_true")
        sp.set_defaults(func=fn)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        out, code = args.func(args)
    except (UsageError, DisconnectedComplex, argparse.ArgumentTypeError) as exc:
        print(f"svsecant {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"svsecant {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceTooLarge, SymbolicBudgetExceeded) as exc:
        print(f"svsecant {args.command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        print(_render(args.command, out))
    return code


if __name__ == "__main__":
    sys.exit(main())
