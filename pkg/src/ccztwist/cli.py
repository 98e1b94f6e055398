"""Command-line interface: ``ccztwist <command> ...``.

Exit status is 0 on success, 1 when a check fails (a witness does not verify,
a golden file differs) and 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np

from . import catalog, construct, invariants
from ._kernels import BACKEND
from ._parallel import set_default_jobs
from .equiv import graph_map_is_permutation, power_function_exclusion, verify_ccz_witness
from .gfield import FieldElement, ParseError, get_field, parse_element, parse_field_spec
from .linstruct import ell_polynomial, structure_pairs
from .vfunc import VectorialFunction, degree_of, evaluate, is_quadratic, parse_poly, trace_function

GOLDEN_DIR = Path(__file__).with_name("goldens")


class CheckFailed(Exception):
    pass


def out_dir() -> Path:
    d = Path(os.environ.get("CCZTWIST_OUT", "ccztwist-out"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


# ---------------------------------------------------------------------------
# Argument helpers.


def _symbols(args, ctx) -> dict[str, FieldElement]:
    out = {}
    for item in args.symbol or []:
        name, _, text = item.partition("=")
        if not name or not text:
            raise ParseError(f"expected NAME=ELEMENT, got {item!r}", 1, item)
        out[name] = parse_element(text, ctx, out)
    return out


def _load_function(args) -> VectorialFunction:
    ctx = parse_field_spec(args.field)
    cod = ctx
    if getattr(args, "codomain", None):
        cod = get_field(ctx.p, args.codomain)
    if args.table:
        F = VectorialFunction.read(args.table, ctx, cod)
    elif args.function:
        poly = parse_poly(args.function, ctx, _symbols(args, ctx))
        F = evaluate(poly, None if cod == ctx else cod)
    else:
        raise ParseError("give --function or --table", 1, "")
    if getattr(args, "trace_to", None):
        F = trace_function(F, args.trace_to)
    return F


def _element(text: str | None, ctx, symbols) -> FieldElement | None:
    if text is None:
        return None
    return parse_element(text, ctx, symbols)


def _add_function_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", required=True, help="e.g. 'p=2,n=9' or 'p=2,n=9,mod=x^9+x^4+1'")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--function", "--f0", dest="function", help="polynomial in x, e.g. 'x^3 + g*x^5'")
    src.add_argument("--table", help="file with one hex rank per line")
    p.add_argument("--symbol", action="append", help="extra constant NAME=ELEMENT (repeatable)")
    p.add_argument("--codomain", type=int, help="values lie in the subfield F_(p^m)")
    p.add_argument("--trace-to", type=int, dest="trace_to", help="compose with the relative trace to F_(p^m)")


# ---------------------------------------------------------------------------
# Commands.


def _human(rep: dict) -> str:
    rows = [(k, v) for k, v in rep.items() if not isinstance(v, (list, dict))]
    w = max(len(k) for k, _ in rows)
    lines = [f"{k:<{w}}  {v}" for k, v in rows]
    for key in ("walsh_spectrum", "diff_spectrum"):
        if key in rep:
            lines.append(f"{key:<{w}}  " + ", ".join(f"{v}^{c}" for v, c in rep[key]))
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    F = _load_function(args)
    rep = {"field": F.dom.spec(), "codomain": F.cod.spec(), "degree": degree_of(F)}
    rep.update(invariants.report(F))
    rep["bijective"] = F.is_square and len(set(F.table.tolist())) == F.dom.q
    rep["structure_pairs"] = sum(1 for _ in structure_pairs(F)) if is_quadratic(F) else None
    print(_human(rep), file=sys.stderr)
    _emit(rep)
    return 0


def _params_from_args(args, F: VectorialFunction) -> construct.ConstructionParams:
    syms = _symbols(args, F.dom)
    return construct.complete_params(
        F,
        gamma=_element(args.gamma, F.dom, syms),
        beta=_element(args.beta, F.cod, syms if F.is_square else {}),
        strategy=args.strategy,
        alpha=_element(args.alpha, F.dom, syms),
        c=_element(args.c, F.dom, syms),
    )


def cmd_construct(args) -> int:
    F0 = _load_function(args)
    params = _params_from_args(args, F0)
    res = construct.twist(F0, params)
    out = res.to_json()
    if args.emit:
        d = Path(args.emit)
        d.mkdir(parents=True, exist_ok=True)
        res.FH.write(d / "twisted.txt")
        res.H.write(d / "involution.txt")
        (d / "params.json").write_text(json.dumps(params.to_json(), indent=2) + "\n")
        out["emitted"] = str(d)
    _emit(out)
    return 0 if res.witness_ok else 1


def cmd_verify(args) -> int:
    F0 = _load_function(args)
    data = json.loads(Path(args.params).read_text())
    params = construct.ConstructionParams.from_json(data, F0.dom, F0.cod)
    construct.check_params(F0, params)
    gm = params.graph_map()
    res = construct.twist(F0, params)
    G = VectorialFunction.read(args.twisted, F0.dom, F0.cod) if args.twisted else res.FH
    walsh, diff = invariants.same_invariants(res.F, G)
    checks = {
        "involution": bool(np.array_equal(res.H.table[res.H.table], F0.dom.all_ranks())),
        "permutation_criterion": gm.trace_criterion() and graph_map_is_permutation(gm),
        "graph_sets_equal": verify_ccz_witness(res.F, G, gm),
        "twisted_matches": G == res.FH,
        "walsh_equal": walsh,
        "diff_equal": diff,
    }
    ok = all(checks.values())
    _emit({"verified": ok, "checks": checks, "degree_F0": res.degree_F0, "degree": degree_of(G), "label": res.label})
    return 0 if ok else 1


def cmd_count(args) -> int:
    F0 = _load_function(args)
    en = construct.enumerate_valid_tuples(F0, args.jobs)
    p, n = F0.p, F0.n
    out = {"pairs": len(en.pairs), "count": en.count}
    if p == 2 and invariants.differential_uniformity(F0) == 2:
        out["predicted_apn"] = p ** (2 * n - 2) * (p**n - 1)
    else:
        out["lower_bound"] = p ** (2 * n - 2) * (p - 1)
    _emit(out)
    return 0


def cmd_pairs(args) -> int:
    F0 = _load_function(args)
    rows = []
    for k, (g, b) in enumerate(structure_pairs(F0, args.jobs)):
        if args.limit and k >= args.limit:
            break
        rows.append({"gamma": g.hex(), "beta": b.hex()})
    _emit(rows)
    return 0


def cmd_catalog(args) -> int:
    if args.action == "list":
        _emit(
            [
                {"id": s.family_id, "description": s.description, "conditions": s.conditions, "source": s.source, "sizes": list(s.sizes)}
                for s in catalog.FAMILIES.values()
            ]
        )
        return 0
    family = args.family or args.family_opt
    if not family or not args.n:
        raise ParseError("catalog build needs FAMILY and --n", 1, "")
    kw = {}
    for item in (args.param or []) + (args.params or []):
        k, _, v = item.partition("=")
        kw[k] = int(v, 0) if v.lstrip("-").isdigit() or v.startswith("0x") else v
    F = catalog.build(family, args.n, **kw)
    if args.emit:
        F.write(args.emit)
    _emit({"family": family, "n": args.n, "field": F.dom.spec(), "codomain": F.cod.spec(), "meta": F.meta, "degree": degree_of(F)})
    return 0


# ---------------------------------------------------------------------------
# Reproduction sweeps.


def _same_invariants(F, G) -> dict:
    w, d = invariants.same_invariants(F, G)
    return {"walsh_equal": w, "diff_equal": d}


def _gold_records(large: bool) -> list[dict]:
    recs = []
    ns = range(4, 13 if large else 10)
    for n in ns:
        F0 = catalog.make_gold(2, n, 1)
        for c in sorted({n % 2, 1}):
            P = catalog.gold_params(F0, c)
            r = construct.twist(F0, P)
            recs.append(
                {
                    "p": 2, "n": n, "i": 1, "c": c, "degree": r.degree,
                    "closed_form": r.FH == catalog.gold_closed_form(F0, c),
                    "witness": r.witness_ok, "label": r.label, **_same_invariants(F0, r.FH),
                }
            )
    for n in (4, 6):
        F0 = catalog.make_gold(3, n, 1)
        P = catalog.gold_params(F0)
        r = construct.twist(F0, P)
        recs.append(
            {
                "p": 3, "n": n, "i": 1, "alpha": P.alpha.hex(), "beta": P.beta.hex(), "degree": r.degree,
                "closed_form": r.FH == catalog.gold_odd_closed_form(F0, P),
                "witness": r.witness_ok, "label": r.label, **_same_invariants(F0, r.FH),
            }
        )
    return recs


def _apn_records(large: bool) -> list[dict]:
    recs = []
    for row, (name, _, _) in catalog.APN_ROWS.items():
        spec = catalog.FAMILIES[name]
        for n in spec.sizes:
            if n >= 12 and not large:
                continue
            F0, ell = catalog.make_apn_family(row, n)
            got = evaluate(ell_polynomial(F0, F0.dom.one))
            P = catalog.apn_params(F0)
            r = construct.twist(F0, P, hypotheses=n <= 10)
            rec = {
                "row": row, "family": name, "n": n, "params": F0.meta["params"],
                "ell_matches": got == ell, "beta": P.beta.hex(), "c": P.c.hex(),
                "degree": r.degree, "witness": r.witness_ok, "label": r.label,
            }
            if n <= 10:
                rec["delta"] = r.hypotheses.delta
                rec.update(_same_invariants(F0, r.FH))
            recs.append(rec)
    return recs


def _trace_records(large: bool) -> list[dict]:
    recs = []
    for n in (6, 9):
        ctx = get_field(2, n)
        for a in sorted({1, ctx.gen.rank, 5}):
            F0, P = catalog.make_trace_example(n, a)
            r = construct.twist(F0, P, hypotheses=False)
            recs.append(
                {
                    "n": n, "a": ctx.element(a).hex(), "trace_a": F0.meta["trace_a"],
                    "beta": P.beta.hex(), "gamma": P.gamma.hex(), "c": P.c.hex(),
                    "degree": r.degree, "witness": r.witness_ok,
                }
            )
    return recs


def _sporadic_records(large: bool) -> list[dict]:
    recs = []
    for which in (0, 1):
        for ri in range(3):
            F0 = catalog.make_sporadic9(which, ri)
            ctx = F0.dom
            u = ctx.element(int(F0.meta["u"], 16))
            got = evaluate(ell_polynomial(F0, ctx.one))
            P = catalog.apn_params(F0)
            r = construct.twist(F0, P)
            excl = power_function_exclusion(r.FH, hint=P.beta)
            rec = {
                "which": which, "root_index": ri, "u": u.hex(), "beta": P.beta.hex(), "c": P.c.hex(),
                "beta_log_u": next((k for k in range(7) if u**k == P.beta), None),
                "c_log_u": next((k for k in range(7) if u**k == P.c), None),
                "degree": r.degree, "inverse_degree": degree_of(F0.inverse()),
                "witness": r.witness_ok, "label": r.label, "power_excluded": excl.excluded,
                **_same_invariants(F0, r.FH),
            }
            if which == 0:
                rec["ell_matches"] = got == catalog.sporadic9_ell(F0)
            recs.append(rec)
    return recs


def _nm_records(large: bool) -> list[dict]:
    recs = []
    F = catalog.make_nm_family("gold2", 8, 4)
    d = F.dom
    P = construct.complete_params(F, d.one, F.cod.one, "recipe", alpha=d.zero, c=d.one)
    r = construct.twist_nm(F, P)
    ref = catalog.nm_gold2_reference(8, 4)
    lin = trace_function(VectorialFunction(d, d, d.all_ranks()), 4)
    recs.append(
        {
            "family": "nm-gold2", "p": 2, "n": 8, "m": 4, "delta": r.hypotheses.delta,
            "degree": r.degree, "witness": r.witness_ok, "reference_offset_is_trace": (r.FH - ref) == lin,
        }
    )
    G = catalog.make_nm_family("goldp", 8, 4, p=3)
    D = G.dom
    P = construct.complete_params(G, D.one, G.cod.one, "recipe", alpha=construct.recipe_alpha(D), c=D.zero)
    r = construct.twist_nm(G, P, hypotheses=False)
    recs.append(
        {
            "family": "nm-goldp", "p": 3, "n": 8, "m": 4, "beta": G.meta["beta"],
            "delta": invariants.differential_uniformity(G), "degree": r.degree,
            "predicted_degree": G.meta["twist_degree"], "witness": r.witness_ok,
            "reference": r.FH == catalog.nm_goldp_reference(G, P.alpha),
        }
    )
    return recs


def _record_diff(want: list[dict], got: list[dict]) -> list[str]:
    got = json.loads(json.dumps(got))
    out = []
    if len(want) != len(got):
        out.append(f"record count {len(want)} != {len(got)}")
    for k, (a, b) in enumerate(zip(want, got)):
        for key in sorted(set(a) | set(b)):
            if a.get(key) != b.get(key):
                out.append(f"record {k} {key}: golden={a.get(key)!r} got={b.get(key)!r}")
    return out


TARGETS: dict[str, Callable[[bool], list[dict]]] = {
    "gold": _gold_records,
    "apn-families": _apn_records,
    "trace-example": _trace_records,
    "sporadic9": _sporadic_records,
    "nm": _nm_records,
}


def cmd_reproduce(args) -> int:
    names = list(TARGETS) if args.target == "all" else [args.target]
    failed = []
    for name in names:
        t0 = time.perf_counter()
        recs = TARGETS[name](args.large)
        elapsed = time.perf_counter() - t0
        payload = {"target": name, "large": args.large, "records": recs}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        (out_dir() / f"{name}.json").write_text(text)
        golden = GOLDEN_DIR / f"{name}{'-large' if args.large else ''}.json"
        if args.bless:
            GOLDEN_DIR.mkdir(exist_ok=True)
            golden.write_text(text)
            status = "blessed"
        elif golden.exists():
            diffs = _record_diff(json.loads(golden.read_text())["records"], recs)
            status = "match" if not diffs else "MISMATCH"
            for line in diffs:
                print(f"  {name} {line}", file=sys.stderr)
        else:
            status = "no-golden"
        if status == "MISMATCH":
            failed.append(name)
        print(f"{name}: {len(recs)} records, {status} ({elapsed:.1f}s)", file=sys.stderr)
        if not args.quiet:
            print(text, end="")
    return 1 if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ccztwist", description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps (0 = all cores)")
    ap.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({BACKEND} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="degree, Walsh and differential spectra")
    _add_function_args(p)
    p.set_defaults(fn=cmd_analyze)

    for name, fn, hlp in (("construct", cmd_construct, "build F o H"), ("verify", cmd_verify, "check stored parameters")):
        p = sub.add_parser(name, help=hlp)
        _add_function_args(p)
        if name == "construct":
            p.add_argument("--gamma")
            p.add_argument("--beta")
            p.add_argument("--alpha")
            p.add_argument("--c")
            p.add_argument("--strategy", choices=construct.STRATEGIES, default="canonical")
            p.add_argument("--emit", help="directory for twisted.txt, involution.txt and params.json")
        else:
            p.add_argument("--params", required=True, help="params.json written by construct --emit")
            p.add_argument("--twisted", help="value table of F o H to check as well")
        p.set_defaults(fn=fn)

    p = sub.add_parser("count", help="number of valid (alpha, beta, gamma, c)")
    _add_function_args(p)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("pairs", help="list structure pairs (gamma, beta)")
    _add_function_args(p)
    p.add_argument("--limit", type=int, default=0)
    p.set_defaults(fn=cmd_pairs)

    p = sub.add_parser("catalog", help="list or build catalogued families")
    p.add_argument("action", choices=["list", "build"])
    p.add_argument("family", nargs="?")
    p.add_argument("--n", type=int)
    p.add_argument("--family", dest="family_opt", help="same as the positional FAMILY")
    p.add_argument("--param", action="append", help="family parameter KEY=VALUE (repeatable)")
    p.add_argument("--params", nargs="+", help="several KEY=VALUE parameters at once")
    p.add_argument("--emit", help="write the value table here")
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("reproduce", help="rerun the reference sweeps and compare with goldens")
    p.add_argument("target", choices=[*TARGETS, "all"])
    p.add_argument("--large", action="store_true", help="include the n >= 12 instances")
    p.add_argument("--bless", action="store_true", help="overwrite the golden files")
    p.add_argument("--quiet", action="store_true", help="only print the summary lines")
    p.set_defaults(fn=cmd_reproduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    set_default_jobs(args.jobs)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (construct.InvalidParamsError, catalog.FamilyConditionError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
