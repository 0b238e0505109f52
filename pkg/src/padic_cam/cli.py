"""Command-line front end.

Exit codes: 0 ok, 2 bad flags, 3 mathematical precondition failed,
4 internal contradiction (lemma and oracle disagree).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .cam_system import (
    H_obs,
    J_obs,
    ParameterError,
    bracket_function,
    make_params,
    random_params,
    random_phase_point,
    region,
    region_order,
)
from .normal_forms import NormalFormError
from .padic_core import INF, PadicContext, PadicError, parse_padic_literal
from .quad_ext import ExtError
from .rank0_classifier import (
    ClassificationError,
    classify_lemma,
    classify_oracle,
    constructed_params,
    points,
)
from .rank1_analysis import (
    Rank1Error,
    classify_rank1,
    image_curve,
    rank1_locus,
    rank1_special,
    realize_rank1_form,
)

EXIT_FLAGS, EXIT_MATH, EXIT_CONTRADICTION = 2, 3, 4

MATH_ERRORS = (ParameterError, PadicError, ExtError, NormalFormError, Rank1Error,
               ZeroDivisionError)


class FlagError(Exception):
    pass


class Contradiction(Exception):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


def parse_number(text: str, p: int | None = None) -> Fraction:
    """'a/b', an integer, or a p-adic literal 'd0.d1.d2;e'."""
    text = text.strip()
    if ";" in text or text.count(".") > 1:
        if p is None:
            raise FlagError(f"p-adic literal {text!r} needs --p")
        try:
            return parse_padic_literal(text, p)
        except (PadicError, ValueError) as e:
            raise FlagError(str(e)) from None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FlagError(f"not a rational number: {text!r}") from None


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _params(args):
    vals = [parse_number(getattr(args, n), args.p) for n in ("t", "R1", "R2")]
    return make_params(args.p, *vals, N=args.N)


def _str_ord(v):
    return "inf" if v == INF else str(v)


# --- subcommands -------------------------------------------------------------

def cmd_classify(args) -> dict:
    params = _params(args)
    nf_l, tr_l = classify_lemma(params, args.point)
    nf_o, tr_o = classify_oracle(params, args.point)
    out = {**nf_l.to_json(), "degenerate": nf_l.degenerate, "point": args.point,
           "parameters": params.to_json(), "lemma_trace": tr_l.to_json(),
           "oracle_trace": tr_o.to_json()}
    if nf_l != nf_o or tr_l.degenerate != tr_o.degenerate:
        raise Contradiction(f"lemma gives {nf_l}, oracle gives {nf_o}", out)
    return out


def cmd_region(args) -> dict:
    params = _params(args)
    return {"region": region(params).value, "order": _str_ord(region_order(params)),
            "parameters": params.to_json()}


def cmd_rank1(args) -> dict:
    params = _params(args)
    if params.t in (0, 1):
        fams = []
        for fam in rank1_special(params, samples=1):
            pt = fam["points"][0]
            fams.append({"branch": fam["branch"], "form": fam["form"],
                         "multiplier": fam["multiplier"], "sample": pt.to_json(),
                         "normal_form": classify_rank1(params, pt).to_json()})
        return {"parameters": params.to_json(), "families": fams}
    if args.c is None:
        raise FlagError("--c is required when t is not 0 or 1")
    c = parse_number(args.c, args.p)
    pt = rank1_locus(params, c)
    if pt is None:
        return {"parameters": params.to_json(), "c": str(c), "locus": None}
    J, H = image_curve(params, c)
    return {"parameters": params.to_json(), "c": str(c), "locus": pt.to_json(),
            "normal_form": classify_rank1(params, pt).to_json(),
            "image": {"J": str(J), "H": str(H)}}


def _classify_chunk(job):
    p, point, rows, method, N = job
    out = []
    for t, R1, R2 in rows:
        params = make_params(p, t, R1, R2, N)
        fn = classify_lemma if method == "lemma" else classify_oracle
        nf, _ = fn(params, point)
        if method == "both":
            nf2, _ = classify_oracle(params, point)
            if nf2 != nf:
                return ("mismatch", params.to_json(), str(nf), str(nf2))
        out.append(json.dumps(nf.to_json(), sort_keys=True))
    return ("ok", out)


def _map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def cmd_sweep(args) -> dict:
    pts = points() if args.point == "all" else [args.point]
    report = {}
    for pt in pts:
        grid = constructed_params(args.p, pt, minimum=args.minimum, seed=args.seed)
        rows = [(g.t, g.R1, g.R2) for g in grid]
        size = max(1, len(rows) // max(1, args.jobs * 4))
        jobs = [(args.p, pt, rows[i:i + size], args.method, args.N)
                for i in range(0, len(rows), size)]
        forms = set()
        for res in _map(_classify_chunk, jobs, args.jobs):
            if res[0] == "mismatch":
                raise Contradiction("lemma and oracle disagree during sweep",
                                    {"parameters": res[1], "lemma": res[2], "oracle": res[3]})
            forms.update(res[1])
        forms = sorted(forms)
        report[pt] = {"point": pt, "grid": len(rows), "count": len(forms),
                      "forms": [json.loads(f) for f in forms]}
    if len(pts) == 1:
        return {"p": args.p, **report[pts[0]]}
    return {"p": args.p, "points": report}


def _poisson_tuple(job):
    p, seed, npts, N = job
    rng = random.Random(seed)
    params = random_params(p, rng, N)
    bracket = bracket_function(J_obs(params), H_obs(params), params)
    return max((abs(bracket(random_phase_point(rng))) for _ in range(npts)),
               default=Fraction(0))


def cmd_poisson_check(args) -> dict:
    jobs = [(args.p, args.seed * 100003 + i, args.points, args.N) for i in range(args.tuples)]
    worst = max(_map(_poisson_tuple, jobs, args.jobs), default=Fraction(0))
    return {"p": args.p, "tuples": args.tuples, "points": args.tuples * args.points,
            "max_abs_bracket": str(worst)}


def region_map_rows(p: int, R1=1):
    rows = []
    for r in range(p ** 3):
        prefix = ".".join(str(r // p ** j % p) for j in range(3))
        for ok in range(-6, 0):
            k = Fraction(p) ** ok
            params = make_params(p, r, R1, k * R1)
            rows.append((prefix, ok, region(params).value))
    return rows


def cmd_region_map(args):
    rows = region_map_rows(args.p)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_prefix", "ord_k", "region"])
    w.writerows(rows)
    return buf.getvalue()


def cmd_realize(args) -> dict:
    ctx = PadicContext(args.p, args.N)
    cp = parse_number(args.c_prime, args.p)
    params, c = realize_rank1_form(ctx, cp)
    pt = rank1_locus(params, c)
    form = classify_rank1(params, pt)
    if form.c_prime != cp:
        raise Contradiction("re-classification disagrees", {"requested": str(cp),
                                                             "got": form.to_json()})
    return {"c_prime": str(cp), "parameters": params.to_json(), "c": str(c),
            "normal_form": form.to_json()}


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padic-cam",
                                 description="p-adic coupled angular momenta: critical points "
                                             "and normal forms")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, tuple_flags=True):
        sp.add_argument("--p", type=_prime, required=True)
        sp.add_argument("--N", type=int, default=32, help="p-adic working precision")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if tuple_flags:
            sp.add_argument("--t", required=True)
            sp.add_argument("--R1", required=True)
            sp.add_argument("--R2", required=True)

    sp = sub.add_parser("classify", help="normal form at a rank-0 point")
    common(sp)
    sp.add_argument("--point", choices=points(), required=True)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("region", help="outer, inner or limit region")
    common(sp)
    sp.set_defaults(fn=cmd_region)

    sp = sub.add_parser("rank1", help="rank-1 point for a multiplier c")
    common(sp)
    sp.add_argument("--c")
    sp.set_defaults(fn=cmd_rank1)

    sp = sub.add_parser("sweep", help="distinct normal forms over the constructed grid")
    common(sp, tuple_flags=False)
    sp.add_argument("--point", choices=points() + ["all"], default="all")
    sp.add_argument("--minimum", type=int, default=0, help="pad the grid to this size")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", choices=("lemma", "oracle", "both"), default="lemma")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("poisson-check", help="{J, H} at random points")
    common(sp, tuple_flags=False)
    sp.add_argument("--tuples", type=int, default=20)
    sp.add_argument("--points", type=int, default=200, help="points per tuple")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_poisson_check)

    sp = sub.add_parser("region-map", help="CSV of regions over t mod p^3 and ord(k)")
    common(sp, tuple_flags=False)
    sp.set_defaults(fn=cmd_region_map, format="csv")

    sp = sub.add_parser("realize", help="parameters realizing x^2 + c' xi^2 at rank 1")
    common(sp, tuple_flags=False)
    sp.add_argument("--c-prime", dest="c_prime", required=True)
    sp.set_defaults(fn=cmd_realize)
    return ap


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "region-map" and args.format == "csv":
        if args.command != "sweep":
            print("error: --format csv is only available for sweep and region-map",
                  file=sys.stderr)
            return EXIT_FLAGS
    if args.command == "region-map" and args.format == "json":
        print("error: region-map only writes CSV", file=sys.stderr)
        return EXIT_FLAGS
    if getattr(args, "jobs", 1) < 1 or args.N < 4:
        print("error: --jobs must be >= 1 and --N >= 4", file=sys.stderr)
        return EXIT_FLAGS
    try:
        result = args.fn(args)
    except FlagError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FLAGS
    except Contradiction as e:
        print(f"contradiction: {e}", file=sys.stderr)
        sys.stderr.write(_dump(e.payload))
        _emit(_dump(e.payload), args.output)
        return EXIT_CONTRADICTION
    except ClassificationError as e:
        print(f"contradiction: {e}", file=sys.stderr)
        return EXIT_CONTRADICTION
    except MATH_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MATH
    if isinstance(result, str):
        _emit(result, args.output)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point", "class", "params"])
        groups = result.get("points") or {result["point"]: result}
        for pt, rep in groups.items():
            for f in rep["forms"]:
                w.writerow([pt, f["class"], " ".join(f["params"])])
        _emit(buf.getvalue(), args.output)
    else:
        _emit(_dump(result), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
