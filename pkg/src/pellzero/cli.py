"""Command-line orchestration: per-k or range verification with
machine-readable reports, plus direct access to the sequence, zero
scans, certified roots, bounds, and the reduction pipeline.

Output conventions: single-k commands print one JSON object; range
commands print one JSON line per k (or CSV with --format csv).  All
approximate values carry {mid, rad} decimal strings.  Exit codes:
0 all pass, 1 any verification FAIL, 2 usage or resource errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import mpmath as mp

from . import bigseq, effbounds, reduction, spectra, zerostruct
from .ball import IndeterminateComparison, PREC_START, PrecisionExhausted

SCHEMA = "pellzero-report/1"
K_GUARD = 500
CACHE_ENV = "PELLZERO_CACHE_DIR"


@dataclass
class ZeroReport:
    k: int
    parity: str
    zeros: list
    predicted_blocks: list
    chi_formula: int
    chi_observed: int
    bound_used: dict
    checks: dict
    status: str
    detail: str
    timestamp: str
    precision_used: int
    schema: str = SCHEMA

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "k": self.k,
            "parity": self.parity,
            "status": self.status,
            "detail": self.detail,
            "zeros": self.zeros,
            "predicted_blocks": self.predicted_blocks,
            "chi_formula": self.chi_formula,
            "chi_observed": self.chi_observed,
            "bound_used": self.bound_used,
            "checks": self.checks,
            "precision_used": self.precision_used,
            "timestamp": self.timestamp,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _parse_m(text: str) -> int:
    """Accept plain integers and scientific forms like 3e47 exactly."""
    text = text.strip().lower()
    if "e" in text:
        mant, expo = text.split("e", 1)
        expo = int(expo)
        if "." in mant:
            whole, frac = mant.split(".", 1)
            mant_i = int(whole + frac)
            expo -= len(frac)
        else:
            mant_i = int(mant)
        if expo < 0:
            raise ValueError(f"M must be an integer, got {text}")
        return mant_i * 10 ** expo
    return int(text)


def _spectra_checks(rs) -> dict:
    checks = {}
    checks["dominant_in_envelope"] = {"holds": bool(spectra.check_dominant_bounds(rs))}
    checks["root_bounds"] = spectra.check_root_bounds(rs)
    if rs.k % 2 == 0:
        checks["small_modulus_gap"] = {
            "holds": bool(spectra.check_even_modulus_gap(rs))}
    return checks


def _verify_one(k: int, full: bool, m_value: int) -> dict:
    parity = "even" if k % 2 == 0 else "odd"
    rs = spectra.solve_roots(k, PREC_START)
    checks = _spectra_checks(rs)

    bound_used: dict = {"kind": None, "value_log10": None, "R": None}
    floor_depth = k * k + 4 * k
    reduce_certs = None
    if k % 2 == 0:
        l_k = effbounds.refined_even_bound(rs)
        bound_used = {"kind": "refined_even",
                      "value_log10": effbounds.LogMagnitude.from_value(max(l_k, 1)).to_json()["log10"],
                      "R": l_k}
        if full:
            floor_depth = max(floor_depth, l_k)
    elif k >= 5 and full:
        outcome = reduction.odd_k_reduce(k, m_value)
        reduce_certs = outcome.to_json()
        bound_used = {"kind": "reduced_odd",
                      "value_log10": effbounds.LogMagnitude.from_value(outcome.R).to_json()["log10"],
                      "R": outcome.R}
        floor_depth = max(floor_depth, outcome.R)
    elif k >= 4:
        lm = effbounds.global_zero_index_bound(k)
        bound_used = {"kind": "global", "value_log10": lm.to_json()["log10"],
                      "R": None}
    else:
        bound_used = {"kind": "scan", "value_log10": None, "R": None}
    if reduce_certs is not None:
        checks["reduction"] = reduce_certs

    floor_depth = min(floor_depth, bigseq.DEFAULT_LIMIT)
    if k >= 4:
        predicted = zerostruct.predicted_intervals(k)
        predicted_blocks = [list(b) for b in predicted.blocks]
        predicted_set = predicted.index_set()
    else:
        predicted_blocks = []
        predicted_set = {0} if k == 2 else {0, -1}
    zset = zerostruct.enumerate_zeros(k, -floor_depth)
    observed = set(zset.indices)
    chi_formula = zerostruct.chi(k)
    chi_observed = len(observed)
    deepest = min(observed)

    failures = []
    if observed != predicted_set:
        missing = sorted(predicted_set - observed)
        extra = sorted(observed - predicted_set)
        note = ""
        if set(zerostruct.variant_zero_set(k, -floor_depth)) == predicted_set:
            note = "; predicted intervals match the variant mirror orbit instead"
        failures.append(f"zero set mismatch: predicted-but-absent {missing}, "
                        f"unpredicted {extra}{note}")
    if chi_observed != chi_formula:
        failures.append(f"count mismatch: observed {chi_observed}, "
                        f"formula {chi_formula} "
                        f"(observed closed form {zerostruct.observed_chi(k)})")
    for name, payload in checks.get("root_bounds", {}).items():
        if isinstance(payload, dict) and payload.get("holds") is False:
            failures.append(f"root bound {name} failed")
    if bound_used["R"] is not None and -deepest > bound_used["R"]:
        failures.append(f"bound {bound_used['R']} below deepest zero {deepest}")

    status = "PASS" if not failures else "FAIL"
    report = ZeroReport(
        k=k, parity=parity, zeros=sorted(observed),
        predicted_blocks=predicted_blocks,
        chi_formula=chi_formula, chi_observed=chi_observed,
        bound_used=bound_used, checks=checks, status=status,
        detail="; ".join(failures), timestamp=_now(),
        precision_used=rs.prec)
    return report.to_json()


def _verify_worker(args):
    k, full, m_value = args
    try:
        return _verify_one(k, full, m_value)
    except (PrecisionExhausted, bigseq.LimitExceeded,
            IndeterminateComparison) as exc:
        return {"schema": SCHEMA, "k": k, "status": "ERROR",
                "detail": f"{type(exc).__name__}: {exc}",
                "timestamp": _now()}


_CSV_COLUMNS = ["k", "parity", "status", "chi_formula", "chi_observed",
                "deepest_zero", "bound_kind", "bound_R", "zeros", "detail"]


def _csv_row(rec: dict) -> str:
    zeros = rec.get("zeros") or []
    bound = rec.get("bound_used") or {}
    vals = [
        str(rec.get("k", "")),
        rec.get("parity", ""),
        rec.get("status", ""),
        str(rec.get("chi_formula", "")),
        str(rec.get("chi_observed", "")),
        str(min(zeros)) if zeros else "",
        str(bound.get("kind") or ""),
        str(bound.get("R") if bound.get("R") is not None else ""),
        ";".join(str(z) for z in zeros),
        '"' + str(rec.get("detail", "")).replace('"', "'") + '"',
    ]
    return ",".join(vals)


def _emit(records, fmt, out):
    if fmt == "csv":
        print(",".join(_CSV_COLUMNS), file=out)
        for rec in records:
            print(_csv_row(rec), file=out)
    else:
        for rec in records:
            print(json.dumps(rec, sort_keys=True), file=out)


def cmd_eval(args) -> int:
    ctx = bigseq.KContext(args.k, limit=args.limit)
    term = bigseq.eval_term(ctx, args.n)
    if args.format == "json":
        print(json.dumps({"k": args.k, "n": args.n, "value": str(term.value)},
                         sort_keys=True))
    else:
        print(term.value)
    return 0


def cmd_zeros(args) -> int:
    floor = args.floor if args.floor is not None else zerostruct.default_floor(args.k)
    if floor >= 0:
        floor = -floor
    zset = zerostruct.enumerate_zeros(args.k, floor)
    indices = list(zset.indices)
    if args.depths:
        shown = [-n for n in reversed(indices)]
    else:
        shown = indices
    print(json.dumps({"k": args.k, "floor": floor, "zeros": shown,
                      "count": len(indices),
                      "convention": "depths" if args.depths else "indices"},
                     sort_keys=True))
    return 0


def cmd_chi(args) -> int:
    value = zerostruct.chi(args.k)
    if args.format == "json":
        print(json.dumps({"k": args.k, "chi": value}, sort_keys=True))
    else:
        print(value)
    return 0


def cmd_roots(args) -> int:
    cache_dir = os.environ.get(CACHE_ENV)
    rs = None
    if cache_dir:
        rs = spectra.load_root_system(args.k, args.precision, cache_dir)
    if rs is None:
        rs = spectra.solve_roots(args.k, args.precision)
        if cache_dir:
            spectra.save_root_system(rs, cache_dir)
    digits = max(6, int(rs.prec * 0.30103) - 2)
    roots = []
    for b in rs.roots:
        mid = b.mid
        roots.append({
            "re": mp.nstr(mid.real if b.is_complex else mid, digits),
            "im": mp.nstr(mid.imag, digits) if b.is_complex else "0",
            "rad": mp.nstr(b.rad, 4),
        })
    print(json.dumps({
        "k": rs.k, "precision": rs.prec, "roots": roots,
        "conj_pairs": [list(p) for p in rs.conj_pairs],
        "real_roots": list(rs.real_roots),
        "dominant": rs.dominant,
    }, sort_keys=True))
    return 0


def cmd_bound(args) -> int:
    if args.matveev:
        heights = [float(a) for a in args.A.split(",")] if args.A else []
        inst = effbounds.MatveevInstance(t=args.t, d=args.d, B=args.B,
                                         A=tuple(heights))
        lm = effbounds.matveev_lower_bound(inst)
        payload = {"k": args.k, "kind": "matveev_floor_magnitude",
                   **lm.to_json()}
    elif args.refined:
        rs = spectra.solve_roots(args.k, args.precision)
        l_k = effbounds.refined_even_bound(rs)
        payload = {"k": args.k, "kind": "refined_even", "L": l_k}
    else:
        lm = effbounds.global_zero_index_bound(args.k)
        payload = {"k": args.k, "kind": "global", **lm.to_json()}
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_reduce(args) -> int:
    outcome = reduction.odd_k_reduce(args.k, args.M)
    print(json.dumps(outcome.to_json(), sort_keys=True))
    return 0


def cmd_cache(args) -> int:
    cache_dir = args.dir or os.environ.get(CACHE_ENV)
    if not cache_dir:
        print(f"no cache directory (set {CACHE_ENV} or pass --dir)",
              file=sys.stderr)
        return 2
    if args.action == "clear":
        removed = 0
        if os.path.isdir(cache_dir):
            for name in os.listdir(cache_dir):
                if name.startswith("roots_k") and name.endswith(".json"):
                    os.unlink(os.path.join(cache_dir, name))
                    removed += 1
        spectra.clear_cache()
        print(json.dumps({"cleared": removed, "dir": cache_dir}))
        return 0
    entries = []
    if os.path.isdir(cache_dir):
        for name in sorted(os.listdir(cache_dir)):
            if not (name.startswith("roots_k") and name.endswith(".json")):
                continue
            path = os.path.join(cache_dir, name)
            try:
                with open(path) as fh:
                    payload = json.load(fh)
                stale = payload.get("checksum") != spectra._coeff_checksum(payload["k"])
                entries.append({"file": name, "k": payload["k"],
                                "prec": payload["prec"], "stale": stale})
            except (OSError, json.JSONDecodeError, KeyError):
                entries.append({"file": name, "error": "unreadable"})
    print(json.dumps({"dir": cache_dir, "entries": entries}, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    if args.k is not None:
        ks = [args.k]
    else:
        lo, _, hi = args.k_range.partition(":")
        ks = list(range(int(lo), int(hi) + 1))
    if args.odd_only:
        ks = [k for k in ks if k % 2 == 1]
    if args.even_only:
        ks = [k for k in ks if k % 2 == 0]
    if not ks:
        print("empty k selection", file=sys.stderr)
        return 2
    if (min(ks) < 2 or max(ks) > K_GUARD) and not args.allow_large:
        print(f"k outside [2, {K_GUARD}]; pass --allow-large to proceed",
              file=sys.stderr)
        return 2
    if min(ks) < 2:
        print("k must be >= 2", file=sys.stderr)
        return 2

    work = [(k, args.full, args.M) for k in ks]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_verify_worker, work))
    else:
        records = [_verify_worker(w) for w in work]
    _emit(records, args.format, sys.stdout)
    if any(rec.get("status") == "ERROR" for rec in records):
        return 2
    return 0 if all(rec.get("status") == "PASS" for rec in records) else 1


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="pellzero",
        description="Exact negative-index terms, zero patterns, certified "
                    "roots, and effective bounds for the order-k sequences.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="exact term value at any index")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--limit", type=int, default=bigseq.DEFAULT_LIMIT)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("zeros", help="scan for zeros at nonpositive indices")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--floor", type=int, default=None,
                   help="most negative index to scan (default k^2+4k deep)")
    p.add_argument("--depths", action="store_true",
                   help="print positive depths instead of indices")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("chi", help="predicted zero count")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("roots", help="certified root system")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--precision", type=int, default=PREC_START)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("bound", help="effective bounds (log-space)")
    p.add_argument("--k", type=int, default=4)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--refined", action="store_true",
                       help="sharpened even-order bound L_k from roots")
    group.add_argument("--global", dest="global_", action="store_true",
                       help="parity-dispatched global bound (default)")
    group.add_argument("--matveev", action="store_true",
                       help="linear-form floor magnitude; needs --t --d --B --A")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--B", type=int, default=10)
    p.add_argument("--A", type=str, default=None,
                   help="comma-separated height parameters")
    p.add_argument("--precision", type=int, default=PREC_START)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("reduce", help="odd-order reduction to R_k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--M", type=_parse_m, default=reduction.DEFAULT_M)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("cache", help="inspect or clear the root cache")
    p.add_argument("action", choices=["inspect", "clear"])
    p.add_argument("--dir", default=None)
    p.set_defaults(func=cmd_cache)

    p = sub.add_parser("verify", help="per-k verification reports")
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--k", type=int, default=None)
    sel.add_argument("--k-range", type=str, default=None,
                     help="inclusive range lo:hi")
    p.add_argument("--odd-only", action="store_true")
    p.add_argument("--even-only", action="store_true")
    p.add_argument("--full", action="store_true",
                   help="enumerate down to the refined/reduced bound")
    p.add_argument("--M", type=_parse_m, default=reduction.DEFAULT_M)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_verify)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (bigseq.LimitExceeded, PrecisionExhausted) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, reduction.ReductionExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main(argv=sys.argv[1:]))
