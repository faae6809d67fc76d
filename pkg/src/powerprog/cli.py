"""Command-line driver: runs experiments, emits CSV/JSON, writes run manifests.

Outputs are deterministic: floats serialize at 12 significant digits, rows
are emitted in a fixed order, and parallel sweeps reduce over fixed shift
blocks so the same inputs give byte-identical files at any --threads value.

Exit codes: 0 success, 2 usage error, 3 range-guard violation,
4 verification failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, arith, counts, expsum, local, oracle, series, variance
from .errors import RangeGuardError, VerificationError
from .local import PolynomialSpec

_BLOCK_U = 128

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RANGE = 3
EXIT_VERIFY = 4


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _round12(obj):
    """Round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _parse_u_range(text: str) -> tuple[int, int]:
    """Single shift "u" or inclusive range "lo:hi"."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        lo, hi = int(lo), int(hi)
    else:
        lo = hi = int(text)
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty shift range {text!r}")
    return lo, hi


def _parse_alpha(text: str):
    """Rational "a/q" (exact) or a decimal literal."""
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return float(text)


# ---------------------------------------------------------------------------
# Output plumbing.
# ---------------------------------------------------------------------------

class _Run:
    """Collects output paths and writes the manifest alongside them."""

    def __init__(self, command: str, parameters: dict):
        self.command = command
        self.parameters = parameters
        self.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
        self.output_paths: list[str] = []

    def manifest_path(self, out: str | None) -> Path | None:
        if out is None:
            return None
        p = Path(out)
        return p / "manifest.json" if p.is_dir() else Path(f"{out}.manifest.json")

    def write_manifest(self, out: str | None, error: str | None = None) -> None:
        path = self.manifest_path(out)
        if path is None:
            return
        doc = {
            "command": self.command,
            "parameters": _round12(self.parameters),
            "tool_version": __version__,
            "started": self.started,
            "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "output_paths": self.output_paths,
        }
        if error is not None:
            doc["error"] = error
        path.write_text(json.dumps(doc, indent=2) + "\n")


def _write_text(run: _Run, out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        run.output_paths.append(str(out))


def _emit_rows(run: _Run, args, header: list[str], rows: list[list]) -> None:
    """Rows as CSV (default) or a JSON array of objects."""
    if args.format == "json":
        doc = [dict(zip(header, row)) for row in rows]
        _write_text(run, args.out, json.dumps(_round12(doc), indent=2) + "\n")
        return
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    _write_text(run, args.out, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Parallel shift sweeps (fixed block size, ordered reduction).
# ---------------------------------------------------------------------------

def _block_worker(task):
    return variance.error_block(*task)

def _error_sweep(ell: int, y: int, X: int, cutoff: float, weighted: bool,
                 threads: int):
    tasks = [
        (ell, lo, min(lo + _BLOCK_U - 1, y), X, cutoff, weighted)
        for lo in range(1, y + 1, _BLOCK_U)
    ]
    if threads <= 1 or len(tasks) == 1:
        results = [_block_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_block_worker, tasks))
    cnt = np.concatenate([r[0] for r in results])
    pred = np.concatenate([r[1] for r in results])
    err = np.concatenate([r[2] for r in results])
    return cnt, pred, err


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------

def _cmd_rho(args, run: _Run) -> int:
    spec = PolynomialSpec(args.ell, args.u)
    rows = [[p, local.root_count(p, spec)] for p in arith.sieve_primes(args.p_max)]
    _emit_rows(run, args, ["p", "rho"], rows)
    return EXIT_OK


def _cmd_series(args, run: _Run) -> int:
    lo, hi = args.u
    rows = []
    for u in range(lo, hi + 1):
        if u == 0:
            continue
        spec = PolynomialSpec(args.ell, u)
        if args.method == "product":
            tv = (series.sigma_full(spec, args.cutoff) if args.variant == "sigma"
                  else series.sigma_prime_full(spec, args.cutoff))
        else:
            tv = (series.sigma_sum_trunc(spec, args.cutoff) if args.variant == "sigma"
                  else series.sigma_prime_sum_trunc(spec, args.cutoff))
        rows.append([u, tv.value, tv.method, tv.cutoff])
    _emit_rows(run, args, ["u", "value", "method", "cutoff"], rows)
    return EXIT_OK


def _cmd_count(args, run: _Run) -> int:
    weighted = args.variant == "sigma"
    cnt, pred, err = _error_sweep(args.ell, args.u_max, args.x, args.cutoff,
                                  weighted, args.threads)
    reducible = [
        u for u in range(1, args.u_max + 1)
        if not local.is_irreducible(PolynomialSpec(args.ell, u))
    ]
    if reducible:
        print(f"note: x^{args.ell} + u reducible for u in {reducible}", file=sys.stderr)
    rows = [
        [u, float(cnt[u - 1]), float(pred[u - 1]), float(err[u - 1])]
        for u in range(1, args.u_max + 1)
    ]
    _emit_rows(run, args, ["u", "count", "prediction", "error"], rows)
    return EXIT_OK


def _cmd_variance(args, run: _Run) -> int:
    weighted = args.variant == "sigma"
    cnt, pred, err = _error_sweep(args.ell, args.y, args.x, args.cutoff,
                                  weighted, args.threads)
    report = variance.assemble_report(args.ell, args.y, args.x, args.cutoff, pred, err)
    if args.per_u:
        lines = ["u,count,prediction,error"]
        for u in range(1, args.y + 1):
            lines.append(f"{u},{_fmt(float(cnt[u-1]))},{_fmt(float(pred[u-1]))},{_fmt(float(err[u-1]))}")
        Path(args.per_u).write_text("\n".join(lines) + "\n")
        run.output_paths.append(args.per_u)
    _write_text(run, args.out, json.dumps(_round12(report.as_dict()), indent=2) + "\n")
    return EXIT_OK


def _cmd_expsum(args, run: _Run) -> int:
    fn = {
        "I": expsum.linear_phase_sum,
        "J": expsum.linear_phase_sum_weighted,
        "Iell": expsum.power_phase_sum,
        "Jell": expsum.power_phase_sum_weighted,
    }[args.which]
    value = fn(args.alpha, args.z, args.ell)
    rows = [[args.which, str(args.alpha), args.z, value.real, value.imag]]
    _emit_rows(run, args, ["which", "alpha", "z", "re", "im"], rows)
    return EXIT_OK


def _cmd_arcs(args, run: _Run) -> int:
    part = expsum.build_major_arcs(args.x, args.exponent)
    classifications = []
    for text in args.alpha or []:
        alpha = _parse_alpha(text)
        hit = part.classify(alpha)
        classifications.append({
            "alpha": text,
            "class": "MAJOR" if hit else "MINOR",
            "q": hit[0] if hit else None,
            "a": hit[1] if hit else None,
        })
    if args.format == "csv":
        rows = [[q, a, lo, hi] for (q, a), (lo, hi) in zip(part.arcs, part.intervals())]
        _emit_rows(run, args, ["q", "a", "lo", "hi"], rows)
        for c in classifications:
            print(f"{c['alpha']}: {c['class']}"
                  + (f" q={c['q']} a={c['a']}" if c["q"] else ""), file=sys.stderr)
        return EXIT_OK
    doc = {
        "X": part.X,
        "exponent": part.exponent,
        "Q": part.Q,
        "delta": part.delta,
        "n_arcs": len(part.arcs),
        "major_measure": part.major_measure(),
        "arcs": [{"q": q, "a": a, "lo": lo, "hi": hi}
                 for (q, a), (lo, hi) in zip(part.arcs, part.intervals())],
        "classifications": classifications,
    }
    _write_text(run, args.out, json.dumps(_round12(doc), indent=2) + "\n")
    return EXIT_OK


def _cmd_report(args, run: _Run) -> int:
    if not args.out:
        raise ValueError("report needs --out DIR")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    u = np.arange(1, args.y + 1, dtype=np.int64)

    pc, pp, pe = _error_sweep(args.ell, args.y, args.x, args.cutoff, True, args.threads)
    vc, vp, ve = _error_sweep(args.ell, args.y, args.x, args.cutoff, False, args.threads)

    for name, (c, p, e) in (("errors_pair.csv", (pc, pp, pe)),
                            ("errors_value.csv", (vc, vp, ve))):
        lines = ["u,count,prediction,error"]
        lines += [f"{int(n)},{_fmt(float(c[i]))},{_fmt(float(p[i]))},{_fmt(float(e[i]))}"
                  for i, n in enumerate(u)]
        (out_dir / name).write_text("\n".join(lines) + "\n")
        run.output_paths.append(str(out_dir / name))

    sweep = series.series_sweep(args.ell, args.y, args.cutoff)
    lines = ["u,value,method,cutoff"]
    for n, pair, value in sweep.rows:
        lines.append(f"{n},{_fmt(pair)},{series.COMBINED_FACTOR_PRODUCT},{sweep.cutoff:g}")
        lines.append(f"{n},{_fmt(value)},{series.EULER_PRODUCT},{sweep.cutoff:g}")
    (out_dir / "series.csv").write_text("\n".join(lines) + "\n")
    run.output_paths.append(str(out_dir / "series.csv"))

    for name, (p, e) in (("variance_pair.json", (pp, pe)),
                         ("variance_value.json", (vp, ve))):
        rep = variance.assemble_report(args.ell, args.y, args.x, args.cutoff, p, e)
        (out_dir / name).write_text(json.dumps(_round12(rep.as_dict()), indent=2) + "\n")
        run.output_paths.append(str(out_dir / name))

    from . import figures  # matplotlib import deferred to the report path

    title = f"x^{args.ell} + u, X = {args.x:g}, primes <= {args.cutoff:g}"
    for name, render in (
        ("fig_errors.png", lambda p: figures.error_scatter(u, pe, ve, title, p)),
        ("fig_error_hist.png", lambda p: figures.error_histogram(pe, ve, title, p)),
        ("fig_series.png", lambda p: figures.series_curve(
            u, np.array([r[1] for r in sweep.rows]),
            np.array([r[2] for r in sweep.rows]), sweep.cutoff, p)),
    ):
        render(str(out_dir / name))
        run.output_paths.append(str(out_dir / name))
    print(f"report written to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Verification suites.
# ---------------------------------------------------------------------------

def _suite_local() -> tuple[int, int]:
    checks = failures = 0
    for ell in (2, 3, 4):
        for p in arith.sieve_primes(500):
            fast = local.root_count_table(p, ell)
            slow = oracle.root_count_classes(p, ell)
            checks += 1
            if not np.array_equal(fast, slow) or fast.sum() != p:
                failures += 1
    u_list = list(range(1, 11))
    for q, _, _ in arith.squarefree_factored(60):
        a_oracle = oracle.double_sum_grid(q, 2, u_list, units_only=True)
        l_oracle = oracle.double_sum_grid(q, 2, u_list, units_only=False)
        for i, u in enumerate(u_list):
            spec = PolynomialSpec(2, u)
            checks += 2
            if abs(a_oracle[i] - float(local.unit_root_excess(q, spec))) > 1e-8:
                failures += 1
            if abs(l_oracle[i] - local.root_excess(q, spec)) > 1e-8:
                failures += 1
    return checks, failures


def _suite_series() -> tuple[int, int]:
    checks = failures = 0
    for ell in (2, 3):
        for cutoff in (10.0, 100.0):
            for u in range(1, 201):
                spec = PolynomialSpec(ell, u)
                lhs = series.sigma_product_trunc(spec, cutoff).value
                rhs = (series.sigma_prime_product_trunc(spec, cutoff).value
                       * series.pair_correction(spec, cutoff))
                checks += 1
                if abs(lhs - rhs) > 1e-10 * max(abs(lhs), abs(rhs), 1e-300):
                    failures += 1
    u_arr = np.arange(1, 51, dtype=np.int64)
    sweep = series.sigma_prime_product_sweep(2, u_arr, 1000)
    for i, u in enumerate(u_arr.tolist()):
        checks += 1
        point = series.sigma_prime_product_trunc(PolynomialSpec(2, u), 1000).value
        if abs(sweep[i] - point) > 1e-12 * max(1.0, abs(point)):
            failures += 1
    return checks, failures


def _suite_circle() -> tuple[int, int]:
    checks = failures = 0
    for z in (16.0, 50.0):
        for u in range(1, 11):
            spec = PolynomialSpec(2, u)
            checks += 1
            if abs(expsum.circle_integral(spec, z) - oracle.dyadic_pair_count(spec, z)) > 1e-6:
                failures += 1
    # Parseval at z = 100
    N = 2 * 400 + 1
    samples = expsum.power_weighted_samples(100.0, 2, N)
    table = arith.lambda_table(2 * arith.introot(100, 2))
    m = np.arange(arith.introot(100, 2) + 1, 2 * arith.introot(100, 2) + 1)
    direct = float((table.log_array()[m] ** 2).sum())
    checks += 1
    if abs(np.mean(np.abs(samples) ** 2) - direct) > 1e-8 * direct:
        failures += 1
    part = expsum.build_major_arcs(10**6, 1.5)
    phi_sum = sum(arith.euler_phi(q) for q in range(1, int(part.Q) + 1))
    checks += 1
    if abs(part.major_measure() - phi_sum * 2 * part.delta) > 1e-12:
        failures += 1
    return checks, failures


_SUITES = {"local": _suite_local, "series": _suite_series, "circle": _suite_circle}


def _cmd_verify(args, run: _Run) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    any_failed = False
    for name in names:
        checks, failures = _SUITES[name]()
        if failures:
            any_failed = True
            print(f"{name}: FAIL ({failures} of {checks} checks)")
        else:
            print(f"{name}: PASS ({checks} checks)")
    if any_failed:
        raise VerificationError("verification suite failed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and dispatch.
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (manifest written alongside)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker bound for shift sweeps; output is identical for any value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerprog",
        description="Experiments on primes along m^ell + u: local densities, "
                    "singular series, weighted counts, variance statistics, "
                    "and circle-method sums.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", help="local root counts over primes")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--p-max", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_rho)

    p = sub.add_parser("series", help="singular-series truncations")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--u", type=_parse_u_range, required=True,
                   help='single shift "u" or inclusive range "lo:hi"')
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--variant", choices=("sigma", "sigma-prime"), default="sigma")
    p.add_argument("--method", choices=("product", "dirichlet-sum"), default="product")
    _add_common(p)
    p.set_defaults(handler=_cmd_series)

    p = sub.add_parser("count", help="error records over a shift sweep")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--u-max", type=int, required=True)
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--variant", choices=("sigma", "sigma-prime"), default="sigma")
    _add_common(p)
    p.set_defaults(handler=_cmd_count)

    p = sub.add_parser("variance", help="averaged squared-error report")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--variant", choices=("sigma", "sigma-prime"), default="sigma")
    p.add_argument("--per-u", help="also write the per-shift error CSV here")
    _add_common(p)
    p.set_defaults(handler=_cmd_variance)

    p = sub.add_parser("expsum", help="evaluate one exponential sum")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--alpha", type=_parse_alpha, required=True,
                   help='rational "a/q" (exact) or decimal')
    p.add_argument("--which", choices=("I", "J", "Iell", "Jell"), required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_expsum)

    p = sub.add_parser("arcs", help="major-arc dissection and classification")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--exponent", type=float, required=True)
    p.add_argument("--alpha", action="append",
                   help="point to classify (repeatable)")
    _add_common(p)
    p.set_defaults(handler=_cmd_arcs)

    p = sub.add_parser("verify", help="oracle-agreement suites")
    p.add_argument("--suite", choices=("local", "series", "circle", "all"),
                   default="all")
    _add_common(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("report", help="experiment bundle: CSV + JSON + figures")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--cutoff", type=float, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    params = {k: str(v) if isinstance(v, Fraction) else v
              for k, v in vars(args).items() if k not in ("handler", "command")}
    run = _Run(args.command, params)
    try:
        code = args.handler(args, run)
    except RangeGuardError as exc:
        print(f"range guard: {exc}", file=sys.stderr)
        run.write_manifest(args.out, error=str(exc))
        return EXIT_RANGE
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        run.write_manifest(args.out, error=str(exc))
        return EXIT_VERIFY
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.write_manifest(args.out, error=str(exc))
        return EXIT_USAGE
    run.write_manifest(args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
