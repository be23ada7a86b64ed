"""Command-line front end: ``splab density|sums|products|btscan|selftest``.

Every command writes a CSV series (stdout, or ``--out DIR``) and, when
``--out`` is given, a JSON manifest next to it holding every input needed to
reproduce the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .asymptotics import BTWindow, SeriesPoint, bt_exception_scan, fit_exponent, theorem1_bound, theorem2_envelope
from .errors import CostGuardError, DomainError, EngineDisagreement, SplabError
from .exact import RationalExponent
from .products import COST_GUARD, DEFAULT_GUARD, EnumMode, brute_enumerate, progression_enumerate
from .shifted import count_N_alpha, decomposition_report, kappa_estimate, m_sum
from .sieve import DEFAULT_BLOCK, SieveConfig, default_workers


def fmt(v) -> str:
    """Locale-independent CSV field: exact ints, reals to 12 significant digits."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def parse_grid(args) -> list[int]:
    if args.x_grid:
        try:
            start, ratio, count = args.x_grid.split(":")
            start, ratio, count = int(start), Fraction(ratio), int(count)
        except ValueError as exc:
            raise DomainError(f"bad --x-grid {args.x_grid!r}; want start:ratio:count") from exc
        xs = [math.floor(start * ratio**i) for i in range(count)]
    elif args.x:
        xs = [int(v) for chunk in args.x for v in chunk.split(",") if v]
    else:
        raise DomainError("give --x or --x-grid")
    if not xs or any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError(f"x grid must be nonempty and strictly ascending: {xs}")
    if xs[0] < 2:
        raise DomainError("x values must be at least 2")
    return xs


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


class Run:
    """Collects outputs of one command and emits them with a manifest."""

    def __init__(self, command: str, args, params: dict):
        self.command = command
        self.args = args
        self.params = {
            **params,
            "block_size": args.block_size,
            "worker_count": args.workers,
        }
        self.extra: dict = {}
        self.outputs: list[tuple[str, str]] = []
        self.t0 = time.perf_counter()

    def table(self, name: str, header: list[str], rows: list[list], plot: tuple[int, int] | None = None):
        self.outputs.append((f"{name}.csv", _csv_text(header, rows)))
        if plot and self.args.plot:
            i, j = plot
            lines = "".join(f"{fmt(r[i])} {fmt(r[j])}\n" for r in rows)
            self.outputs.append((f"{name}.plot.dat", lines))

    def finish(self) -> None:
        out = self.args.out
        if out is None:
            for name, text in self.outputs:
                if name.endswith(".csv"):
                    sys.stdout.write(text)
            for key, val in self.extra.items():
                print(f"# {key}: {json.dumps(val)}", file=sys.stderr)
            return
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, text in self.outputs:
            _atomic_write(out / name, text)
            paths.append(str(out / name))
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "tool_version": __version__,
            "elapsed_seconds": round(time.perf_counter() - self.t0, 3),
            "output_paths": paths,
            **self.extra,
        }
        _atomic_write(out / f"{self.command}.manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _config(args, xmax: int) -> SieveConfig:
    return SieveConfig(max(xmax, 2), args.block_size, args.workers)


def cmd_density(args) -> int:
    xs = parse_grid(args)
    alpha = RationalExponent.parse(args.alpha)
    config = _config(args, xs[-1])
    run = Run("density", args, {"x_values": xs, "alpha": str(alpha)})
    rows, points = [], []
    for x in xs:
        pt = count_N_alpha(x, alpha, config)
        points.append(pt)
        bound = theorem1_bound(x, alpha) if x >= 3 else float("nan")
        rows.append([x, pt.count, pt.pi_x, pt.ratio, pt.ratio_to_pi, bound])
    run.table(
        "density",
        ["x", "count_N_alpha", "pi_x", "ratio_to_x_over_logx", "ratio_to_pi", "theorem1_bound"],
        rows,
        plot=(0, 4),
    )
    run.extra["kappa_estimate"] = kappa_estimate(points)
    run.finish()
    return 0


def cmd_sums(args) -> int:
    xs = parse_grid(args)
    c = RationalExponent.parse(args.c)
    config = _config(args, xs[-1])
    run = Run("sums", args, {"x_values": xs, "c": str(c), "B": args.B})
    rows = []
    for x in xs:
        d = decomposition_report(x, c, args.B, config)
        rows.append([
            x, m_sum(x, c, config).value, d.total.value,
            d.low.value, d.mid.value, d.high.value, d.total.value / x,
        ])
    run.table("sums", ["x", "M_c", "L_full", "L_low", "L_mid", "L_high", "L_full_over_x"], rows, plot=(0, 6))
    run.finish()
    return 0


def _guard_kwargs(args, k: int, xmax: int) -> dict:
    cap = COST_GUARD.get(k, DEFAULT_GUARD)
    if args.max_x is not None:
        if args.max_x > cap and not args.i_accept_long_run:
            raise CostGuardError(f"--max-x {args.max_x} above the default {cap} needs --i-accept-long-run")
        cap = args.max_x
    if xmax > cap:
        raise CostGuardError(f"x={xmax} exceeds the k={k} cost guard {cap}")
    return {"allow_long_run": True, "unsafe_exponent": args.unsafe_exponent}


def cmd_products(args) -> int:
    xs = parse_grid(args)
    a = RationalExponent.parse(args.a)
    mode = EnumMode(args.mode)
    kw = _guard_kwargs(args, args.k, xs[-1])
    config = SieveConfig(max(xs[-1] // 2, 2), args.block_size, args.workers)
    run = Run("products", args, {
        "x_values": xs, "k": args.k, "a": str(a), "mode": mode.value, "engine": args.engine,
    })
    engines = {"brute": [brute_enumerate], "progression": [progression_enumerate],
               "both": [brute_enumerate, progression_enumerate]}[args.engine]
    rows, series = [], []
    for x in xs:
        results = [f(x, args.k, a, mode, args.records, config=config, **kw) for f in engines]
        if len({r.count for r in results}) > 1:
            msg = f"engines disagree at x={x}: " + ", ".join(
                f"{f.__name__}={r.count}" for f, r in zip(engines, results)
            )
            if args.records:
                recs = [set(r.records) for r in results]
                diff = sorted((recs[0] ^ recs[1]), key=lambda t: t.primes)
                if diff:
                    msg += f"; first differing tuple {diff[0].primes}"
            raise EngineDisagreement(msg)
        count = results[0].count
        series.append(SeriesPoint(x, count))
        env = theorem2_envelope(x, args.k, a, unsafe_exponent=True) if x >= 16 else None
        expo = float(1 - a.fraction * (args.k - 1))
        rows.append([
            x, count,
            env.lower if env else float("nan"), env.upper if env else float("nan"),
            count / x**expo,
        ])
        if args.records and args.out:
            rec_rows = [[" ".join(map(str, t.primes)), t.n, t.g, t.largest_of_g] for t in results[0].records]
            run.table(f"products_records_x{x}", ["primes", "n", "g", "largest_of_g"], rec_rows)
    run.table("products", ["x", "count", "envelope_lower", "envelope_upper", "count_over_x_pow"], rows, plot=(0, 1))
    run.extra["envelope_note"] = "shape reference: implied constants set to 1"
    usable = [s for s in series if s.count > 0]
    if len(usable) >= 2:
        fit = fit_exponent(series)
        run.extra["fit"] = {
            "slope": fit.slope, "intercept": fit.intercept,
            "residual_rms": fit.residual_rms, "points_used": fit.points_used,
        }
    run.finish()
    return 0


def _parse_real(text: str) -> float:
    if text.lower() in ("inf", "infinity", "huge"):
        return math.inf
    return float(text)


def cmd_btscan(args) -> int:
    try:
        nu = Fraction(args.nu)
    except ValueError as exc:
        raise DomainError(f"bad --nu {args.nu!r}") from exc
    w = BTWindow(args.y, nu, _parse_real(args.c1), _parse_real(args.c2), args.u)
    config = SieveConfig(max(args.y, 2), args.block_size, args.workers)
    scan = bt_exception_scan(w, config)
    run = Run("btscan", args, {"y": args.y, "nu": str(nu), "c1": args.c1, "c2": args.c2, "u": args.u})
    rows = [[r.p, r.count, r.low, r.high, r.is_exception] for r in scan.rows]
    run.table("btscan", ["p", "pi_y_p_u", "window_low", "window_high", "is_exception"], rows)
    fraction = scan.exception_count / scan.scanned_count
    run.table("btscan_summary", ["exception_count", "scanned_count", "exception_fraction"],
              [[scan.exception_count, scan.scanned_count, fraction]])
    run.extra["summary"] = {"exception_count": scan.exception_count, "scanned_count": scan.scanned_count}
    run.finish()
    if args.out is not None:
        print(f"{scan.exception_count} exceptions of {scan.scanned_count} scanned")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return run_selftest()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--block-size", type=int, default=DEFAULT_BLOCK)
    common.add_argument("--workers", type=int, default=default_workers())
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--plot", action="store_true", help="also write two-column .plot.dat files")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--x", action="append", help="x value(s), comma separated; repeatable")
    grid.add_argument("--x-grid", metavar="START:RATIO:COUNT")

    p = argparse.ArgumentParser(prog="splab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("density", parents=[common, grid], help="N_alpha(x) against (1/2+alpha) x/log x")
    s.add_argument("--alpha", default="0")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("sums", parents=[common, grid], help="M_c(x) and the split of L(x;1,x)")
    s.add_argument("--c", default="1/2")
    s.add_argument("--B", type=float, default=1.0)
    s.set_defaults(func=cmd_sums)

    s = sub.add_parser("products", parents=[common, grid], help="count A_{k,a}(x)")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--a", required=True)
    s.add_argument("--mode", required=True, choices=[m.value for m in EnumMode])
    s.add_argument("--engine", choices=["brute", "progression", "both"], default="progression")
    s.add_argument("--records", action="store_true")
    s.add_argument("--max-x", type=int)
    s.add_argument("--i-accept-long-run", action="store_true")
    s.add_argument("--unsafe-exponent", action="store_true")
    s.set_defaults(func=cmd_products)

    s = sub.add_parser("btscan", parents=[common], help="Brun-Titchmarsh window exception scan")
    s.add_argument("--y", type=int, required=True)
    s.add_argument("--nu", default="1/2")
    s.add_argument("--c1", required=True)
    s.add_argument("--c2", required=True)
    s.add_argument("--u", type=int, default=1)
    s.set_defaults(func=cmd_btscan)

    s = sub.add_parser("selftest", help="run the built-in example checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SplabError as exc:
        print(f"splab {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
