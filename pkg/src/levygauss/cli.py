"""Command-line interface: verification suites, simulations, kernel tables, scheme verdicts.

Exit status is 0 when everything passes, 1 when a check fails and 2 on
usage errors.  Reports are JSON and tables are CSV; floats are written
with 17 significant digits.  Wall time goes to stderr only, so reports
from the same seed and flags are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import nonfock, processes as pr, single_point as sp, suites
from .orthopoly import poisson_truncation

DEFAULTS = {"seed": 42, "samples": 100_000, "tolerance_scale": 1.0, "workers": None}


class UsageError(Exception):
    pass


# -- serialization -----------------------------------------------------------------

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj: Any, indent: int = 0) -> str:
    """JSON with every float written at 17 significant digits; keys keep insertion order."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else json.dumps(str(float(obj)))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# -- settings ----------------------------------------------------------------------

def resolve_settings(args: argparse.Namespace) -> dict:
    """Defaults, overridden by the JSON config file, overridden by explicit flags."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(cfg) - set(DEFAULTS) - {"out", "suite"}
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        settings.update(cfg)
    for key in list(DEFAULTS) + ["out", "suite"]:
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v
    if settings["samples"] < 2:
        raise UsageError("--samples must be at least 2")
    if settings["tolerance_scale"] <= 0:
        raise UsageError("--tolerance-scale must be positive")
    return settings


# -- commands ----------------------------------------------------------------------

def cmd_suite(args) -> int:
    s = resolve_settings(args)
    name = s.get("suite") or "all"
    if name not in suites.SUITE_NAMES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(suites.SUITE_NAMES)}")
    ctx = suites.Context(int(s["seed"]), int(s["samples"]), float(s["tolerance_scale"]), s["workers"])
    t0 = time.perf_counter()
    results = suites.run_suite(name, ctx)
    elapsed = time.perf_counter() - t0
    passed = all(r.passed for r in results)
    report = {
        "suite": name,
        "seed": ctx.seed,
        "samples": ctx.samples,
        "tolerance_scale": ctx.tolerance_scale,
        "passed": passed,
        "checks": [r.as_dict() for r in results],
    }
    _write(dumps(report) + "\n", s.get("out"))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.id:24s} value={r.value:.3g} tol={r.tolerance:.3g}", file=sys.stderr)
    print(f"suite {name}: {'pass' if passed else 'FAIL'} in {elapsed:.2f}s", file=sys.stderr)
    return 0 if passed else 1


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_simulate(args) -> int:
    s = resolve_settings(args)
    seed, n = int(s["seed"]), int(args.n)
    if n < 1:
        raise UsageError("-n must be positive")
    lines = [f"# kind={args.kind} seed={seed} n={n}"]
    if args.kind == "poisson":
        if args.mass < 0:
            raise UsageError("--mass must be nonnegative")
        lines.append(f"# mass={fmt(args.mass)}")
        b = pr.sample_poisson_configs(args.mass, n, seed, s["workers"])
        lines.append("sample,x,mark")
        for i in range(n):
            for x in b[i].locations:
                lines.append(f"{i},{fmt(x)},1")
    elif args.kind == "gauss":
        P = pr.Partition(_floats(args.partition))
        lines.append(f"# partition={args.partition}")
        v = pr.sample_white_noise(P, seed, n, s["workers"]).cell_values
        lines.append("sample," + ",".join(f"cell{j}" for j in range(P.cells)))
        lines += [f"{i}," + ",".join(fmt(x) for x in row) for i, row in enumerate(v)]
    elif args.kind in ("gamma", "levy"):
        P = pr.Partition(_floats(args.partition))
        if args.kind == "gamma":
            spec = pr.LevySpec.gamma()
            eps = args.eps
            if eps is None:
                inc = pr.exact_gamma_increments(P, seed, n, s["workers"])
            else:
                if eps <= 0:
                    raise UsageError("--eps must be positive")
                inc = pr.sample_levy_increments(spec, P, n, seed, eps, s["workers"])
            lines.append(f"# partition={args.partition} eps={'exact' if eps is None else fmt(eps)}")
        else:
            atoms, weights = _floats(args.atoms or ""), _floats(args.weights or "")
            if len(atoms) != len(weights):
                raise UsageError("--atoms and --weights must have equal length")
            measure = pr.FiniteAtomic(tuple(atoms), tuple(weights)) if atoms else None
            spec = pr.LevySpec(args.drift, args.variance, measure)
            inc = pr.sample_levy_increments(spec, P, n, seed, None, s["workers"])
            lines.append(f"# partition={args.partition} drift={fmt(args.drift)} variance={fmt(args.variance)} "
                         f"atoms={args.atoms or ''} weights={args.weights or ''}")
        lines.append("sample," + ",".join(f"cell{j}" for j in range(P.cells)))
        lines += [f"{i}," + ",".join(fmt(x) for x in row) for i, row in enumerate(inc)]
        if args.kind == "gamma":
            # empirical Laplace transform at a = 1 on every cell against exp(-int log(1 + a))
            v = np.exp(-inc.sum(axis=1))
            exact = math.exp(-math.log(2.0) * P.total_mass)
            se = float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
            lines.append(f"# laplace a=1: empirical={fmt(v.mean())} stderr={fmt(se)} exact={fmt(exact)}")
    else:
        raise UsageError(f"unknown kind {args.kind!r}")
    _write("\n".join(lines) + "\n", s.get("out"))
    return 0


def cmd_kernel_table(args) -> int:
    a = args.a
    if not a > 0:
        raise UsageError("-a must be positive")
    xs = _floats(args.x) if args.x else list(np.round(np.arange(-2.0, 2.0001, 0.5), 12))
    if args.max_k < 0:
        raise UsageError("--max-k must be nonnegative")
    lines = [f"# kernel K^a(k,x) with a={fmt(a)}; row_sum = sum_k P_a(k) K^a(k,x) over a tail-bounded range of k"]
    lines.append("x," + ",".join(f"k{k}" for k in range(args.max_k + 1)) + ",row_sum")
    for x in xs:
        K = max(poisson_truncation(a, 0, 1e-16), sp.kernel_series_cutoff(abs(x + 2 * a), a))
        vals = [sp.kernel_1d(k, x, a) for k in range(args.max_k + 1)]
        row_sum = math.fsum(sp.inverse_kernel_weights([x], a, K)[:, 0])
        lines.append(f"{fmt(x)}," + ",".join(fmt(v) for v in vals) + f",{fmt(row_sum)}")
    if a != 1:
        v = sp.resolve_identity_normalization(a, 0.5, 2, N=300)
        lines.append(f"# identity normalization at x=0.5 k=2: certified={v.certified} "
                     f"closed_form={fmt(v.closed_form)} denominator_sum={fmt(v.denominator_sum)} "
                     f"numerator_sum={fmt(v.numerator_sum)}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_scheme(args) -> int:
    schemes = []
    for name in args.schemes:
        builtin = {"majority": nonfock.VotingScheme.majority, "example2": nonfock.VotingScheme.example2,
                   "xor": nonfock.VotingScheme.xor}
        if name in builtin:
            schemes.append(builtin[name]())
        else:
            try:
                schemes.append(nonfock.VotingScheme.read(name))
            except OSError as exc:
                raise UsageError(f"cannot read scheme {name}: {exc}") from exc
    reports = [nonfock.scheme_report(s, args.max_root_order) for s in schemes]
    _write(dumps(reports) + "\n", args.out)
    return 0 if all(r["symmetric"] and r["balanced"] for r in reports) else 1


# -- parser ------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with status 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="global seed (default 42)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count (default 100000)")
    common.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                        help="multiply every tolerance by this factor")
    common.add_argument("--workers", type=int, help="threads for block-parallel sampling")
    common.add_argument("--config", help="JSON file overriding defaults; flags override it")

    p = _Parser(prog="levygauss", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("suite", parents=[common], help="run a verification suite")
    s.add_argument("--suite", help=f"one of {', '.join(suites.SUITE_NAMES)} (default all)")
    s.set_defaults(func=cmd_suite)

    m = sub.add_parser("simulate", parents=[common], help="write sampled realizations as CSV")
    m.add_argument("kind", choices=["poisson", "gauss", "gamma", "levy"])
    m.add_argument("-n", type=int, default=10, help="number of realizations")
    m.add_argument("--mass", type=float, default=1.0, help="total mass for poisson")
    m.add_argument("--partition", default="1", help="comma-separated cell masses")
    m.add_argument("--eps", type=float, help="gamma jump cutoff; exact increments when omitted")
    m.add_argument("--atoms", help="levy: comma-separated jump sizes")
    m.add_argument("--weights", help="levy: comma-separated atom masses")
    m.add_argument("--drift", type=float, default=0.0)
    m.add_argument("--variance", type=float, default=0.0)
    m.set_defaults(func=cmd_simulate)

    k = sub.add_parser("kernel-table", help="tabulate the single-point kernel")
    k.add_argument("-a", type=float, default=1.0)
    k.add_argument("--max-k", dest="max_k", type=int, default=8)
    k.add_argument("-x", help="comma-separated grid (default -2..2 step 0.5)")
    k.add_argument("--out")
    k.set_defaults(func=cmd_kernel_table)

    v = sub.add_parser("scheme", help="JSON verdicts for voting schemes")
    v.add_argument("schemes", nargs="+", help="table files or builtin names: majority, example2, xor")
    v.add_argument("--max-root-order", dest="max_root_order", type=int, default=6)
    v.add_argument("--out")
    v.set_defaults(func=cmd_scheme)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"levygauss: error: {exc}", file=sys.stderr)
        return 2
    except (pr.DomainError, nonfock.IncompleteTableError) as exc:
        print(f"levygauss: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
