"""Command-line entry point.

Every command prints one ``key=value`` line per reported quantity.  Exit
codes: 0 success, 1 usage error, 2 computation failure or memory cap,
3 bound violated in ``compare``.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import geometry
from .clustering import Dendrogram, complete_linkage
from .diagnostics import (
    DEFAULT_ORACLE_LIMIT,
    OracleTooLarge,
    bottleneck,
    sandwich_checks,
    log_bottleneck,
    oracle_cech,
    plot_diagram,
    plot_trace,
)
from .driver import DEFAULT_MAX_SIMPLICES, RunConfig, run_collapse
from .nettree import run_net_persistence
from .persistence import PersistenceDiagram
from .trace import MemoryCapExceeded, Trace

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_BOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v

    return conv


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}")


def _emit(**kv):
    for k, v in kv.items():
        print(f"{k}={v}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cechapprox", description="Approximate Cech persistence of point clouds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic point cloud")
    g.add_argument("kind", choices=["circle-wedge", "rp2", "lorenz-embed"])
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, help="required for circle-wedge and rp2")
    g.add_argument("--counts", type=_int_list, default=[100, 200, 300, 400, 500, 600])
    g.add_argument("--radii", type=_float_list, default=[1, 2, 3, 4, 5, 6])
    g.add_argument("--noise", type=_nonneg_float, default=0.02)
    g.add_argument("--n", type=int, default=5000, help="rp2 sample size")
    g.add_argument("--length", type=int, default=15000, help="lorenz series length")
    g.add_argument("--dim", type=int, default=3, help="lorenz embedding dimension")
    g.add_argument("--max-lag", type=int, default=100)

    c = sub.add_parser("cluster", help="complete-linkage dendrogram of a cloud")
    c.add_argument("cloud")
    c.add_argument("--out", required=True)

    r = sub.add_parser("run", help="compute a persistence diagram")
    r.add_argument("engine", choices=["cech", "collapse", "nettree", "oracle"])
    r.add_argument("cloud")
    r.add_argument("--out", required=True, help="diagram file")
    r.add_argument("--trace", help="trace file (collapse, cech, nettree)")
    r.add_argument("--epsilon", type=_nonneg_float, default=0.0)
    r.add_argument("--alpha-max", type=_positive(float), required=True)
    r.add_argument("--max-dim", type=_positive(int), default=2, help="largest simplex dimension D")
    r.add_argument("--batch", type=_positive(int), default=1, help="simplices between collapse scans (L)")
    r.add_argument("--alpha0", type=_positive(float), default=1e-3)
    r.add_argument("--dendrogram", help="precomputed dendrogram file")
    r.add_argument("--max-simplices", type=_positive(int), default=DEFAULT_MAX_SIMPLICES)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--oracle-limit", type=_positive(int), default=DEFAULT_ORACLE_LIMIT,
                   help="simplex budget of the oracle engine")

    m = sub.add_parser("compare", help="bottleneck distance between two diagrams")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--dim", type=int, default=1)
    m.add_argument("--log", action="store_true", help="compare on the log scale")
    m.add_argument("--floor", type=_positive(float), help="log floor for births and deaths")
    m.add_argument("--cloud", help="derive the log floor as 1e-3 times this cloud's diameter")
    m.add_argument("--alpha-max", type=_positive(float), help="truncate both diagrams here first")
    m.add_argument("--bound", type=_nonneg_float, help="c: fail if distance > log c (log) or > c")

    pl = sub.add_parser("plot", help="render a diagram or trace as SVG")
    src = pl.add_mutually_exclusive_group(required=True)
    src.add_argument("--diagram")
    src.add_argument("--trace")
    pl.add_argument("--out", required=True)
    pl.add_argument("--alpha-max", type=_positive(float))

    s = sub.add_parser("sandwich", help="check C(a) <= R(a) <= C(sqrt2 a)")
    s.add_argument("cloud")
    s.add_argument("--alphas", type=_float_list, required=True)
    s.add_argument("--max-dim", type=_positive(int), default=2)
    return p


def cmd_generate(args) -> int:
    if args.kind in ("circle-wedge", "rp2") and args.seed is None:
        raise UsageError(f"{args.kind} needs --seed")
    if args.kind == "circle-wedge":
        if len(args.counts) != len(args.radii) or not args.counts:
            raise UsageError("--counts and --radii must be non-empty and of equal length")
        if any(n < 0 for n in args.counts) or any(r <= 0 for r in args.radii):
            raise UsageError("counts must be non-negative and radii positive")
        pts = geometry.gen_circle_wedge(args.counts, args.radii, args.noise, args.seed)
        meta = f"circle-wedge counts={args.counts} radii={args.radii} noise={args.noise} seed={args.seed}"
        extra = {}
    elif args.kind == "rp2":
        if args.n < 1:
            raise UsageError("--n must be positive")
        pts = geometry.gen_rp2(args.n, args.seed)
        meta = f"rp2 n={args.n} seed={args.seed}"
        extra = {}
    else:
        if args.length < 3 or args.dim < 1 or args.max_lag < 2:
            raise UsageError("need --length >= 3, --dim >= 1, --max-lag >= 2")
        pts, delay = geometry.lorenz_embedding(args.length, args.dim, args.max_lag)
        meta = f"lorenz-embed length={args.length} dim={args.dim} delay={delay}"
        extra = {"delay": delay}
    geometry.write_cloud(args.out, pts, comment=meta)
    _emit(points=len(pts), ambient_dim=pts.shape[1], **extra)
    return EXIT_OK


def cmd_cluster(args) -> int:
    pts = geometry.read_cloud(args.cloud)
    dg = complete_linkage(pts)
    dg.write(args.out)
    _emit(events=len(dg), top_scale=dg.events[-1].scale if len(dg) else 0.0)
    return EXIT_OK


def cmd_run(args) -> int:
    pts = geometry.read_cloud(args.cloud)
    trace = Trace()
    try:
        if args.engine == "oracle":
            diagram = oracle_cech(pts, args.alpha_max, args.max_dim, args.oracle_limit)
            trace = None
        elif args.engine == "nettree":
            diagram = run_net_persistence(pts, args.alpha0, args.epsilon, args.alpha_max, args.max_dim,
                                          max_simplices=args.max_simplices, trace=trace)
        else:
            eps = 0.0 if args.engine == "cech" else args.epsilon
            cfg = RunConfig(eps, args.alpha_max, args.max_dim, args.batch, args.seed, args.max_simplices)
            dg = Dendrogram.read(args.dendrogram, len(pts)) if args.dendrogram else None
            diagram, trace = run_collapse(pts, cfg, dg)
    except MemoryCapExceeded as exc:
        if args.trace:
            exc.trace.write(args.trace)
        _emit(status="cap", simplices=exc.count, scale=exc.scale)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OracleTooLarge as exc:
        _emit(status="too-large")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    diagram.write(args.out)
    if args.trace and trace is not None:
        trace.write(args.trace)
    _emit(status="ok", intervals=len(diagram))
    for d in diagram.dims:
        _emit(**{f"intervals_dim{d}": len(diagram.in_dim(d))})
    if trace is not None:
        _emit(peak_simplices=trace.peak(), final_simplices=trace.final_count(),
              collapses=sum(1 for x in trace.samples if x[2] == "collapse"))
    return EXIT_OK


def _diameter(pts: np.ndarray) -> float:
    from scipy.spatial.distance import pdist

    return float(pdist(pts).max()) if len(pts) > 1 else 0.0


def cmd_compare(args) -> int:
    a = PersistenceDiagram.read(args.a)
    b = PersistenceDiagram.read(args.b)
    if args.alpha_max is not None:
        a, b = a.truncated(args.alpha_max), b.truncated(args.alpha_max)
    if args.log:
        if args.floor is not None:
            floor = args.floor
        elif args.cloud:
            floor = 1e-3 * _diameter(geometry.read_cloud(args.cloud))
        else:
            finite = [x for dg in (a, b) for _, bb, dd in dg for x in (bb, dd) if math.isfinite(x)]
            floor = 1e-3 * max(finite, default=1.0)
        if not floor > 0:
            raise UsageError("log floor must be positive")
        dist = log_bottleneck(a, b, args.dim, floor)
        _emit(log_bottleneck=dist, floor=floor)
        limit = math.log(args.bound) if args.bound is not None and args.bound > 0 else -math.inf
    else:
        dist = bottleneck(a, b, args.dim)
        _emit(bottleneck=dist)
        limit = args.bound
    if args.bound is not None:
        ok = dist <= limit
        _emit(bound=args.bound, within_bound=str(ok).lower())
        if not ok:
            return EXIT_BOUND
    return EXIT_OK


def cmd_plot(args) -> int:
    if args.diagram:
        dg = PersistenceDiagram.read(args.diagram)
        amax = args.alpha_max
        if amax is None:
            finite = [x for _, b, d in dg for x in (b, d) if math.isfinite(x)]
            amax = max(finite, default=1.0) or 1.0
        plot_diagram(dg, amax, path=args.out)
        _emit(points=len(dg), alpha_max=amax)
    else:
        tr = Trace.read(args.trace)
        plot_trace(tr, path=args.out)
        _emit(samples=len(tr), collapses=sum(1 for x in tr.samples if x[2] == "collapse"))
    return EXIT_OK


def cmd_sandwich(args) -> int:
    pts = geometry.read_cloud(args.cloud)
    if any(a < 0 for a in args.alphas):
        raise UsageError("alphas must be non-negative")
    all_ok = True
    for a, ok in zip(args.alphas, sandwich_checks(pts, args.alphas, args.max_dim)):
        all_ok &= ok
        print(f"alpha={a!r} sandwich={'pass' if ok else 'fail'}")
    return EXIT_OK if all_ok else EXIT_BOUND


COMMANDS = {
    "generate": cmd_generate,
    "cluster": cmd_cluster,
    "run": cmd_run,
    "compare": cmd_compare,
    "plot": cmd_plot,
    "sandwich": cmd_sandwich,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cechapprox {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"cechapprox {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
