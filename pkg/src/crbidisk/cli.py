"""Command line: ``crbidisk analyze (<path>... | -e EXPR) [options]``."""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .report import analyze, emit, exit_code_for, read_source, ObstructionReport


def _positive(minimum):
    def check(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}")
        return value

    return check


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crbidisk", description=__doc__)
    p.add_argument("--version", action="version", version=f"crbidisk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="compute torsions and the bi-disk obstruction at the origin")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("paths", nargs="*", default=[], metavar="PATH", help="files holding a defining function F")
    src.add_argument("-e", "--expr", help="inline defining function F (u = F)")
    a.add_argument("--order", type=_positive(2), default=8, help="truncation order N (default 8)")
    a.add_argument("--grid", type=_positive(4), default=12, help="grid points per angle (default 12)")
    a.add_argument("--iters", type=_positive(0), default=200, help="Nelder-Mead iterations (default 200)")
    a.add_argument("--json", action="store_true", help="emit one JSON object per input")
    a.add_argument("--check-structure", action="store_true", help="also verify the structural identities")
    a.add_argument("--timings", action="store_true", help="include per-stage wall times")
    a.add_argument("--jobs", type=_positive(1), default=1, help="process several files in parallel")
    return p


def _run_one(job):
    source, opts = job
    try:
        text = read_source(source)
    except (OSError, UnicodeDecodeError) as exc:
        rep = ObstructionReport(source=source, text="", order=opts["order"])
        rep.exit_code = exit_code_for(OSError())
        rep.error = {"kind": "InputError", "message": str(exc)}
        return rep
    return analyze(text, source=source, **opts)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.expr is None and not args.paths:
        parser.error("give at least one PATH or -e EXPR")
    opts = dict(
        order=args.order,
        grid=args.grid,
        iters=args.iters,
        check_structure=args.check_structure,
        timings=args.timings,
    )
    if args.expr is not None:
        reports = [analyze(args.expr, source="-e", **opts)]
    else:
        jobs = [(path, opts) for path in args.paths]
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                reports = list(pool.map(_run_one, jobs))
        else:
            reports = [_run_one(j) for j in jobs]
    fmt = "json" if args.json else "text"
    out = sys.stdout.buffer
    for i, rep in enumerate(reports):
        if i and fmt == "text":
            out.write(b"\n")
        out.write(emit(rep, fmt))
    out.flush()
    return max(rep.exit_code for rep in reports)


if __name__ == "__main__":
    raise SystemExit(main())
