"""End-to-end analysis of one defining function and its text/JSON rendering."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .algebra import VarContext
from .errors import (
    BranchError,
    CRError,
    DegreeTooHigh,
    InvalidDefiningFunction,
    LeviDegenerate,
    NotReal,
    ParseError,
    PivotDegenerate,
    WrongSignature,
)
from .parser import parse, to_series
from .pipeline import TORSION_NAMES, DefiningFunction, run_pipeline, structure_checks
from .u2search import ObstructionAtOrigin, minimize_over_u2, verdict_for

__all__ = ["ObstructionReport", "analyze", "emit", "read_source", "exit_code_for", "NOTE"]

NOTE = (
    "T1 = T2 = 0 on the lift is necessary for a holomorphic bi-disk through the origin, not sufficient; "
    "NO_OBSTRUCTION_FOUND does not assert that one exists."
)
COFRAME_DISPLAY_DEGREE = 2


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ParseError, DegreeTooHigh, InvalidDefiningFunction, OSError, ValueError)):
        return 2
    if isinstance(exc, NotReal):
        return 3
    if isinstance(exc, (WrongSignature, LeviDegenerate, PivotDegenerate, BranchError)):
        return 4
    return 5


def _error_kind(exc: BaseException) -> str:
    if isinstance(exc, ParseError):
        return exc.kind
    if isinstance(exc, OSError):
        return "InputError"
    return type(exc).__name__


@dataclass
class ObstructionReport:
    source: str
    text: str
    order: int
    verdict: str | None = None
    signature: tuple | None = None
    coframe: list = field(default_factory=list)
    torsions_at_origin: dict = field(default_factory=dict)
    t1_at_origin: str | None = None
    t2_at_origin: str | None = None
    u2_min: float | None = None
    u2_argmin_angles: list | None = None
    checks: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)
    error: dict | None = None
    exit_code: int = 0

    def as_json_dict(self) -> dict:
        out = {
            "version": __version__,
            "input": {"source": self.source, "text": self.text},
            "order": self.order,
            "signature": list(self.signature) if self.signature else None,
            "verdict": self.verdict,
            "torsions_at_origin": self.torsions_at_origin,
            "t1_at_origin": self.t1_at_origin,
            "t2_at_origin": self.t2_at_origin,
            "u2_min": self.u2_min,
            "u2_argmin_angles": self.u2_argmin_angles,
            "checks": self.checks,
            "timings_ms": self.timings_ms,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


def read_source(path: str) -> str:
    """Read a fixture file; lines starting with '#' are blanked (line numbers are kept)."""
    raw = Path(path).read_text(encoding="utf-8")
    return "\n".join("" if line.lstrip().startswith("#") else line for line in raw.split("\n")).rstrip()


def _coframe_rows(cf) -> list:
    rows = []
    for i, row in enumerate(cf.T):
        parts = []
        for j, s in enumerate(row):
            if s.is_zero():
                continue
            low = s.truncate(COFRAME_DISPLAY_DEGREE)
            tail = f" + O({COFRAME_DISPLAY_DEGREE + 1})" if s.max_degree() > COFRAME_DISPLAY_DEGREE else ""
            parts.append(f"({low.render()}{tail})*dz{j + 1}")
        rows.append(f"a{i + 1} = " + " + ".join(parts))
    return rows


def analyze(
    text: str,
    source: str = "-e",
    order: int = 8,
    grid: int = 12,
    iters: int = 200,
    check_structure: bool = False,
    timings: bool = False,
) -> ObstructionReport:
    """Parse, run the pipeline and the U(2) search; errors become report fields."""
    rep = ObstructionReport(source=source, text=text.strip(), order=order)
    clock = {}
    t0 = time.perf_counter()

    def lap(name):
        nonlocal t0
        now = time.perf_counter()
        clock[name] = round((now - t0) * 1000.0, 3)
        t0 = now

    try:
        ctx = VarContext(order)
        F = to_series(parse(text), ctx)
        df = DefiningFunction(F)
        lap("parse")
        result = run_pipeline(df)
        lap("pipeline")
        rep.signature = result.signature
        rep.coframe = _coframe_rows(result.coframe)
        rep.torsions_at_origin = {n: getattr(result.torsions, n).at_origin().render() for n in TORSION_NAMES}
        obs = result.obstructions
        rep.t1_at_origin = obs.T1.at_origin().render()
        rep.t2_at_origin = obs.T2.at_origin().render()
        num = ObstructionAtOrigin.from_upolys(obs.T1, obs.T2)
        if num.is_zero():
            rep.u2_min = 0.0
            rep.u2_argmin_angles = [0.0, 0.0, 0.0, 0.0]
            rep.verdict = verdict_for(0.0, exact_zero=True)
        else:
            found = minimize_over_u2(num, grid=grid, iters=iters)
            rep.u2_min = found.minimum
            rep.u2_argmin_angles = list(found.argmin.angles)
            rep.verdict = verdict_for(found.minimum)
        lap("u2_search")
        if check_structure:
            rep.checks = structure_checks(result)
            lap("checks")
            if not all(rep.checks.values()):
                rep.exit_code = 5
                failed = sorted(k for k, ok in rep.checks.items() if not ok)
                rep.error = {"kind": "InvariantFailure", "message": "structure identities failed: " + ", ".join(failed)}
    except (CRError, ValueError, OSError) as exc:
        rep.exit_code = exit_code_for(exc)
        rep.error = {"kind": _error_kind(exc), "message": str(exc)}
        if isinstance(exc, ParseError):
            rep.error.update(line=exc.line, column=exc.column)
        if isinstance(exc, WrongSignature):
            rep.verdict = "WRONG_SIGNATURE"
            rep.signature = exc.signature
        elif isinstance(exc, LeviDegenerate):
            rep.verdict = "LEVI_DEGENERATE"
    if timings:
        rep.timings_ms = clock
    return rep


def _emit_text(rep: ObstructionReport) -> str:
    lines = [f"crbidisk {__version__}", f"input ({rep.source}): {rep.text}", f"order: {rep.order}"]
    if rep.signature is not None:
        lines.append(f"signature: ({rep.signature[0]}, {rep.signature[1]})")
    if rep.coframe:
        lines.append("coframe (alpha = T dz, low-order terms):")
        lines += ["  " + row for row in rep.coframe]
    if rep.torsions_at_origin:
        lines.append("torsions at origin:")
        lines += [f"  {n} = {v}" for n, v in rep.torsions_at_origin.items()]
        lines.append(f"T1(0) = {rep.t1_at_origin}")
        lines.append(f"T2(0) = {rep.t2_at_origin}")
    if rep.u2_min is not None:
        angles = ", ".join(f"{a:.6f}" for a in rep.u2_argmin_angles)
        lines.append(f"U(2) minimum of |T1|^2 + |T2|^2: {rep.u2_min!r} at angles ({angles})")
    if rep.checks:
        lines.append("structure checks:")
        lines += [f"  {k}: {'pass' if ok else 'FAIL'}" for k, ok in rep.checks.items()]
    if rep.timings_ms:
        lines.append("timings (ms): " + ", ".join(f"{k}={v}" for k, v in rep.timings_ms.items()))
    if rep.verdict is not None:
        lines.append(f"verdict: {rep.verdict}")
    if rep.error is not None:
        where = f" (line {rep.error['line']}, column {rep.error['column']})" if "line" in rep.error else ""
        lines.append(f"error: {rep.error['kind']}{where}: {rep.error['message']}")
    if rep.verdict in ("NO_OBSTRUCTION_FOUND", "INDETERMINATE", "OBSTRUCTED"):
        lines.append("note: " + NOTE)
    return "\n".join(lines) + "\n"


def emit(rep: ObstructionReport, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(rep.as_json_dict(), ensure_ascii=False, separators=(",", ":")) + "\n").encode("utf-8")
    if fmt == "text":
        return _emit_text(rep).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")
