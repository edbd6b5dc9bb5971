"""Batch front end: knot tables in, invariant tables out.

One knot per input line (``name;PD[...]`` or ``name;DT[...]``); jobs run
independently per knot, optionally across a process pool, and results are
emitted in input order as CSV or JSON plus an aligned text report.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .coeff import Z4, ring_from_name
from .complex import dump, scan
from .diagram import (
    NotAKnotError,
    ParseError,
    orient_and_sign,
    parse_knot_line,
    scan_order,
)
from .sinv import from_filtered, khovanov_table, s_invariant
from .sq1 import refine


@dataclass
class Job:
    input_path: str
    mode: str = "s"
    rings: tuple[str, ...] = ("f2",)
    jobs: int = 1
    out_path: str | None = None
    out_format: str = "csv"
    fail_fast: bool = False
    dump_dir: str | None = None


@dataclass
class ResultRow:
    name: str
    mode: str
    s_values: dict = field(default_factory=dict)
    quadruple: tuple | None = None
    kh_tables: dict = field(default_factory=dict)
    time_ms: float = 0.0
    error: str | None = None


def _compute_row(args):
    name, line, mode, rings, dump_dir = args
    t0 = time.perf_counter()
    row = ResultRow(name=name, mode=mode)
    try:
        pd = parse_knot_line(line)
        od = orient_and_sign(pd)
        order = scan_order(od)
        if mode == "s":
            for rname in rings:
                row.s_values[rname] = s_invariant(pd, ring_from_name(rname)).s
        elif mode == "sq1":
            s_f2, quad = refine(pd)
            row.s_values["f2"] = s_f2
            row.quadruple = quad.as_tuple()
        elif mode == "kh":
            for rname in rings:
                ring = ring_from_name(rname)
                C = scan(order, ring, "full")
                table = khovanov_table(from_filtered(C))
                row.kh_tables[rname] = {
                    f"{h},{q}": v for (h, q), v in sorted(table.items())
                }
                if dump_dir:
                    path = os.path.join(dump_dir, f"{name}.{rname}.txt")
                    with open(path, "w") as f:
                        f.write(dump(C))
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if dump_dir and mode != "kh":
            ring = Z4 if mode == "sq1" else ring_from_name(rings[0])
            C = scan(order, ring, "sq1" if mode == "sq1" else "s")
            with open(os.path.join(dump_dir, f"{name}.txt"), "w") as f:
                f.write(dump(C))
    except (ParseError, NotAKnotError, ValueError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    row.time_ms = round((time.perf_counter() - t0) * 1000.0, 3)
    return row


def run(job: Job):
    """Compute one row per knot of the input file, in input order."""
    with open(job.input_path) as f:
        text = f.read()
    tasks = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        name = stripped.split(";", 1)[0].strip() if ";" in stripped else f"line{lineno}"
        tasks.append((name, stripped, job.mode, job.rings, job.dump_dir))
    if job.dump_dir:
        os.makedirs(job.dump_dir, exist_ok=True)
    if job.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=job.jobs) as pool:
            rows = list(pool.map(_compute_row, tasks))
    else:
        rows = [_compute_row(t) for t in tasks]
    if job.fail_fast:
        for row in rows:
            if row.error:
                raise RuntimeError(f"{row.name}: {row.error}")
    return rows


def _ring_columns(rows):
    names = []
    for row in rows:
        for rname in row.s_values:
            if rname not in names:
                names.append(rname)
    return names


def rows_to_csv(rows):
    rings = _ring_columns(rows)
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["name"] + [f"s_{r}" for r in rings]
    header += ["r_plus", "s_plus", "r_minus", "s_minus", "kh", "time_ms", "error"]
    writer.writerow(header)
    for row in rows:
        quad = row.quadruple or ("", "", "", "")
        kh = json.dumps(row.kh_tables, sort_keys=True) if row.kh_tables else ""
        writer.writerow(
            [row.name]
            + [row.s_values.get(r, "") for r in rings]
            + list(quad)
            + [kh, row.time_ms, row.error or ""]
        )
    return buf.getvalue()


def rows_to_json(rows):
    out = []
    for row in rows:
        entry = {
            "name": row.name,
            "mode": row.mode,
            "s": row.s_values,
            "time_ms": row.time_ms,
        }
        if row.quadruple is not None:
            entry["sq1"] = list(row.quadruple)
        if row.kh_tables:
            entry["kh"] = row.kh_tables
        if row.error:
            entry["error"] = row.error
        out.append(entry)
    return json.dumps(out, indent=1, sort_keys=True)


def report(rows):
    """Aligned text table plus summary counts."""
    rings = _ring_columns(rows)
    header = ["name"] + [f"s_{r}" for r in rings] + ["sq1", "time_ms", "status"]
    table = [header]
    nonstandard = 0
    for row in rows:
        quad = ""
        if row.quadruple is not None:
            quad = "(" + ",".join(str(x) for x in row.quadruple) + ")"
            s = row.s_values.get("f2")
            if s is not None and any(x != s for x in row.quadruple):
                nonstandard += 1
        table.append(
            [row.name]
            + [str(row.s_values.get(r, "")) for r in rings]
            + [quad, str(row.time_ms), row.error or "ok"]
        )
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
        for r in table
    ]
    done = sum(1 for r in rows if not r.error)
    lines.append("")
    lines.append(
        f"{done} of {len(rows)} knots processed; "
        f"{nonstandard} non-standard refinement quadruples"
    )
    return "\n".join(lines)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sinv",
        description="s-invariants and their refinement from knot tables",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    comp = sub.add_parser("compute", help="process a knot table")
    comp.add_argument("--input", required=True)
    comp.add_argument("--mode", choices=("s", "sq1", "kh"), default="s")
    comp.add_argument("--ring", default="f2")
    comp.add_argument("--out")
    comp.add_argument("--format", choices=("csv", "json"), default="csv")
    comp.add_argument("--jobs", type=int, default=1)
    comp.add_argument("--fail-fast", action="store_true")
    comp.add_argument("--dump-complex", dest="dump_dir")
    args = parser.parse_args(argv)

    rings = tuple(r.strip() for r in args.ring.split(",") if r.strip())
    if args.mode == "sq1":
        rings = ("z4", "f2")
    try:
        for rname in rings:
            ring_from_name(rname)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    job = Job(
        input_path=args.input,
        mode=args.mode,
        rings=rings,
        jobs=max(1, args.jobs),
        out_path=args.out,
        out_format=args.format,
        fail_fast=args.fail_fast,
        dump_dir=args.dump_dir,
    )
    try:
        rows = run(job)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = rows_to_csv(rows) if job.out_format == "csv" else rows_to_json(rows)
    if job.out_path:
        try:
            with open(job.out_path, "w") as f:
                f.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    print(report(rows))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
