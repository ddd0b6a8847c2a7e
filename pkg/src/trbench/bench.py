"""Benchmark orchestration: solver x problem grids, CSV persistence and
Dolan-More performance profiles.
"""

from __future__ import annotations

import csv
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from xml.sax.saxutils import escape

import numpy as np

from .driver import CONVERGED, FE_BUDGET_EXHAUSTED, TrConfig, minimize
from .errors import CsvFormatError
from .problems import ProblemInstance, make

CSV_HEADER = [
    "problem", "n", "solver", "status", "time_sec",
    "fe", "ge", "inner_iters", "f_final", "gnorm_final",
]


@dataclass
class RunRecord:
    """One benchmark row: a solver applied to one problem instance."""

    problem: str
    n: int
    solver: str
    status: str
    time_sec: float
    fe: int
    ge: int
    inner_iters: int
    f_final: float
    gnorm_final: float


@dataclass
class ProfileCurve:
    """Right-continuous step function of one solver's performance ratios.

    ``points`` holds (tau, fraction) breakpoints on the log2-ratio axis;
    ``r_max`` is the largest finite log2 ratio over the whole record set.
    ``n_dropped`` counts problems no solver converged on (excluded from
    the denominator); it is the same for every curve of one profile.
    """

    solver: str
    points: list[tuple[float, float]]
    r_max: float
    n_dropped: int


def _count_eval(problem: ProblemInstance):
    """Wrap a problem so evaluations are counted even if one raises."""
    counter = {"fe": 0}

    def evaluate(x):
        counter["fe"] += 1
        return problem.eval(x)

    wrapped = ProblemInstance(
        name=problem.name, n=problem.n, eval=evaluate, x0=problem.x0
    )
    return wrapped, counter


def _run_one(name: str, n: int, solver: str, config: TrConfig) -> RunRecord:
    problem, counter = _count_eval(make(name, n))
    try:
        result = minimize(problem, replace(config, solver=solver))
    except Exception:
        # A diverging or raising evaluation ends the run; keep the counts.
        return RunRecord(
            problem=name, n=n, solver=solver, status=FE_BUDGET_EXHAUSTED,
            time_sec=0.0, fe=counter["fe"], ge=counter["fe"], inner_iters=0,
            f_final=math.nan, gnorm_final=math.nan,
        )
    return RunRecord(
        problem=name, n=n, solver=solver, status=result.status,
        time_sec=result.subproblem_time, fe=result.fe_count, ge=result.ge_count,
        inner_iters=result.inner_iterations_total, f_final=result.f_final,
        gnorm_final=result.gnorm_final,
    )


def run_suite(
    solvers: list[str],
    problems: list[tuple[str, int]],
    config: TrConfig | None = None,
) -> list[RunRecord]:
    """Run every solver on every (name, n) problem; rows sorted by
    (problem, solver).  TRBENCH_THREADS caps the worker pool.
    """
    if config is None:
        config = TrConfig()
    tasks = [(name, n, solver) for name, n in problems for solver in solvers]
    env_cap = os.environ.get("TRBENCH_THREADS")
    workers = int(env_cap) if env_cap else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(tasks))) if tasks else 1
    if workers == 1:
        records = [_run_one(name, n, solver, config) for name, n, solver in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(
                pool.map(lambda t: _run_one(t[0], t[1], t[2], config), tasks)
            )
    records.sort(key=lambda r: (r.problem, r.n, r.solver))
    return records


def _metric_value(record: RunRecord, metric: str) -> float:
    if metric == "fe":
        return float(record.fe)
    if metric == "time":
        return float(record.time_sec)
    raise ValueError(f"unknown metric {metric!r}, expected 'fe' or 'time'")


def performance_profile(
    records: list[RunRecord], metric: str = "fe"
) -> list[ProfileCurve]:
    """Dolan-More profiles on a log2 ratio axis.

    For each problem, each solver's metric is divided by the best metric
    among solvers that converged on it; solvers that failed get an
    infinite ratio and never count.  Problems that no solver converged on
    are dropped from the denominator (a warning reports how many).
    """
    if not records:
        raise ValueError("no records")
    solvers: list[str] = []
    for record in records:
        if record.solver not in solvers:
            solvers.append(record.solver)

    by_problem: dict[tuple[str, int], list[RunRecord]] = {}
    for record in records:
        by_problem.setdefault((record.problem, record.n), []).append(record)

    ratios: dict[str, list[float]] = {s: [] for s in solvers}
    dropped = 0
    for rows in by_problem.values():
        solved = [r for r in rows if r.status == CONVERGED]
        if not solved:
            dropped += 1
            continue
        best = min(_metric_value(r, metric) for r in solved)
        for solver in solvers:
            mine = [r for r in rows if r.solver == solver and r.status == CONVERGED]
            if not mine:
                ratios[solver].append(math.inf)
                continue
            value = _metric_value(mine[0], metric)
            if best > 0.0:
                ratios[solver].append(value / best)
            else:
                ratios[solver].append(1.0 if value == 0.0 else math.inf)
    if dropped:
        warnings.warn(f"{dropped} problem(s) solved by no solver were dropped")

    total = len(by_problem) - dropped
    if total == 0:
        raise ValueError("every problem was unsolved; no profile to build")
    all_taus = [
        math.log2(r) for rs in ratios.values() for r in rs if math.isfinite(r)
    ]
    r_max = max(all_taus) if all_taus else 0.0

    curves = []
    for solver in solvers:
        taus = sorted(math.log2(r) for r in ratios[solver] if math.isfinite(r))
        points: list[tuple[float, float]] = []
        seen = 0
        for i, tau in enumerate(taus):
            seen = i + 1
            if i + 1 < len(taus) and taus[i + 1] == tau:
                continue  # collapse ties into one breakpoint
            points.append((tau, seen / total))
        curves.append(
            ProfileCurve(solver=solver, points=points, r_max=r_max, n_dropped=dropped)
        )
    return curves


def write_csv(records: list[RunRecord], path) -> None:
    """Write records with the fixed schema; floats keep full precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.problem, r.n, r.solver, r.status, repr(float(r.time_sec)),
                    r.fe, r.ge, r.inner_iters, repr(float(r.f_final)),
                    repr(float(r.gnorm_final)),
                ]
            )


def read_csv(path) -> list[RunRecord]:
    """Read records written by :func:`write_csv`."""
    records = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise CsvFormatError(f"line 1: bad header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise CsvFormatError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            try:
                records.append(
                    RunRecord(
                        problem=row[0], n=int(row[1]), solver=row[2], status=row[3],
                        time_sec=float(row[4]), fe=int(row[5]), ge=int(row[6]),
                        inner_iters=int(row[7]), f_final=float(row[8]),
                        gnorm_final=float(row[9]),
                    )
                )
            except ValueError as exc:
                raise CsvFormatError(f"line {lineno}: {exc}") from exc
    return records


def write_profile(curves: list[ProfileCurve], data_path, svg_path=None) -> None:
    """Write profile breakpoints as CSV and optionally a standalone SVG.

    Each curve contributes its breakpoints plus one terminal row at r_max
    carrying its final fraction, so the step function can be drawn to the
    right edge directly from the file.
    """
    with open(data_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["solver", "tau", "fraction"])
        for curve in curves:
            final = curve.points[-1][1] if curve.points else 0.0
            for tau, fraction in curve.points:
                writer.writerow([curve.solver, repr(float(tau)), repr(float(fraction))])
            writer.writerow([curve.solver, repr(float(curve.r_max)), repr(float(final))])
    if svg_path is not None:
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(render_profile_svg(curves))


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def render_profile_svg(curves: list[ProfileCurve]) -> str:
    """Render profile curves as a self-contained 800x500 SVG line plot."""
    width, height = 800, 500
    left, right, top, bottom = 70, 30, 40, 60
    plot_w = width - left - right
    plot_h = height - top - bottom
    x_max = max([c.r_max for c in curves] + [1e-9])

    def sx(tau: float) -> float:
        return left + plot_w * (tau / x_max if x_max > 0 else 0.0)

    def sy(fraction: float) -> float:
        return top + plot_h * (1.0 - fraction)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 15}" text-anchor="middle" '
        'font-family="sans-serif" font-size="14">log2 performance ratio</text>',
        f'<text x="18" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
        'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">fraction of problems</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(frac)
        parts.append(
            f'<line x1="{left}" y1="{y:.1f}" x2="{left + plot_w}" y2="{y:.1f}" '
            'stroke="#ddd" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{frac:g}</text>'
        )
    n_ticks = min(int(math.ceil(x_max)), 10) or 1
    for k in range(n_ticks + 1):
        tau = x_max * k / n_ticks
        x = sx(tau)
        parts.append(
            f'<line x1="{x:.1f}" y1="{top + plot_h}" x2="{x:.1f}" '
            f'y2="{top + plot_h + 5}" stroke="#333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{top + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{tau:.2g}</text>'
        )
    for idx, curve in enumerate(curves):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = [(sx(0.0), sy(0.0))]
        level = 0.0
        for tau, fraction in curve.points:
            coords.append((sx(tau), sy(level)))
            coords.append((sx(tau), sy(fraction)))
            level = fraction
        coords.append((sx(x_max), sy(level)))
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        ly = top + 18 + 18 * idx
        parts.append(
            f'<line x1="{left + plot_w - 150}" y1="{ly}" x2="{left + plot_w - 120}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 112}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="13">{escape(curve.solver)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
