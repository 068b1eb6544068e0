"""Solver configuration, iterate traces and CSV export."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

TRACE_COLUMNS = ("k", "lambda_min", "obj_pi", "gap_rel", "step_norm", "outer_idx", "wall_ns")


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 1000
    # Algorithm 1/B stop once lambda_min(x_k) >= -optimality_tol
    optimality_tol: float = 1e-10
    zero_gradient_tol: float = 1e-14
    # snap iterates back onto their affine slice every this many steps
    reorthogonalize_every: int = 100
    # keep x_k and the boundary point for every record
    keep_points: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.optimality_tol < 0 or self.zero_gradient_tol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.reorthogonalize_every < 1:
            raise ValueError("reorthogonalize_every must be >= 1")


@dataclass
class IterRecord:
    k: int
    lambda_min: float
    objective: float
    gap_rel: float = math.nan
    step_norm: float = math.nan
    outer_idx: int = 0
    wall_ns: int = 0
    x: Optional[np.ndarray] = None
    point: Optional[np.ndarray] = None
    # convex front end only: the level t_k and the boundary value t'_k
    t: Optional[float] = None
    t_point: Optional[float] = None
    alpha: Optional[float] = None


@dataclass
class SolveReport:
    algorithm: str
    records: List[IterRecord] = field(default_factory=list)
    termination: str = "running"
    best_objective: float = math.inf
    best_point: Optional[np.ndarray] = None
    best_index: int = -1
    optimal_value: Optional[float] = None
    tolerances: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return max(len(self.records) - 1, 0)

    def add(self, rec: IterRecord, point=None):
        self.records.append(rec)
        if rec.objective < self.best_objective:
            self.best_objective = rec.objective
            self.best_index = rec.k
            if point is not None:
                self.best_point = np.array(point, dtype=float)

    def gaps(self) -> np.ndarray:
        return np.array([r.gap_rel for r in self.records], dtype=float)

    def best_gaps(self) -> np.ndarray:
        """Running minimum of the relative gap."""
        g = self.gaps()
        if g.size == 0:
            return g
        return np.fmin.accumulate(g)

    @property
    def best_gap(self) -> float:
        g = self.gaps()
        if g.size == 0 or np.all(np.isnan(g)):
            return math.nan
        return float(np.nanmin(g))

    def first_index_within(self, eps) -> Optional[int]:
        """Smallest k with gap_k <= eps, or None."""
        for r in self.records:
            if r.gap_rel <= eps:
                return r.k
        return None

    def iterates(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    def points(self) -> np.ndarray:
        return np.array([r.point for r in self.records])


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def trace_csv(report: SolveReport, include_timing=False) -> str:
    """Render the trace as CSV text.

    ``wall_ns`` is written as 0 unless ``include_timing`` so that reruns
    produce identical files.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in report.records:
        writer.writerow([
            _fmt(r.k), _fmt(r.lambda_min), _fmt(r.objective), _fmt(r.gap_rel),
            _fmt(r.step_norm), _fmt(r.outer_idx), _fmt(r.wall_ns if include_timing else 0),
        ])
    return buf.getvalue()


def write_trace_csv(report: SolveReport, path, include_timing=False):
    with open(path, "w", newline="") as fh:
        fh.write(trace_csv(report, include_timing=include_timing))


def read_trace_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        out.append({
            "k": int(row["k"]),
            "lambda_min": float(row["lambda_min"]),
            "obj_pi": float(row["obj_pi"]),
            "gap_rel": float(row["gap_rel"]),
            "step_norm": float(row["step_norm"]),
            "outer_idx": int(row["outer_idx"]),
            "wall_ns": int(row["wall_ns"]),
        })
    return out
