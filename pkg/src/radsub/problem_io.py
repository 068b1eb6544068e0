"""Problem files, problem resolution for the CLI, and run summaries.

A problem file is JSON::

    {"kind": "lp", "name": "canonical",
     "A": [[1, 1, 1]], "b": [3], "c": [1, 0, 0], "e": [1, 1, 1],
     "params": {"x_bar": [0.5, 2.5, 0], "z_star": 0, "f_hat": 2}}

or ``{"kind": "catalog", "name": "abs1d"}``. LP files describe
``min c.x  s.t.  Ax = b, x >= 0`` with a strictly positive ``e``
satisfying ``A e = b``. All ``params`` are optional.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import catalog
from .cones import OrthantCone
from .conic import ConicProgram
from .convex import ConvexProgram, lift_to_conic, lifted_point
from .errors import InvalidProblem, TooLarge
from .oracles import Box, MaxAffine
from .verify import lp_vertex_optimum

LP_PARAMS = {"x_bar", "z_star", "f_hat"}
FEAS_TOL = 1e-8


@dataclass
class ProblemFile:
    kind: str
    name: str = "problem"
    A: list = field(default_factory=list)
    b: list = field(default_factory=list)
    c: list = field(default_factory=list)
    e: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc) -> "ProblemFile":
        if not isinstance(doc, dict):
            raise InvalidProblem("problem file must hold a JSON object")
        unknown = set(doc) - {"kind", "name", "A", "b", "c", "e", "params"}
        if unknown:
            raise InvalidProblem(f"unknown keys in problem file: {sorted(unknown)}")
        if "kind" not in doc:
            raise InvalidProblem("problem file needs a 'kind'")
        pf = cls(**doc)
        pf.validate()
        return pf

    @classmethod
    def load(cls, path) -> "ProblemFile":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidProblem(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        return asdict(self)

    def validate(self):
        if self.kind == "catalog":
            if self.name not in catalog.CATALOG:
                raise InvalidProblem(f"unknown catalog problem {self.name!r}")
            if self.params:
                raise InvalidProblem("catalog problems take no params")
            return
        if self.kind != "lp":
            raise InvalidProblem(f"kind must be 'lp' or 'catalog', got {self.kind!r}")
        c = np.asarray(self.c, dtype=float).reshape(-1)
        e = np.asarray(self.e, dtype=float).reshape(-1)
        n = c.size
        if n == 0 or e.size != n:
            raise InvalidProblem(f"c and e must have the same nonzero length ({n} vs {e.size})")
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise InvalidProblem(f"A must be a list of rows of length {n}")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != A.shape[0]:
            raise InvalidProblem(f"b has {b.size} entries, A has {A.shape[0]} rows")
        if not np.all(e > 0):
            raise InvalidProblem("e must be strictly positive")
        if A.shape[0] and np.max(np.abs(A @ e - b)) > FEAS_TOL * max(1.0, np.max(np.abs(b))):
            raise InvalidProblem("A e != b")
        unknown = set(self.params) - LP_PARAMS
        if unknown:
            raise InvalidProblem(f"unknown params: {sorted(unknown)}")
        if "x_bar" in self.params and len(self.params["x_bar"]) != n:
            raise InvalidProblem("params.x_bar has the wrong length")


def lp_optimum(A, b, c) -> float:
    """Optimal value of ``min c.x, Ax = b, x >= 0``; vertex enumeration when small."""
    try:
        return lp_vertex_optimum(A, b, c)[0]
    except TooLarge:
        sol = linprog(c, A_eq=A if len(A) else None, b_eq=b if len(b) else None,
                      bounds=[(0, None)] * len(c), method="highs")
        if sol.status != 0:
            raise InvalidProblem(f"linprog could not solve the LP: {sol.message}")
        return float(sol.fun)


@dataclass
class Problem:
    """A resolved problem in both of its forms.

    ``conic`` is the LP itself or the lifted version of a convex problem;
    ``convex`` is the convex problem or the LP seen as ``min c.x`` over
    the orthant. ``x_bar`` is the conic warm start and ``z_star`` the known
    optimal value, if any.
    """

    name: str
    kind: str
    conic: ConicProgram
    convex: ConvexProgram
    x_bar: np.ndarray
    z_star: Optional[float]


def _lp_problem(pf: ProblemFile, compute_optimum=True) -> Problem:
    n = len(pf.c)
    A = np.asarray(pf.A, dtype=float).reshape(-1, n)
    b = np.asarray(pf.b, dtype=float).reshape(-1)
    c = np.asarray(pf.c, dtype=float)
    e = np.asarray(pf.e, dtype=float)
    conic = ConicProgram(c, A, b, OrthantCone(e), name=pf.name)
    z_star = pf.params.get("z_star")
    if z_star is None and compute_optimum:
        z_star = lp_optimum(A, b, c)
    z_star = None if z_star is None else float(z_star)
    f_hat = float(pf.params.get("f_hat", conic.ce + 1.0))
    convex = ConvexProgram(MaxAffine(c[None, :], [0.0]), Box(np.zeros(n), np.full(n, np.inf)),
                           e, f_hat, A=A, b=b, name=pf.name, f_star=z_star)
    if "x_bar" in pf.params:
        x_bar = np.asarray(pf.params["x_bar"], dtype=float)
    else:
        x_bar = conic.default_warm_start()
    return Problem(pf.name, "lp", conic, convex, x_bar, z_star)


def _catalog_problem(name) -> Problem:
    convex = catalog.get(name)
    conic = lift_to_conic(convex)
    x_bar = lifted_point(convex, convex.e_bar, convex.f_bar)
    return Problem(name, "catalog", conic, convex, x_bar, convex.f_star)


def build(pf: ProblemFile) -> Problem:
    """Both forms of the problem a validated :class:`ProblemFile` describes."""
    if pf.kind == "catalog":
        return _catalog_problem(pf.name)
    return _lp_problem(pf)


def resolve(spec: str) -> Problem:
    """``catalog:<name>``, a bare catalog name, ``lp:<path>`` or a path to a problem file."""
    if spec.startswith("catalog:"):
        name = spec.split(":", 1)[1]
        if name not in catalog.CATALOG:
            raise InvalidProblem(f"unknown catalog problem {name!r}; choose from {sorted(catalog.CATALOG)}")
        return _catalog_problem(name)
    if spec in catalog.CATALOG:
        return _catalog_problem(spec)
    path = spec.split(":", 1)[1] if spec.startswith("lp:") else spec
    return build(ProblemFile.load(path))


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.floating):
        return _clean(float(v))
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class RunSummary:
    problem: str
    algorithm: str
    termination: str
    iterations: int
    best_objective: float
    best_gap: Optional[float] = None
    best_point: Optional[list] = None
    wall_time_s: float = 0.0
    epsilon: Optional[float] = None
    z_star: Optional[float] = None
    seed: Optional[int] = None
    geometry: Optional[dict] = None
    tolerances: dict = field(default_factory=dict)

    def to_dict(self):
        return _clean(asdict(self))

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, doc) -> "RunSummary":
        return cls(**doc)

    @classmethod
    def from_json(cls, text) -> "RunSummary":
        return cls.from_dict(json.loads(text))
