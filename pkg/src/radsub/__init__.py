"""Radial-projection supgradient methods for conic and general convex programs."""

from .cones import ConeOracle, OrthantCone, gauge_norm, radial_project
from .conic import (ConicProgram, LinearRateFit, algorithm1, algorithm2, fit_linear_rate,
                    iteration_bound_alg1, iteration_bound_alg2)
from .convex import (ConvexProgram, LiftedCone, LineSearchResult, algorithm_a, algorithm_b,
                     iteration_bound_a, iteration_bound_b, lift_to_conic, lifted_supgradient,
                     line_search, select_g)
from .errors import *  # noqa: F401,F403
from .linalg import KernelProjector, LinearMap, build_projector
from .oracles import Box, MaxAffine, Polyhedron, QuadOverLin, SquaredDistance, WholeSpace
from .report import IterRecord, SolveReport, SolverConfig, read_trace_csv, trace_csv, write_trace_csv

__version__ = "0.1.0"
