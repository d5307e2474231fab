"""Exact coverage tests for ball arrangements.

Decides whether a finite intersection of open balls is covered by a
finite union of closed balls, with witness-point certificates, through
per-ball quadratic programs over radical-hyperplane polyhedra.
"""

from .errors import (BallCoverError, DegenerateDecision, DegenerateInput,
                     MaxIterationsExceeded, NumericallyDegenerate,
                     RetriesExhausted, StepTooCoarse, WitnessExtractionFailed)
from .geometry import (Ball, BallSystem, HalfSpace, Orientation, PairRelation,
                       Tolerances, TrivialVerdict, classify_pair, hyperplane,
                       preprocess, strict_membership)
from .lp import (LinearProgram, LpOutcome, LpStatus, chebyshev_center,
                 separating_direction, solve_lp)
from .polyhedron import (FromLambda, FromV, HPolyhedron, VRepresentation,
                         build_polyhedron, enumerate_vertices, is_unbounded)
from .qp import (ConvexQp, InteriorPoint, QpOutcome, QpStatus,
                 interior_point_of_intersection, kkt_residual, solve_qp)
from .engine import (Case, DecisionReport, SubproblemCertificate, decide,
                     decide_concave, decide_instance, extract_witness,
                     verify_witness)
from .sequential import (SequentialState, Verdict, add_ball, initial_state,
                         verify_connectedness_conditions)
from .instances import (GenConfig, OracleVerdict, generate, grid_oracle,
                        hit_and_run_oracle)

__version__ = "0.1.0"

__all__ = [
    "Ball", "BallSystem", "HalfSpace", "Orientation", "PairRelation",
    "Tolerances", "TrivialVerdict", "classify_pair", "hyperplane",
    "preprocess", "strict_membership",
    "LinearProgram", "LpOutcome", "LpStatus", "chebyshev_center",
    "separating_direction", "solve_lp",
    "FromLambda", "FromV", "HPolyhedron", "VRepresentation",
    "build_polyhedron", "enumerate_vertices", "is_unbounded",
    "ConvexQp", "InteriorPoint", "QpOutcome", "QpStatus",
    "interior_point_of_intersection", "kkt_residual", "solve_qp",
    "Case", "DecisionReport", "SubproblemCertificate", "decide",
    "decide_concave", "decide_instance", "extract_witness", "verify_witness",
    "SequentialState", "Verdict", "add_ball", "initial_state",
    "verify_connectedness_conditions",
    "GenConfig", "OracleVerdict", "generate", "grid_oracle",
    "hit_and_run_oracle",
    "BallCoverError", "DegenerateDecision", "DegenerateInput",
    "MaxIterationsExceeded", "NumericallyDegenerate", "RetriesExhausted",
    "StepTooCoarse", "WitnessExtractionFailed",
]
