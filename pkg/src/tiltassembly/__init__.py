"""Tilt assembly toolkit.

Deciders and construction sequences live in :mod:`.engine`; the tilt
simulator and maze factories in :mod:`.world`; polycubes in :mod:`.cube3d`.
"""

from .engine import (
    ConstructionSequence,
    ConstructionStep,
    DecisionResult,
    Status,
    apply_step,
    decide,
    decide_exact,
    decide_simple,
    verify,
)
from .grid import Direction, Polyomino, canonicalize, enumerate_polyominoes, parse_polyomino

__version__ = "0.1.0"

__all__ = [
    "ConstructionSequence",
    "ConstructionStep",
    "DecisionResult",
    "Direction",
    "Polyomino",
    "Status",
    "apply_step",
    "canonicalize",
    "decide",
    "decide_exact",
    "decide_simple",
    "enumerate_polyominoes",
    "parse_polyomino",
    "verify",
]
