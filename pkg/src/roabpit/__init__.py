"""Deterministic identity testing for read-once oblivious algebraic branching programs."""

from .errors import RoabpError
from .field import DEFAULT_P, FieldMatrix, Poly, PrimeFieldElement
from .cyclic import CyclicRingElement, ring_monomial
from .roabp import Roabp, brute_force_expand, eval_in_ring, generate, parse, serialize
from .modular import SubstitutionParams, collision_instance, pit_modular, scan_bad_set, substitute_gamma
from .curve import CurveConfig, hitting_pit

__all__ = [
    "RoabpError", "DEFAULT_P", "FieldMatrix", "Poly", "PrimeFieldElement", "CyclicRingElement",
    "ring_monomial", "Roabp", "brute_force_expand", "eval_in_ring", "generate", "parse", "serialize",
    "SubstitutionParams", "collision_instance", "pit_modular", "scan_bad_set", "substitute_gamma",
    "CurveConfig", "hitting_pit",
]
