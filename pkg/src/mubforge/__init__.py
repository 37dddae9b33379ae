"""Numerical search for mutually unbiased bases built on complex Hadamard matrices in small dimensions."""

from .catalog import FamilyId, build, equivalence_test, equivalence_witness
from .linalg import hadamard_basis, is_hadamard, mu_deviation
from .solver import IterationOutcome, MeasurementConstraint, SolverConfig, Status, iterate, mu_distance
from .analysis import MUVectorSet, Triplet, collect, third_bases, extend_triplet, orbit, classify_orbits

__all__ = [
    "FamilyId", "build", "equivalence_test", "equivalence_witness",
    "hadamard_basis", "is_hadamard", "mu_deviation",
    "IterationOutcome", "MeasurementConstraint", "SolverConfig", "Status", "iterate", "mu_distance",
    "MUVectorSet", "Triplet", "collect", "third_bases", "extend_triplet", "orbit", "classify_orbits",
]
