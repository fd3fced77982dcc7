"""Hybrid quantum-walk hash function on a path graph, with its evaluation battery."""

from .analysis import (
    AnalysisResult,
    AvalancheReport,
    BirthdayReport,
    CollisionReport,
    SensitivityReport,
    UniformityReport,
    analyze,
    avalanche_test,
    birthday_report,
    collision_test,
    omega_count,
    run_trials,
    sensitivity_suite,
    uniformity_test,
)
from .estimator import QuantumWalkHasher
from .exceptions import (
    ContractViolationError,
    DegenerateStateError,
    InvalidDimensionError,
    InvalidInputError,
    InvalidParameterError,
    QWHashError,
)
from .hashing import HashValue, QhfParams, evolve, measure_positions, qhf, qhf_batch
from .operators import Boundary, CoinKind, WalkOperators

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "AvalancheReport",
    "BirthdayReport",
    "Boundary",
    "CoinKind",
    "CollisionReport",
    "ContractViolationError",
    "DegenerateStateError",
    "HashValue",
    "InvalidDimensionError",
    "InvalidInputError",
    "InvalidParameterError",
    "QWHashError",
    "QhfParams",
    "QuantumWalkHasher",
    "SensitivityReport",
    "UniformityReport",
    "WalkOperators",
    "analyze",
    "avalanche_test",
    "birthday_report",
    "collision_test",
    "evolve",
    "measure_positions",
    "omega_count",
    "qhf",
    "qhf_batch",
    "run_trials",
    "sensitivity_suite",
    "uniformity_test",
]
