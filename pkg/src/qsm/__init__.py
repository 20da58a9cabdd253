"""Quantum statistical memory of stationary processes via infinite MPS."""
from .errors import (InputError, NonErgodic, NotIrreducible, NumericalError, QSMError)
from .machine import (EpsilonMachine, classical_complexity, renyi_entropy, stationary_distribution,
                      validate)
from .imps import FixedPointPair, SiteMatrices, fixed_points, site_matrices_from_machine
from .canonical import CanonicalForm, canonical_form, quantum_complexity, truncate
from .qsim import QSimulator, build_qsimulator
from .analysis import analyze, run
from . import zoo

__version__ = "0.1.0"

__all__ = [
    "QSMError", "InputError", "NumericalError", "NonErgodic", "NotIrreducible",
    "EpsilonMachine", "validate", "stationary_distribution", "renyi_entropy", "classical_complexity",
    "SiteMatrices", "FixedPointPair", "site_matrices_from_machine", "fixed_points",
    "CanonicalForm", "canonical_form", "quantum_complexity", "truncate",
    "QSimulator", "build_qsimulator", "analyze", "run", "zoo",
]
