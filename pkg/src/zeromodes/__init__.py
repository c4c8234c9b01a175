"""Entanglement entropy of quadratic bosonic and fermionic lattice systems near zero modes."""

from . import boson_chain, boson_pair, fermion_chain, matfun, scanlab
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DegenerateMode,
    DivergentEigenvalue,
    DomainError,
    FitError,
    InconclusiveLimit,
    NotPositiveDefinite,
    UnboundedHamiltonian,
    ZeroModePresent,
    ZeromodesError,
)

__version__ = "0.1.0"

__all__ = [
    "matfun",
    "boson_pair",
    "boson_chain",
    "fermion_chain",
    "scanlab",
    "ZeromodesError",
    "DomainError",
    "ConvergenceError",
    "NotPositiveDefinite",
    "ZeroModePresent",
    "DivergentEigenvalue",
    "UnboundedHamiltonian",
    "InconclusiveLimit",
    "ConsistencyError",
    "DegenerateMode",
    "FitError",
]
