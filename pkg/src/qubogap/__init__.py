"""QUBO embeddings of clustering and SVM training, with exact spectral-gap analysis."""

from .qubo import (
    ContractError, IsingInstance, QuboInstance, SpectrumSummary,
    energy, flip_delta, from_symmetric, ising_energy, normalize_inf, read_qubo,
    to_ising, write_qubo,
)
from .spectrum import enumerate_spectrum, spectral_gap

__version__ = "0.1.0"
