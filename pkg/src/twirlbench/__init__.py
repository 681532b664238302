"""Interleaved randomized-benchmarking simulations with error bounds.

Submodules
----------
channels     PTM/Choi/Kraus representations and channel metrics
streams      counter-based deterministic random streams
groups       one/two-qubit Clifford groups, Haar sampling, 1q compilation
kak          KAK decomposition and 3-CNOT synthesis of SU(4)
noise        error models and noisy-gate construction
protocols    benchmarking circuit generation for the four twirl groups
engine       exact/sampled circuit simulation
estimators   decay fits, infidelity estimators, statistical/systematic/XRB bounds
gauge        self-consistent gauge construction and comparison values
presets      named experiment configurations
cli          command-line runner (run / sweep / ingest)
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
