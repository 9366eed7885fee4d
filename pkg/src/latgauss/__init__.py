"""Discrete Gaussian lattice sampling, quantum-algorithm simulation and attack cost toolkit."""

__version__ = "0.1.0"
