"""Continuous error correction of the three-qubit bit-flip code with a measurement-driven estimator."""

__version__ = "0.1.0"
