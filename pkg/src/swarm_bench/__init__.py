"""Deterministic 2-D multi-robot exploration simulator and metaheuristic
benchmarking harness."""

__version__ = "0.1.0"

from .kernels import BACKEND as kernel_backend  # noqa: F401
