"""Benchmarking toolkit for preconditioned conjugate gradient on sparse SPD systems."""

from precond_bench.version import __version__

__all__ = ["__version__"]
