"""Grover search and eigenmarking on a dense statevector simulator."""
from .grover import WinnerScenario, run_original_grover
from .schemes import SchemeKind, run_scheme

__all__ = ["WinnerScenario", "run_original_grover", "SchemeKind", "run_scheme"]
