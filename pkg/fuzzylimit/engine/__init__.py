"""
Numerical engines: interval kernels, box evaluation, limits and theorem checks.
"""

from fuzzylimit.engine.intervals import EvalMode
from fuzzylimit.engine.limits import LimitEngine
from fuzzylimit.engine.theorems import TheoremSuite

__all__ = ["EvalMode", "LimitEngine", "TheoremSuite"]
