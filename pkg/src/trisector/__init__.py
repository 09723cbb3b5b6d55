"""Exact series and geometric iteration for the distance trisector curves."""

from .field import Qs3
from .series import TruncSeries
from .solver import Branch, BranchSolution, solve_branch

__all__ = ["Qs3", "TruncSeries", "Branch", "BranchSolution", "solve_branch"]
__version__ = "0.1.0"
