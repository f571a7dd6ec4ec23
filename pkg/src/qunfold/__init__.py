"""Readout-error mitigation by unfolding: response matrices, simulation and solvers."""

from .core import BitOrdering, CountVector, ResponseMatrix
from .unfold import UnfoldResult, constrained_ls, ibu, matrix_inversion, metrics

__version__ = "0.1.0"
