"""Собственные значения осциллятора Вебера с нечетной парой точечных взаимодействий."""
__version__ = "0.1.0"

from .core.eigen_condition import ProblemParams, eig_residual_G
from .core.errors import WeberSpectraError
from .core.spectrum_solver import Eigenvalue, RectRegion, SolverConfig, count_zeros_rect, solve_rect
from .core.sweep_manager import Branch, count_sweep, trajectory

__all__ = [
    '__version__',
    'ProblemParams',
    'eig_residual_G',
    'WeberSpectraError',
    'Eigenvalue',
    'RectRegion',
    'SolverConfig',
    'count_zeros_rect',
    'solve_rect',
    'Branch',
    'count_sweep',
    'trajectory',
]
