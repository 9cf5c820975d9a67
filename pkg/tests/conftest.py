import pytest

from weber_spectra.core.config import Config
from weber_spectra.core.eigen_condition import ProblemParams
from weber_spectra.core.spectrum_solver import RectRegion, SolverConfig


@pytest.fixture
def config(monkeypatch):
    monkeypatch.delenv('WEBER_SPECTRA_THREADS', raising=False)
    return Config()


@pytest.fixture
def solver_cfg():
    return SolverConfig(nu_window=RectRegion(-0.5, 8.0, -2.0, 2.0))


@pytest.fixture
def b1_z10i():
    return ProblemParams.imaginary(1.0, 10.0)
