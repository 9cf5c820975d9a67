import math

import numpy as np
import pytest

from weber_spectra.core.errors import DomainError, PoleError
from weber_spectra.core.gamma_core import check_duplication, gamma, log_gamma, recip_gamma, stirling_residual


@pytest.mark.parametrize("w, expected", [
    (1.0, 1.0),
    (-3.0, 0.0),
    (0.5, 1.0 / math.sqrt(math.pi)),
])
def test_recip_gamma_values(w, expected):
    assert abs(recip_gamma(w) - expected) <= 1e-15


def test_recip_gamma_factorials():
    for n in range(16):
        expected = 1.0 / math.factorial(n)
        assert abs(recip_gamma(n + 1.0) - expected) <= 1e-12 * expected


def test_recip_gamma_snaps_to_exact_zero():
    for n in range(31):
        assert recip_gamma(-float(n)) == 0
        assert recip_gamma(complex(-n, 1e-13)) == 0


def test_recip_gamma_real_axis_has_zero_imaginary_part():
    values = recip_gamma(np.linspace(-4.3, 6.1, 40))
    assert values.shape == (40,)
    assert np.all(values.imag == 0.0)


def test_recip_gamma_conjugation():
    w = np.array([0.3 + 2.0j, -4.2 - 1.5j, 7.7 + 0.1j])
    direct = recip_gamma(np.conj(w))
    mirrored = np.conj(recip_gamma(w))
    assert np.all(np.abs(direct - mirrored) <= 1e-13 * np.abs(mirrored))


@pytest.mark.parametrize("w, expected", [
    (2.0, 1.0),
    (0.5, math.sqrt(math.pi)),
    (-0.5, -2.0 * math.sqrt(math.pi)),
])
def test_gamma_values(w, expected):
    assert abs(gamma(w) - expected) <= 1e-13 * abs(expected)


def test_gamma_increasing_beyond_two():
    values = gamma(np.linspace(2.0, 10.0, 50)).real
    assert np.all(np.diff(values) > 0)


def test_gamma_rejects_poles():
    with pytest.raises(PoleError):
        gamma(-2.0)
    with pytest.raises(PoleError):
        gamma(complex(-5.0, 1e-9))
    with pytest.raises(PoleError):
        log_gamma(0.0)


def test_gamma_near_pole_outside_radius():
    assert np.isfinite(gamma(complex(-3.0, 1e-6)))


@pytest.mark.parametrize("w, tol", [(1.0, 1e-13), (0.25, 1e-12), (3 + 2j, 1e-12)])
def test_duplication(w, tol):
    assert check_duplication(w) <= tol


def test_duplication_grid():
    axis = np.linspace(-9.7, 9.7, 10)
    worst = max(check_duplication(complex(x, y)) for x in axis for y in axis)
    assert worst <= 1e-11


@pytest.mark.parametrize("x", [20.0, 40.0, 80.0])
def test_stirling(x):
    assert stirling_residual(x) <= 1.0 / (10.0 * x)


def test_stirling_requires_positive_argument():
    with pytest.raises(DomainError):
        stirling_residual(0.0)
