import pytest

from weber_spectra.core.errors import DomainError
from weber_spectra.utils.helpers import complex_pair, format_float, r_grid


def test_format_float_round_trips():
    for value in (0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23):
        assert float(format_float(value)) == value


def test_format_float_negative_zero():
    assert format_float(-0.0) == '0'


def test_r_grid_matches_figure_grid():
    grid = r_grid(0.5, 10.0, 0.1)
    assert len(grid) == 96
    assert grid[0] == 0.5
    assert grid[-1] == 10.0
    assert grid[13] == 1.8


def test_r_grid_single_point():
    assert r_grid(2.0, 2.0, 0.5) == [2.0]


@pytest.mark.parametrize("args", [(0.0, 1.0, 0.0), (0.0, 1.0, -0.1), (2.0, 1.0, 0.1)])
def test_r_grid_rejects_bad_input(args):
    with pytest.raises(DomainError):
        r_grid(*args)


def test_complex_pair():
    assert complex_pair(1.5 - 2j) == [1.5, -2.0]
    assert complex_pair(3) == [3.0, 0.0]
