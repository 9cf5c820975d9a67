import math

import numpy as np
import pytest

from weber_spectra.core.dzero_finder import DZeroInfo, find_d_zeros, local_expansion
from weber_spectra.core.eigen_condition import ProblemParams, big_m
from weber_spectra.core.errors import DomainError, RangeError, TooSmallCouplingError
from weber_spectra.core.spectrum_solver import (Eigenvalue, HarmonicOscillatorSpectrum, RectRegion, RootOrigin,
                                                SolverConfig, count_nonreal, count_zeros_rect,
                                                from_harmonic_oscillator, localize_near_zero, newton_polish,
                                                nonreal_count, seed_error_bound, seeds_near_zero, solve_rect,
                                                to_harmonic_oscillator)

FREE = ProblemParams(b=1.0)


@pytest.fixture(scope='module')
def first_b2_zero():
    return local_expansion(find_d_zeros(2.0, 12.0)[0], 2.0)


def test_rect_region_geometry():
    rect = RectRegion(0.0, 2.0, -1.0, 1.0)
    assert rect.width == 2.0 and rect.height == 2.0
    assert rect.center == 1.0
    assert rect.corners() == [-1j, 2 - 1j, 2 + 1j, 1j]
    assert rect.contains(1.5 + 0.5j)
    assert not rect.contains(2.1)
    assert rect.contains(2.1, pad=0.2)
    assert rect.boundary_distance(1.0) == 1.0
    children = rect.split(0.25, 0.5)
    assert sum(child.width * child.height for child in children) == pytest.approx(4.0)
    assert RectRegion.from_dict(rect.to_dict()) == rect
    square = RectRegion.centered_square(2.0, 0.5)
    assert square.to_dict() == {'re_min': 1.75, 're_max': 2.25, 'im_min': -0.25, 'im_max': 0.25}


def test_rect_region_rejects_degenerate():
    with pytest.raises(DomainError):
        RectRegion(1.0, 1.0, 0.0, 1.0)


def test_solver_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(newton_tol=0.0)


def test_count_unperturbed():
    assert count_zeros_rect(FREE, RectRegion(-0.5, 4.5, -1.0, 1.0)) == 5
    assert count_zeros_rect(FREE, RectRegion(0.4, 0.6, -0.1, 0.1)) == 0


def test_count_near_persistent_integer(b1_z10i):
    # пара 1.97992 +- 0.28091i лежит вне квадрата со стороной 0.5
    assert count_zeros_rect(b1_z10i, RectRegion.centered_square(2.0, 0.5)) == 1
    assert count_zeros_rect(b1_z10i, RectRegion.centered_square(2.0, 0.7)) == 3


def test_count_rejects_window_outside_series_box():
    with pytest.raises(RangeError):
        count_zeros_rect(FREE, RectRegion(50.0, 61.0, -1.0, 1.0))


def test_solve_unperturbed():
    roots = solve_rect(FREE, RectRegion(-0.5, 6.5, -1.0, 1.0))
    assert [round(root.nu.real) for root in roots] == list(range(7))
    for n, root in enumerate(roots):
        assert abs(root.nu - n) <= 1e-10
        assert root.residual <= 1e-12
        assert root.multiplicity == 1
        assert root.origin is RootOrigin.GRID_SEED


def test_solve_persistent_integer_and_pair(b1_z10i):
    roots = solve_rect(b1_z10i, RectRegion.centered_square(2.0, 0.7))
    assert len(roots) == 3
    assert any(abs(root.nu - 2.0) <= 1e-9 for root in roots)
    nonreal = [root.nu for root in roots if abs(root.nu.imag) > 1e-7]
    assert len(nonreal) == 2
    assert abs(nonreal[0] - nonreal[1].conjugate()) <= 1e-9
    assert abs(nonreal[0].real - 1.97992) <= 1e-4
    assert abs(abs(nonreal[0].imag) - 0.28091) <= 1e-4


def test_real_coupling_gives_real_spectrum():
    p = ProblemParams.real(2.0, 3.0)
    roots = solve_rect(p, RectRegion(-0.5, 8.0, -0.5, 0.5))
    assert roots
    assert all(abs(root.nu.imag) <= 1e-7 for root in roots)


def test_imaginary_coupling_conjugate_pairs(solver_cfg):
    p = ProblemParams.imaginary(2.0, 10.0)
    roots = solve_rect(p, solver_cfg.nu_window, solver_cfg)
    values = np.array([root.nu for root in roots])
    for nu in values:
        assert np.min(np.abs(values - nu.conjugate())) <= 1e-9
    assert nonreal_count(roots, solver_cfg.imag_tol) % 2 == 0


def test_roots_sorted():
    roots = solve_rect(ProblemParams.imaginary(2.0, 5.0), RectRegion(-0.5, 6.0, -2.0, 2.0))
    keys = [(root.nu.real, root.nu.imag) for root in roots]
    assert keys == sorted(keys)


def test_newton_polish_converges_to_integer():
    nu = newton_polish(FREE, 3.1 + 0.05j)
    assert nu is not None
    assert abs(nu - 3.0) <= 1e-10


def test_count_nonreal_requires_imaginary_coupling():
    with pytest.raises(DomainError):
        count_nonreal(ProblemParams.real(2.0, 1.0))


def test_count_nonreal_unperturbed(solver_cfg):
    assert count_nonreal(ProblemParams.imaginary(1.0, 0.0), solver_cfg) == 0


def test_nonreal_count_uses_multiplicity():
    roots = [
        Eigenvalue(nu=1.0, residual=0.0),
        Eigenvalue(nu=2.0 + 0.3j, residual=0.0),
        Eigenvalue(nu=2.0 - 0.3j, residual=0.0),
        Eigenvalue(nu=4.0 + 1e-9j, residual=0.0),
    ]
    assert nonreal_count(roots, 1e-7) == 2


EXPANDED = DZeroInfo(lam=3.5, is_integer=False, d_deriv=1.0, c2=4.0, B=1.0, rho=0.1)


def test_seeds_for_imaginary_coupling():
    seeds = seeds_near_zero(EXPANDED, ProblemParams.imaginary(2.0, 20.0))
    assert sorted(seeds, key=lambda s: s.imag) == pytest.approx([3.5 - 0.025j, 3.5 + 0.025j])


def test_seeds_for_real_coupling():
    seeds = seeds_near_zero(EXPANDED, ProblemParams.real(2.0, 20.0))
    assert sorted(s.real for s in seeds) == pytest.approx([3.475, 3.525])
    assert all(s.imag == 0.0 for s in seeds)


def test_seeds_threshold():
    assert EXPANDED.coupling_threshold == pytest.approx(15.0)
    with pytest.raises(TooSmallCouplingError):
        seeds_near_zero(EXPANDED, ProblemParams.imaginary(2.0, 10.0))
    assert len(seeds_near_zero(EXPANDED, ProblemParams.imaginary(2.0, 10.0), enforce_threshold=False)) == 2
    with pytest.raises(TooSmallCouplingError):
        seeds_near_zero(EXPANDED, ProblemParams(b=2.0), enforce_threshold=False)


def test_seed_error_bound():
    bound = seed_error_bound(EXPANDED, ProblemParams.imaginary(2.0, 20.0))
    assert bound == pytest.approx(4.0 * 3.0 * 1.0 / (400.0 * 4.0))


def test_newton_lands_within_seed_bound(first_b2_zero):
    zero = first_b2_zero
    for factor in (1.2, 2.0):
        p = ProblemParams.imaginary(2.0, factor * zero.coupling_threshold)
        seeds = seeds_near_zero(zero, p)
        roots = localize_near_zero(zero, p)
        bound = seed_error_bound(zero, p, safety_factor=1.0)
        for root, seed in zip(roots, seeds):
            assert abs(root.nu - seed) <= bound


def test_seeds_inside_validity_radius(first_b2_zero):
    zero = first_b2_zero
    r_min = 2.0 / (math.sqrt(zero.c2) * zero.rho)
    for r in (1.01 * r_min, 3.0 * r_min, 10.0 * r_min):
        seeds = seeds_near_zero(zero, ProblemParams.imaginary(2.0, r), enforce_threshold=False)
        assert all(abs(seed - zero.lam) < zero.rho for seed in seeds)


def test_roots_satisfy_meromorphic_form():
    p = ProblemParams.imaginary(2.0, 5.0)
    checked = 0
    for root in solve_rect(p, RectRegion(-0.5, 8.0, -2.0, 2.0)):
        if abs(root.nu - round(root.nu.real)) < 0.05:
            continue
        assert abs(p.z_squared * big_m(root.nu, 2.0) - 1.0) <= 1e-8
        checked += 1
    assert checked >= 2


def test_localization_law():
    zero = local_expansion(find_d_zeros(2.0, 12.0)[0], 2.0)
    deviations = []
    for r in (20.0, 40.0, 80.0):
        p = ProblemParams.imaginary(2.0, r)
        eps = 1.0 / (math.sqrt(zero.c2) * r)
        seeds = seeds_near_zero(zero, p, enforce_threshold=False)
        roots = localize_near_zero(zero, p, enforce_threshold=False)
        assert len(roots) == 2
        assert all(root.origin is RootOrigin.DZERO_SEED for root in roots)
        assert abs(roots[0].nu - roots[1].nu.conjugate()) <= 1e-9
        for root in roots:
            assert 0.5 * eps <= abs(root.nu - zero.lam) <= 2.0 * eps
        deviations.append(max(abs(root.nu - seed) for root, seed in zip(roots, seeds)))
    for coarse, fine in zip(deviations, deviations[1:]):
        assert 3.0 <= coarse / fine <= 5.0


def test_harmonic_oscillator_mapping():
    p = ProblemParams.imaginary(2.0, 3.0)
    ho = to_harmonic_oscillator([0.0, Eigenvalue(nu=3.0, residual=0.0)], p)
    assert isinstance(ho, HarmonicOscillatorSpectrum)
    assert ho.eigenvalues == [1.0, 7.0]
    params, values = from_harmonic_oscillator(ho)
    assert abs(params.b - p.b) <= 1e-15
    assert abs(params.z - p.z) <= 1e-15
    assert values == [0.0, 3.0]
