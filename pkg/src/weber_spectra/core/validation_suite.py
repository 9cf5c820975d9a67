"""Набор проверок инвариантов для команды ``validate``.

Каждая проверка возвращает (успех, сообщение); исключение внутри проверки
считается провалом этой проверки, а не всего набора.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .config import Config
from .dzero_finder import expand_all, find_d_zeros, scan_d_sign
from .eigen_condition import ProblemParams, boundary_data, boundary_det, boundary_matrix, eig_residual_G
from .errors import ValidationError, WeberSpectraError
from .fd_oracle import compare_spectra, oracle_spectrum, refinement_shift
from .gamma_core import check_duplication, recip_gamma, stirling_residual
from .spectrum_solver import (RectRegion, localize_near_zero, nonreal_count, seed_error_bound, seeds_near_zero,
                              solve_rect)
from .sweep_manager import SweepManager
from .weber_fns import (even_sol, holomorphy_residual, left_decay_log, log_abs_pcf_d_left, odd_sol, pcf_d,
                        pcf_d_integral, wronskian_residuals)
from ..utils.helpers import r_grid

logger = logging.getLogger(__name__)

CheckFn = Callable[[], Tuple[bool, str]]

# (nu, x): первая половина для Re nu < 0, вторая для Re nu > -1
QUADRATURE_SAMPLES = [
    (-0.5, 0.5), (-1.0, 1.0), (-0.5, 2.0), (-1.5, 0.8), (-2.3, 1.5),
    (-0.7 - 0.4j, 1.2), (-1.2 + 0.6j, 0.6), (-3.1, 2.0), (-0.25, 1.7), (-2.0 + 1.0j, 1.0),
    (0.5, 1.0), (0.0, 1.2), (1.3, 0.7), (2.0 + 0.5j, 1.0), (0.8 - 0.3j, 1.5),
    (3.5, 0.9), (-0.4, 1.1), (1.7 + 1.0j, 0.5), (4.2, 1.8), (2.6, 2.0),
]
ORACLE_CASES = ((1.0, 10j), (2.0, 5j), (2.0, 5.0 + 0j))
ORACLE_RE_MAX = 6.0
REFINEMENT_TOLERANCE = 4e-3
GROWTH_B = 2.0
GROWTH_ZEROS = 3
# r чуть выше каждого порога 1/delta
GROWTH_MARGIN = 1.1
FIGURE_WINDOW = RectRegion(-1.0, 8.5, -3.0, 3.0)
FIGURE_R = (0.5, 10.0, 0.1)


@dataclass
class Check:
    label: str
    category: str
    fn: CheckFn
    slow: bool = False


@dataclass
class Result:
    label: str
    category: str
    passed: bool
    message: str

    def to_dict(self) -> Dict[str, object]:
        return {'label': self.label, 'category': self.category, 'passed': self.passed, 'message': self.message}


@dataclass
class ValidationReport:
    results: List[Result]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[Result]:
        return [result for result in self.results if not result.passed]

    def to_dict(self) -> Dict[str, object]:
        return {
            'passed': self.passed,
            'n_checks': len(self.results),
            'n_failed': len(self.failures),
            'results': [result.to_dict() for result in self.results],
        }

    def raise_if_failed(self):
        if not self.passed:
            labels = ', '.join(result.label for result in self.failures)
            raise ValidationError(f"Не пройдено проверок: {len(self.failures)} ({labels})")


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


class ValidationSuite:
    """Проверки тождеств спецфункций, решателя и сверка с конечно-разностным оракулом"""

    def __init__(self, config: Optional[Config] = None, include_slow: bool = True):
        self.config = config or Config()
        self.include_slow = include_slow
        self.limits = self.config.series_limits()
        self.cfg = self.config.solver_config()
        self.checks = self._register()

    def _register(self) -> List[Check]:
        return [
            Check('recip_gamma_factorials', 'gamma', self.check_factorials),
            Check('recip_gamma_exact_zeros', 'gamma', self.check_exact_zeros),
            Check('recip_gamma_conjugation', 'gamma', self.check_gamma_conjugation),
            Check('gamma_duplication', 'gamma', self.check_duplication_grid),
            Check('gamma_stirling', 'gamma', self.check_stirling),
            Check('wronskians', 'weber', self.check_wronskians),
            Check('d_at_origin', 'weber', self.check_d_at_origin),
            Check('known_zeros', 'weber', self.check_known_zeros),
            Check('parity', 'weber', self.check_parity),
            Check('holomorphy', 'weber', self.check_holomorphy),
            Check('series_vs_quadrature', 'weber', self.check_series_vs_quadrature),
            Check('left_decay', 'weber', self.check_left_decay),
            Check('boundary_reductions', 'condition', self.check_boundary_reductions),
            Check('boundary_det', 'condition', self.check_boundary_det),
            Check('condition_examples', 'condition', self.check_condition_examples),
            Check('condition_conjugation', 'condition', self.check_condition_conjugation),
            Check('d_zeros', 'dzero', self.check_d_zeros),
            Check('d_positive_left', 'dzero', self.check_d_positive_left),
            Check('unperturbed_spectrum', 'solver', self.check_unperturbed),
            Check('integer_zero_persistence', 'solver', self.check_integer_persistence),
            Check('self_adjoint_reality', 'solver', self.check_reality),
            Check('conjugate_pairing', 'solver', self.check_pairing),
            Check('localization_law', 'solver', self.check_localization),
            Check('oracle_agreement', 'oracle', self.check_oracle),
            Check('oracle_refinement', 'oracle', self.check_oracle_refinement),
            Check('counting_growth', 'solver', self.check_counting_growth, slow=True),
            Check('figure_trajectories', 'figure', self.check_figures, slow=True),
        ]

    def run(self, categories: Optional[Sequence[str]] = None) -> ValidationReport:
        results = []
        selected = [check for check in self.checks
                    if (self.include_slow or not check.slow)
                    and (categories is None or check.category in categories)]
        for check in selected:
            logger.info(f"Проверка {check.label}")
            try:
                passed, message = check.fn()
            except (WeberSpectraError, ArithmeticError, ValueError) as e:
                passed, message = False, f"{type(e).__name__}: {e}"
            level = logging.INFO if passed else logging.ERROR
            logger.log(level, f"{check.label}: {'OK' if passed else 'FAIL'} ({message})")
            results.append(Result(check.label, check.category, bool(passed), message))
        return ValidationReport(results)

    # gamma

    def check_factorials(self):
        worst = max(abs(complex(recip_gamma(n + 1.0)) * math.factorial(n) - 1.0) for n in range(16))
        return worst <= 1e-12, f"max rel {worst:.2e}"

    def check_exact_zeros(self):
        values = recip_gamma(-np.arange(31, dtype=float))
        return bool(np.all(values == 0)), "1/Gamma(-n) == 0 for n <= 30"

    def check_gamma_conjugation(self):
        points = np.array([0.3 + 1.7j, -2.5 + 0.4j, 5.1 - 3.3j, -7.2 - 0.9j])
        direct = recip_gamma(np.conj(points))
        mirrored = np.conj(recip_gamma(points))
        worst = float(np.max(np.abs(direct - mirrored) / np.abs(mirrored)))
        return worst <= 1e-13, f"max rel {worst:.2e}"

    def check_duplication_grid(self):
        axis = np.linspace(-9.7, 9.7, 10)
        worst = max(check_duplication(complex(x, y)) for x in axis for y in axis)
        return worst <= 1e-11, f"max {worst:.2e} on 100 points"

    def check_stirling(self):
        ok = all(stirling_residual(x) <= 1.0 / (10.0 * x) for x in (20.0, 40.0, 80.0))
        return ok, "Stirling residual <= 1/(10x) at 20, 40, 80"

    # weber

    def check_wronskians(self):
        worst_parity = worst_evenodd = 0.0
        for re in np.linspace(-3.0, 3.0, 5):
            for im in np.linspace(-2.0, 2.0, 4):
                nu = complex(re, im)
                scale = max(1.0, abs(math.sqrt(2.0 * math.pi) * complex(recip_gamma(-nu))))
                for x in np.linspace(0.3, 3.0, 10):
                    res = wronskian_residuals(nu, float(x), self.limits)
                    worst_parity = max(worst_parity, res.w_parity / scale)
                    worst_evenodd = max(worst_evenodd, res.w_evenodd)
        ok = worst_parity <= 1e-10 and worst_evenodd <= 1e-10
        return ok, f"W[D(x),D(-x)] {worst_parity:.2e}, W[y_e,y_o] {worst_evenodd:.2e} on 200 points"

    def check_d_at_origin(self):
        worst = 0.0
        for nu in (-1.0, 0.5, 1.5, 2.5 + 0.5j, -0.3 - 1.2j):
            pair = pcf_d(nu, 0.0, self.limits)
            value = 2 ** (nu / 2) * math.sqrt(math.pi) / special.gamma(0.5 - nu / 2)
            slope = -(2 ** ((nu + 1) / 2)) * math.sqrt(math.pi) / special.gamma(-nu / 2)
            worst = max(worst, _relative(pair.value, value), _relative(pair.dx, slope))
        reference = abs(pcf_d(-1.0, 0.0, self.limits).value - math.sqrt(math.pi / 2.0))
        return worst <= 1e-12 and reference <= 1e-12, f"max {worst:.2e}, D_-1(0) {reference:.2e}"

    def check_known_zeros(self):
        d21 = abs(pcf_d(2.0, 1.0, self.limits).value)
        d0 = max(abs(pcf_d(0.0, x, self.limits).value - math.exp(-x * x / 4.0)) for x in (0.5, 1.0, 2.0))
        return d21 <= 1e-12 and d0 <= 1e-13, f"|D_2(1)| {d21:.2e}, D_0 {d0:.2e}"

    def check_parity(self):
        worst = 0.0
        for nu in (0.3, 2.7 - 0.5j, -1.4 + 2.0j):
            for x in (0.4, 1.3, 2.9):
                worst = max(worst,
                            abs(even_sol(nu, -x, self.limits).value - even_sol(nu, x, self.limits).value),
                            abs(odd_sol(nu, -x, self.limits).value + odd_sol(nu, x, self.limits).value))
        return worst <= 1e-13, f"max {worst:.2e}"

    def check_holomorphy(self):
        worst = max(holomorphy_residual(nu, x, 1e-4, self.limits)
                    for nu in (0.4 + 0.3j, 2.2 - 1.1j, -1.5 + 0.5j) for x in (0.8, 2.0))
        return worst <= 1e-6, f"max {worst:.2e}"

    def check_series_vs_quadrature(self):
        options = self.config.quadrature_options()
        worst = 0.0
        for nu, x in QUADRATURE_SAMPLES:
            series = pcf_d(nu, x, self.limits).value
            worst = max(worst, _relative(pcf_d_integral(nu, x, **options), series))
        return worst <= 1e-9, f"max {worst:.2e} on {len(QUADRATURE_SAMPLES)} points"

    def check_left_decay(self):
        gaps = [abs(log_abs_pcf_d_left(xi, 1.0) - left_decay_log(xi, 1.0)) for xi in (25.0, 100.0, 400.0)]
        ok = gaps[0] > gaps[1] > gaps[2] and gaps[1] <= 1.0
        return ok, "gaps " + ", ".join(f"{gap:.3e}" for gap in gaps)

    # condition

    def check_boundary_reductions(self):
        worst = 0.0
        for nu in (0.37 + 0.21j, 1.7 - 0.6j, 3.3, -0.8 + 1.1j):
            even, odd = boundary_data(nu, 1.3, self.limits).reduction_residuals()
            worst = max(worst, even, odd)
        return worst <= 1e-10, f"max {worst:.2e}"

    def check_boundary_det(self):
        p = ProblemParams(b=1.3, z=2.0 + 1.0j)
        worst_ratio = worst_matrix = 0.0
        for nu in (0.37 + 0.21j, 1.7 - 0.6j, 3.3 + 1.1j):
            det = boundary_det(nu, p, self.limits)
            g = eig_residual_G(nu, p, self.limits)
            worst_ratio = max(worst_ratio, abs(det / g / math.sqrt(2.0 * math.pi) - 1.0))
            worst_matrix = max(worst_matrix, _relative(np.linalg.det(boundary_matrix(nu, p, self.limits)), det))
        ok = worst_ratio <= 1e-9 and worst_matrix <= 1e-9
        return ok, f"det/G ratio {worst_ratio:.2e}, matrix {worst_matrix:.2e}"

    def check_condition_examples(self):
        free = ProblemParams(b=1.0)
        g5 = abs(eig_residual_G(5.0, free, self.limits))
        g_half = abs(eig_residual_G(0.5, free, self.limits) + 1.0 / (2.0 * math.sqrt(math.pi)))
        g2 = max(abs(eig_residual_G(2.0, ProblemParams(b=1.0, z=z), self.limits)) for z in (3.0, 7j))
        ok = g5 <= 1e-12 and g_half <= 1e-12 and g2 <= 1e-11
        return ok, f"G(5) {g5:.1e}, G(0.5) {g_half:.1e}, G(2; b=1) {g2:.1e}"

    def check_condition_conjugation(self):
        p = ProblemParams.imaginary(2.0, 5.0)
        worst = 0.0
        for nu in (0.6 + 0.4j, 3.2 - 1.5j, 7.1 + 2.2j):
            a = eig_residual_G(nu.conjugate(), p, self.limits)
            b = eig_residual_G(nu, p, self.limits).conjugate()
            worst = max(worst, _relative(a, b))
        return worst <= 1e-12, f"max {worst:.2e}"

    # dzero

    def check_d_zeros(self):
        small = self._d_zeros(1.0, 3.0)
        integer = [z for z in small if z.is_integer and abs(z.lam - 2.0) < 1e-12]
        wide = self._d_zeros(2.0, 25.0)
        expanded = self._expand(integer, 1.0) + self._expand(wide, 2.0)
        ok = len(integer) == 1 and len(wide) >= 5 and all(z.c2 > 0 for z in expanded)
        return ok, f"b=1: {len(small)} zeros (2 integer: {bool(integer)}), b=2: {len(wide)} zeros"

    def check_d_positive_left(self):
        _, values = scan_d_sign(2.0, -5.0, 0.0, self.config.get('dzero.scan_step'), self.limits)
        return bool(np.all(values > 0)), "D_nu(2) > 0 on [-5, 0]"

    # solver

    def check_unperturbed(self):
        roots = solve_rect(ProblemParams(b=1.0), RectRegion(-0.5, 10.5, -1.0, 1.0), self.cfg)
        values = [root.nu for root in roots]
        ok = (len(values) == 11
              and all(abs(nu - n) <= 1e-10 for nu, n in zip(values, range(11)))
              and all(root.residual <= 1e-12 for root in roots))
        return ok, f"{len(values)} roots, max residual {max(root.residual for root in roots):.1e}"

    def check_integer_persistence(self):
        worst = 0.0
        for z in (0.0, 2.0, 5j, 10j):
            roots = solve_rect(ProblemParams(b=1.0, z=z), RectRegion(1.9, 2.1, -0.05, 0.05), self.cfg)
            at_two = [root for root in roots if abs(root.nu - 2.0) <= 1e-9]
            if not at_two:
                return False, f"nu=2 not found for z={z}"
            worst = max(worst, at_two[0].residual)
        return worst <= 1e-11, f"max residual {worst:.1e}"

    def check_reality(self):
        worst = 0.0
        for b in (1.0, 2.0):
            for z in (1.0, 3.0, 10.0):
                roots = solve_rect(ProblemParams.real(b, z), self.cfg.nu_window, self.cfg)
                worst = max([worst] + [abs(root.nu.imag) for root in roots])
        return worst <= self.cfg.imag_tol, f"max |Im nu| {worst:.1e}"

    def check_pairing(self):
        worst = 0.0
        counts = []
        for r in (1.0, 5.0, 10.0, 20.0):
            roots = solve_rect(ProblemParams.imaginary(2.0, r), self.cfg.nu_window, self.cfg)
            values = np.array([root.nu for root in roots])
            for nu in values:
                worst = max(worst, float(np.min(np.abs(values - nu.conjugate()))))
            counts.append(nonreal_count(roots, self.cfg.imag_tol))
        ok = worst <= 1e-9 and all(count % 2 == 0 for count in counts)
        return ok, f"conjugation {worst:.1e}, N = {counts}"

    def _d_zeros(self, b: float, nu_max: float):
        return find_d_zeros(b, nu_max, limits=self.limits, **self.config.dzero_options())

    def _expand(self, zeros, b: float):
        return expand_all(zeros, b, self.limits, int(self.config.get('dzero.cauchy_samples')))

    def check_localization(self):
        safety = float(self.config.get('dzero.safety_factor'))
        messages = []
        for b in (1.0, 2.0):
            for zero in self._expand(self._d_zeros(b, 12.0)[:3], b):
                deviations = []
                for r in (20.0, 40.0, 80.0):
                    p = ProblemParams.imaginary(b, r)
                    eps = 1.0 / (math.sqrt(zero.c2) * r)
                    seeds = seeds_near_zero(zero, p, enforce_threshold=False)
                    if r > 2.0 / (math.sqrt(zero.c2) * zero.rho) and \
                            any(abs(seed - zero.lam) >= zero.rho for seed in seeds):
                        return False, f"b={b}, lambda={zero.lam:.6f}, r={r}: seeds outside rho={zero.rho:g}"
                    roots = localize_near_zero(zero, p, self.cfg, enforce_threshold=False)
                    for root in roots:
                        if not 0.5 * eps <= abs(root.nu - zero.lam) <= 2.0 * eps:
                            return False, f"b={b}, lambda={zero.lam:.6f}, r={r}: |nu - lambda| out of [eps/2, 2eps]"
                    deviation = max(abs(root.nu - seed) for root, seed in zip(roots, seeds))
                    if r > zero.coupling_threshold and deviation > seed_error_bound(zero, p, safety):
                        return False, f"b={b}, lambda={zero.lam:.6f}, r={r}: seed deviation {deviation:.2e} above bound"
                    deviations.append(deviation)
                ratios = [deviations[k] / deviations[k + 1] for k in range(2)]
                if not all(3.0 <= ratio <= 5.0 for ratio in ratios):
                    return False, f"b={b}, lambda={zero.lam:.6f}: ratios {ratios}"
                messages.append(f"{zero.lam:.4f}: {ratios[0]:.2f}/{ratios[1]:.2f}")
        return True, "; ".join(messages)

    # oracle

    def check_oracle(self):
        worst = 0.0
        k = int(self.config.get('oracle.k'))
        window = RectRegion(-1.0, ORACLE_RE_MAX + 2.0, -6.0, 6.0)
        tolerance = float(self.config.get('oracle.tolerance'))
        for b, z in ORACLE_CASES:
            p = ProblemParams(b=b, z=z)
            roots = [root.nu for root in solve_rect(p, window, self.cfg)]
            oracle = oracle_spectrum(p, self.config.grid_for(b), k)
            comparison = compare_spectra(roots, oracle, ORACLE_RE_MAX, tolerance)
            worst = max(worst, comparison.max_deviation)
        return worst <= tolerance, f"max deviation {worst:.2e}"

    def check_oracle_refinement(self):
        k = int(self.config.get('oracle.k'))
        shifts = [refinement_shift(ProblemParams(b=b, z=z), self.config.grid_for(b), k, ORACLE_RE_MAX)
                  for b, z in ORACLE_CASES]
        return max(shifts) < REFINEMENT_TOLERANCE, "n -> 2n+1 shifts " + ", ".join(f"{s:.1e}" for s in shifts)

    # slow

    def check_counting_growth(self):
        window = self.cfg.nu_window
        zeros = [z for z in self._d_zeros(GROWTH_B, min(window.re_max, self.limits.nu_max))
                 if window.contains(complex(z.lam))][:GROWTH_ZEROS]
        thresholds = [zero.coupling_threshold for zero in self._expand(zeros, GROWTH_B)]
        r_values = sorted({float(r) for r in range(1, 21)} | {round(GROWTH_MARGIN * t, 2) for t in thresholds})

        sweep = SweepManager(self.cfg, self.config.max_threads())
        counts, drops = sweep.count_report(GROWTH_B, r_values)
        for r, count in counts:
            guaranteed = sum(1 for t in thresholds if r > t)
            if count < 2 * guaranteed or count % 2:
                return False, f"r={r:g}: N={count}, expected >= {2 * guaranteed}"
        message = ("thresholds " + ", ".join(f"{t:.2f}" for t in thresholds)
                   + "; N(r) = " + ", ".join(f"{r:g}:{count}" for r, count in counts))
        if drops:
            message += "; drops " + ", ".join(f"{d.r_from:g}->{d.r_to:g} -{d.lost} ({d.cause.value})" for d in drops)
        return True, message

    def check_figures(self):
        cfg = replace(self.cfg, nu_window=FIGURE_WINDOW)
        grid = r_grid(*FIGURE_R)
        sweep = SweepManager(cfg, self.config.max_threads())
        messages = []
        for b in (1.0, 2.0):
            branches = sweep.trajectory(b, grid)
            start = [branch.points[0].nu for branch in branches if branch.points[0].r == grid[0]]
            offset = max(abs(nu - max(0, round(nu.real))) for nu in start)
            if offset > cfg.match_radius:
                return False, f"b={b}: branch at r={grid[0]:g} starts {offset:.3f} away from N_0"

            final = [branch.last.nu for branch in branches if branch.last.r == grid[-1]]
            marked = self._expand(self._d_zeros(b, FIGURE_WINDOW.re_max - 0.5), b)
            for zero in marked:
                eps = 1.0 / (math.sqrt(zero.c2) * grid[-1])
                pair = [nu for nu in final if abs(nu.imag) > 1e-3 and abs(nu - zero.lam) <= 2.0 * eps]
                if len(pair) < 2:
                    return False, f"b={b}: no non-real pair within 2eps={2 * eps:.3f} of lambda={zero.lam:.6f}"
            if b == 1.0:
                near_two = [nu for nu in final if abs(nu - 2.0) <= 0.5 and abs(nu.imag) > 1e-3]
                if len(near_two) != 2:
                    return False, f"b=1: {len(near_two)} non-real roots near nu=2 at r={grid[-1]:g}"
            messages.append(f"b={b:g}: {len(branches)} branches, {len(marked)} marked zeros")
        return True, "; ".join(messages)
