import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import optimize

from .eigen_condition import m_on_points, taylor_coefficients
from .errors import DegenerateZeroError, DomainError, FitError
from .weber_fns import DEFAULT_LIMITS, SeriesLimits, pcf_d_dnu, weber_values

logger = logging.getLogger(__name__)

SCAN_STEP = 0.05
INTEGER_THRESHOLD = 1e-10
DEGENERATE_THRESHOLD = 1e-8
CAUCHY_SAMPLES = 64
FIT_RADII = (0.01, 0.02)
# Радиусы, на которых проверяется |g| <= 1/4
VALIDITY_RADII = (0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.4)
FIT_TOLERANCE = 1e-4


@dataclass(frozen=True)
class DZeroInfo:
    """Ноль lambda функции nu -> D_nu(b) и данные локального разложения M"""
    lam: float
    is_integer: bool
    d_deriv: float
    c2: Optional[float] = None
    B: Optional[float] = None
    rho: Optional[float] = None

    @property
    def is_expanded(self) -> bool:
        return self.c2 is not None and self.B is not None and self.rho is not None

    @property
    def delta(self) -> float:
        """sqrt(c2) min(1/(6B), rho/3)"""
        if not self.is_expanded:
            raise FitError(f"Для нуля {self.lam} не построено локальное разложение")
        bound = self.rho / 3.0 if self.B == 0 else min(1.0 / (6.0 * self.B), self.rho / 3.0)
        return float(np.sqrt(self.c2) * bound)

    @property
    def coupling_threshold(self) -> float:
        """Наименьшее |z|, начиная с которого локальные затравки применимы"""
        return 1.0 / self.delta

    def to_dict(self) -> Dict[str, object]:
        return {
            'lambda': self.lam,
            'is_integer': self.is_integer,
            'd_deriv': self.d_deriv,
            'c2': self.c2,
            'B': self.B,
            'rho': self.rho,
        }


def _d_real(nu: np.ndarray, b: float, limits: SeriesLimits) -> np.ndarray:
    return weber_values(np.asarray(nu, dtype=float), b, limits).d.real


def scan_d_sign(b: float, nu_min: float, nu_max: float, step: float = SCAN_STEP,
                limits: SeriesLimits = DEFAULT_LIMITS):
    """Значения D_nu(b) на равномерной сетке [nu_min, nu_max]"""
    count = int(np.ceil((nu_max - nu_min) / step - 1e-9))
    grid = nu_min + step * np.arange(count + 1)
    grid[-1] = min(grid[-1], nu_max)
    return grid, _d_real(grid, b, limits)


def _bracket_roots(grid: np.ndarray, values: np.ndarray, b: float, limits: SeriesLimits,
                   xtol: float) -> List[float]:
    roots = []
    func = lambda nu: float(_d_real(np.array([nu]), b, limits)[0])
    for i in range(len(grid) - 1):
        left, right = values[i], values[i + 1]
        if left == 0.0:
            if grid[i] > 0:
                roots.append(float(grid[i]))
            continue
        if left * right < 0.0:
            roots.append(optimize.brentq(func, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
    if values[-1] == 0.0 and grid[-1] > 0:
        roots.append(float(grid[-1]))
    return roots


def _newton_polish(lam: float, b: float, limits: SeriesLimits, iterations: int = 3) -> float:
    for _ in range(iterations):
        value = float(_d_real(np.array([lam]), b, limits)[0])
        slope = pcf_d_dnu(lam, b, limits).real
        if value == 0.0 or slope == 0.0:
            break
        step = value / slope
        lam -= step
        if abs(step) < 1e-15 * max(1.0, abs(lam)):
            break
    return lam


def find_d_zeros(b: float, nu_max: float, step: float = SCAN_STEP,
                 integer_threshold: float = INTEGER_THRESHOLD,
                 degenerate_threshold: float = DEGENERATE_THRESHOLD,
                 limits: SeriesLimits = DEFAULT_LIMITS) -> List[DZeroInfo]:
    """Нули nu -> D_nu(b) на (0, nu_max], по возрастанию"""
    if not b > 0:
        raise DomainError(f"Требуется b > 0, получено {b}")
    if not 0 < nu_max <= limits.nu_max:
        raise DomainError(f"Требуется 0 < nu_max <= {limits.nu_max:g}, получено {nu_max}")

    logger.info(f"Поиск нулей D_nu({b:g}) на (0, {nu_max:g}] с шагом {step:g}")
    grid, values = scan_d_sign(b, 0.0, nu_max, step, limits)
    candidates = _bracket_roots(grid, values, b, limits, xtol=1e-13)

    integers = [n for n in range(1, int(np.floor(nu_max)) + 1)
                if abs(_d_real(np.array([float(n)]), b, limits)[0]) < integer_threshold]

    zeros: List[DZeroInfo] = []
    for n in integers:
        slope = pcf_d_dnu(float(n), b, limits).real
        zeros.append(_checked_zero(float(n), True, slope, degenerate_threshold))
        logger.info(f"Целый ноль D_n({b:g}) при n={n}")

    for lam in candidates:
        if any(abs(lam - n) < 1e-8 for n in integers):
            continue
        lam = _newton_polish(lam, b, limits)
        slope = pcf_d_dnu(lam, b, limits).real
        zeros.append(_checked_zero(lam, False, slope, degenerate_threshold))

    zeros.sort(key=lambda zero: zero.lam)
    logger.info(f"Найдено {len(zeros)} нулей D_nu({b:g}) на (0, {nu_max:g}]")
    return zeros


def _checked_zero(lam: float, is_integer: bool, slope: float, threshold: float) -> DZeroInfo:
    if not abs(slope) > threshold:
        raise DegenerateZeroError(f"|dD/dnu| = {abs(slope):.3e} в нуле {lam}: ноль не простой")
    return DZeroInfo(lam=float(lam), is_integer=is_integer, d_deriv=float(slope))


def _pole_clearance(zero: DZeroInfo) -> float:
    """Расстояние от lambda до ближайшего полюса M (целые n >= 0, кроме самого lambda)"""
    lam = zero.lam
    if zero.is_integer:
        return 1.0
    return float(min(abs(lam - np.floor(lam)), abs(np.ceil(lam) - lam)))


def local_expansion(zero: DZeroInfo, b: float, n_samples: int = CAUCHY_SAMPLES,
                    limits: SeriesLimits = DEFAULT_LIMITS) -> DZeroInfo:
    """Подгонка M(nu) = c2 (nu - lambda)^2 (1 + g(nu - lambda)) дискретными интегралами Коши"""
    lam = zero.lam
    clearance = _pole_clearance(zero)
    radii = [r for r in FIT_RADII if r < 0.5 * clearance]
    if len(radii) < len(FIT_RADII):
        # нуль вплотную к полюсу: окружности сжимаются пропорционально
        radii = [0.2 * clearance, 0.4 * clearance]
    func = lambda pts: m_on_points(pts, b, limits)

    c2_estimates = []
    for radius in radii:
        coefficients = taylor_coefficients(func, complex(lam), radius, n_samples)
        quadratic = coefficients[2]
        if abs(coefficients[0]) > 1e-6 * abs(quadratic) * radius ** 2 or \
                abs(coefficients[1]) > 1e-6 * abs(quadratic) * radius:
            raise FitError(
                f"В нуле {lam}: младшие коэффициенты M не малы "
                f"(a0={abs(coefficients[0]):.3e}, a1={abs(coefficients[1]):.3e}, a2={abs(quadratic):.3e})"
            )
        c2_estimates.append(quadratic)

    small, large = c2_estimates
    if abs(small - large) > FIT_TOLERANCE * abs(small):
        raise FitError(f"В нуле {lam}: оценки c2 на двух радиусах расходятся ({small} и {large})")
    c2 = complex(small)
    if abs(c2.imag) > 1e-8 * abs(c2) or c2.real <= 0:
        raise FitError(f"В нуле {lam}: коэффициент c2 = {c2} не положителен")
    c2 = float(c2.real)

    B = _derivative_bound(func, lam, c2, radii[0], n_samples)

    rho = radii[0]
    for radius in VALIDITY_RADII:
        if radius >= 0.9 * clearance:
            break
        g = _g_on_circle(func, lam, c2, radius, n_samples)
        if not np.all(np.isfinite(g)) or np.max(np.abs(g)) > 0.25:
            break
        rho = radius

    logger.info(f"Локальное разложение в lambda={lam:.12g}: c2={c2:.6g}, B={B:.6g}, rho={rho:g}")
    return replace(zero, c2=c2, B=B, rho=rho)


def _circle(lam: float, radius: float, n_samples: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    return radius * np.exp(1j * theta)


def _g_on_circle(func, lam: float, c2: float, radius: float, n_samples: int) -> np.ndarray:
    zeta = _circle(lam, radius, n_samples)
    return func(lam + zeta) / (c2 * zeta * zeta) - 1.0


def _derivative_bound(func, lam: float, c2: float, radius: float, n_samples: int) -> float:
    """max |g'| на окружности через центральные разности вдоль нее"""
    zeta = _circle(lam, radius, n_samples)
    g = func(lam + zeta) / (c2 * zeta * zeta) - 1.0
    dg = (np.roll(g, -1) - np.roll(g, 1)) / (np.roll(zeta, -1) - np.roll(zeta, 1))
    return float(np.max(np.abs(dg)))


def expand_all(zeros: Sequence[DZeroInfo], b: float, limits: SeriesLimits = DEFAULT_LIMITS,
               n_samples: int = CAUCHY_SAMPLES) -> List[DZeroInfo]:
    return [local_expansion(zero, b, n_samples, limits) for zero in zeros]
