"""Решения уравнения Вебера -y'' + (x^2/4 - 1/2) y = nu y.

Четное и нечетное решения считаются степенными рядами, векторизованными по
массиву параметров nu; D_nu собирается из них через значения D_nu(0) и
D_nu'(0). Интегральные представления служат независимой проверкой.
"""
import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special

from .errors import DomainError, QuadratureError, RangeError
from .gamma_core import (
    ComplexLike,
    as_complex_array,
    ensure_finite,
    recip_gamma,
    restore_shape,
)

logger = logging.getLogger(__name__)

_SQRT_PI = np.sqrt(np.pi)
_LOG2 = np.log(2.0)
_TAIL_BOUND = 1e-18


@dataclass(frozen=True)
class SeriesLimits:
    """Проверенная область рядов и правило усечения"""
    x_max: float = 30.0
    nu_max: float = 60.0
    eps: float = 1e-17
    max_terms: int = 2000


DEFAULT_LIMITS = SeriesLimits()


@dataclass(frozen=True)
class EvalPair:
    """Значение решения и его производная по x"""
    value: Union[complex, np.ndarray]
    dx: Union[complex, np.ndarray]


@dataclass(frozen=True)
class WeberValues:
    """Все решения в одной точке x для массива параметров nu"""
    nu: np.ndarray
    x: float
    even: np.ndarray
    even_dx: np.ndarray
    odd: np.ndarray
    odd_dx: np.ndarray
    d: np.ndarray
    d_dx: np.ndarray


@dataclass(frozen=True)
class WronskianResiduals:
    w_parity: float
    w_evenodd: float


class ParamConvention(str, Enum):
    NU_FORM = "nu_form"
    A_FORM = "a_form"


class IntegralFormula(str, Enum):
    DECAYING = "decaying"        # Re nu < 0
    OSCILLATORY = "oscillatory"  # Re nu > -1


def convert_parameter(p: ComplexLike, from_: ParamConvention = ParamConvention.NU_FORM):
    """Переход nu <-> a = -nu - 1/2; отображение само себе обратно"""
    logger.debug(f"Преобразование параметра из {ParamConvention(from_).value}")
    return -p - 0.5


def _check_box(nu: np.ndarray, x: float, limits: SeriesLimits):
    if not np.isfinite(x) or abs(x) > limits.x_max:
        raise RangeError(f"|x| = {abs(x):g} вне проверенной области |x| <= {limits.x_max:g}")
    if not np.all(np.isfinite(nu)):
        raise RangeError("Параметр nu содержит нечисловые значения")
    worst = float(np.max(np.abs(nu))) if nu.size else 0.0
    if worst > limits.nu_max:
        raise RangeError(f"|nu| = {worst:g} вне проверенной области |nu| <= {limits.nu_max:g}")


def _parity_series(nu: np.ndarray, x: float, limits: SeriesLimits):
    """Суммы рядов четного и нечетного решений и их x-производных без множителя exp(-x^2/4)"""
    x2 = x * x
    u = np.ones_like(nu)
    du = np.zeros_like(nu)
    v = np.full_like(nu, x)
    dv = np.ones_like(nu)
    s_even, ds_even = u.copy(), du.copy()
    s_odd, ds_odd = v.copy(), dv.copy()

    quiet = np.zeros(nu.shape, dtype=int)
    eps = limits.eps
    converged = False
    for k in range(limits.max_terms):
        a = 2 * k - nu
        c = 2 * k + 1 - nu
        du = u * a * x / (2 * k + 1)
        u = u * a * x2 / ((2 * k + 1) * (2 * k + 2))
        dv = v * c * x / (2 * k + 2)
        v = v * c * x2 / ((2 * k + 2) * (2 * k + 3))

        s_even += u
        ds_even += du
        s_odd += v
        ds_odd += dv

        tiny = (
            (np.abs(u) < eps * (np.abs(s_even) + 1e-300))
            & (np.abs(du) < eps * (np.abs(ds_even) + 1e-300))
            & (np.abs(v) < eps * (np.abs(s_odd) + 1e-300))
            & (np.abs(dv) < eps * (np.abs(ds_odd) + 1e-300))
        )
        quiet = np.where(tiny, quiet + 1, 0)
        if np.all(quiet >= 3):
            converged = True
            break

    if not converged:
        logger.warning(f"Ряды для x={x:g} не сошлись за {limits.max_terms} членов")
    return s_even, ds_even, s_odd, ds_odd


def d_prefactors(nu: np.ndarray):
    """D_nu(0) и D_nu'(0); через 1/Gamma, поэтому целые nu не дают полюсов"""
    d0 = np.exp(0.5 * nu * _LOG2) * _SQRT_PI * as_complex_array(recip_gamma(0.5 - 0.5 * nu))
    d1 = -np.exp(0.5 * (nu + 1.0) * _LOG2) * _SQRT_PI * as_complex_array(recip_gamma(-0.5 * nu))
    return d0, d1


def weber_values(nu: ComplexLike, x: float, limits: SeriesLimits = DEFAULT_LIMITS) -> WeberValues:
    """Один проход рядов: y_even, y_odd, D_nu и их производные в точке x"""
    nu_arr = as_complex_array(nu)
    x = float(x)
    _check_box(nu_arr, x, limits)

    s_even, ds_even, s_odd, ds_odd = _parity_series(nu_arr, x, limits)
    gauss = np.exp(-0.25 * x * x)
    even = gauss * s_even
    even_dx = gauss * (ds_even - 0.5 * x * s_even)
    odd = gauss * s_odd
    odd_dx = gauss * (ds_odd - 0.5 * x * s_odd)

    d0, d1 = d_prefactors(nu_arr)
    d = d0 * even + d1 * odd
    d_dx = d0 * even_dx + d1 * odd_dx

    for name, arr in (("y_even", even), ("y_odd", odd), ("D_nu", d), ("D_nu'", d_dx)):
        ensure_finite(arr, name)

    return WeberValues(nu=nu_arr, x=x, even=even, even_dx=even_dx, odd=odd,
                       odd_dx=odd_dx, d=d, d_dx=d_dx)


def _pair(value: np.ndarray, dx: np.ndarray, like: ComplexLike) -> EvalPair:
    return EvalPair(value=restore_shape(value, like), dx=restore_shape(dx, like))


def even_sol(nu: ComplexLike, x: float, limits: SeriesLimits = DEFAULT_LIMITS) -> EvalPair:
    """Четное решение: y(0) = 1, y'(0) = 0"""
    w = weber_values(nu, x, limits)
    return _pair(w.even, w.even_dx, nu)


def odd_sol(nu: ComplexLike, x: float, limits: SeriesLimits = DEFAULT_LIMITS) -> EvalPair:
    """Нечетное решение: y(0) = 0, y'(0) = 1"""
    w = weber_values(nu, x, limits)
    return _pair(w.odd, w.odd_dx, nu)


def pcf_d(nu: ComplexLike, x: float, limits: SeriesLimits = DEFAULT_LIMITS) -> EvalPair:
    """Функция параболического цилиндра D_nu(x) и ее производная по x"""
    w = weber_values(nu, x, limits)
    return _pair(w.d, w.d_dx, nu)


def nu_step(nu: complex) -> float:
    return 1e-6 * max(1.0, abs(nu))


def pcf_d_dnu(nu: complex, x: float, limits: SeriesLimits = DEFAULT_LIMITS) -> complex:
    """dD_nu(x)/dnu центральной разностью с шагом 1e-6 max(1, |nu|)"""
    nu = complex(nu)
    h = nu_step(nu)
    w = weber_values(np.array([nu + h, nu - h]), x, limits)
    return complex((w.d[0] - w.d[1]) / (2.0 * h))


def holomorphy_residual(nu: complex, x: float, step: float = 1e-4,
                        limits: SeriesLimits = DEFAULT_LIMITS) -> float:
    """Расхождение производных по nu вдоль вещественной и мнимой осей (условия Коши-Римана)"""
    nu = complex(nu)
    points = np.array([nu + step, nu - step, nu + 1j * step, nu - 1j * step])
    d = weber_values(points, x, limits).d
    along_re = (d[0] - d[1]) / (2.0 * step)
    along_im = (d[2] - d[3]) / (2.0j * step)
    scale = max(1.0, abs(along_re))
    return float(abs(along_re - along_im) / scale)


def wronskian_residuals(nu: complex, x: float, limits: SeriesLimits = DEFAULT_LIMITS) -> WronskianResiduals:
    """Невязки W[D_nu(x), D_nu(-x)] = sqrt(2 pi)/Gamma(-nu) и W[y_even, y_odd] = 1"""
    nu = complex(nu)
    right = weber_values(nu, x, limits)
    left = weber_values(nu, -x, limits)

    # g(x) = D_nu(-x), g'(x) = -D_nu'(-x)
    w_parity = right.d[0] * (-left.d_dx[0]) - right.d_dx[0] * left.d[0]
    expected = np.sqrt(2.0 * np.pi) * recip_gamma(-nu)
    w_evenodd = right.even[0] * right.odd_dx[0] - right.even_dx[0] * right.odd[0]

    return WronskianResiduals(
        w_parity=float(abs(w_parity - expected)),
        w_evenodd=float(abs(w_evenodd - 1.0)),
    )


def _tail_cutoff(power_re: float) -> float:
    """Наименьшее T с exp(-T^2/2) T^(|Re nu|+1) < 1e-18"""
    t = 1.0
    exponent = abs(power_re) + 1.0
    while -0.5 * t * t + exponent * np.log(t) >= np.log(_TAIL_BOUND):
        t += 0.5
    return t


def _quad_complex(func: Callable[[float], complex], a: float, b: float,
                  epsabs: float, epsrel: float, limit: int) -> complex:
    """Адаптивная квадратура Гаусса-Кронрода отдельно для Re и Im"""
    parts = []
    for part in (lambda t: func(t).real, lambda t: func(t).imag):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, abserr = integrate.quad(part, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
            except integrate.IntegrationWarning as e:
                raise QuadratureError(f"Квадратура на [{a:g}, {b:g}] не достигла точности: {e}")
        if abserr > 100.0 * max(epsabs, epsrel * abs(value)):
            raise QuadratureError(f"Оценка ошибки квадратуры {abserr:.3e} слишком велика")
        parts.append(value)
    return complex(parts[0], parts[1])


def _power_integral(power: complex, kernel: Callable[[float], complex], upper: float,
                    epsabs: float, epsrel: float, limit: int) -> complex:
    """Интеграл от t^power kernel(t) по [0, upper], Re power > -1.

    При Re power < 0 замена t = s^(1/p), p = Re power + 1, убирает
    интегрируемую особенность в нуле.
    """
    if power.real >= 0.0:
        def smooth(t: float) -> complex:
            if t <= 0.0:
                return kernel(0.0) if power == 0 else 0.0
            return t ** power * kernel(t)

        return _quad_complex(smooth, 0.0, upper, epsabs, epsrel, limit)

    p = power.real + 1.0
    spin = 1j * power.imag

    def integrand(s: float) -> complex:
        if s <= 0.0:
            return kernel(0.0) / p if power.imag == 0 else 0.0
        t = s ** (1.0 / p)
        return t ** spin * kernel(t) / p

    return _quad_complex(integrand, 0.0, upper ** p, epsabs, epsrel, limit)


def pcf_d_integral(nu: complex, x: float, formula: Optional[IntegralFormula] = None,
                   epsabs: float = 1e-12, epsrel: float = 1e-12, limit: int = 200) -> complex:
    """D_nu(x) через интегральные представления.

    DECAYING:    exp(-x^2/4)/Gamma(-nu) int t^(-nu-1) exp(-t^2/2 - x t) dt, Re nu < 0
    OSCILLATORY: sqrt(2/pi) exp(x^2/4) int exp(-t^2/2) cos(pi nu/2 - x t) t^nu dt, Re nu > -1
    """
    nu = complex(nu)
    if not x > 0:
        raise DomainError(f"Интегральные представления требуют x > 0, получено {x}")
    if formula is None:
        formula = IntegralFormula.DECAYING if nu.real < 0 else IntegralFormula.OSCILLATORY
    formula = IntegralFormula(formula)

    if formula is IntegralFormula.DECAYING:
        if not nu.real < 0:
            raise DomainError(f"Первая формула требует Re nu < 0, получено nu = {nu}")
        power = -nu - 1.0
        upper = _tail_cutoff(power.real)
        integral = _power_integral(power, lambda t: np.exp(-0.5 * t * t - x * t), upper,
                                   epsabs, epsrel, limit)
        result = np.exp(-0.25 * x * x) * recip_gamma(-nu) * integral
    else:
        if not nu.real > -1:
            raise DomainError(f"Вторая формула требует Re nu > -1, получено nu = {nu}")
        phase = 0.5 * np.pi * nu
        upper = _tail_cutoff(nu.real)
        integral = _power_integral(nu, lambda t: np.exp(-0.5 * t * t) * np.cos(phase - x * t), upper,
                                   epsabs, epsrel, limit)
        result = np.sqrt(2.0 / np.pi) * np.exp(0.25 * x * x) * integral

    logger.debug(f"Квадратура D_nu: nu={nu}, x={x}, формула={formula.value}, T={upper}")
    return complex(result)


def left_decay_log(xi: float, b: float) -> float:
    """Главные члены асимптотики ln|D_{-xi}(b)| при xi -> +inf"""
    if not xi > 0:
        raise DomainError(f"Асимптотика определена для xi > 0, получено {xi}")
    return float(-0.5 * xi * np.log(xi) + 0.5 * xi - b * np.sqrt(xi) - 0.5 * _LOG2)


def log_abs_pcf_d_left(xi: float, b: float, epsrel: float = 1e-12, limit: int = 200) -> float:
    """ln|D_{-xi}(b)| в логарифмической шкале, xi >= 1, b > 0.

    Первое интегральное представление с вынесенными log Gamma(xi) и
    максимумом подынтегральной функции; работает далеко за пределами
    области рядов, где само значение D уходит в машинный ноль.
    """
    if xi < 1.0:
        raise DomainError(f"Логарифмическая схема требует xi >= 1, получено {xi}")
    if not b > 0:
        raise DomainError(f"Требуется b > 0, получено {b}")

    a = xi - 1.0
    peak = 0.5 * (-b + np.sqrt(b * b + 4.0 * a))

    def exponent(t: float) -> float:
        log_t = np.log(t) if t > 0 else -np.inf
        return (a * log_t if a > 0 else 0.0) - 0.5 * t * t - b * t

    top = exponent(peak) if peak > 0 else 0.0

    def integrand(t: float) -> float:
        if t <= 0.0:
            return 1.0 if a == 0 else 0.0
        return float(np.exp(exponent(t) - top))

    # exponent'' <= -1, поэтому за 40 единицами от максимума вклад ниже exp(-800)
    lo, hi = max(0.0, peak - 40.0), peak + 40.0
    total = 0.0
    for left, right in ((lo, peak), (peak, hi)):
        if right <= left:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, _ = integrate.quad(integrand, left, right, epsabs=0.0, epsrel=epsrel, limit=limit)
            except integrate.IntegrationWarning as e:
                raise QuadratureError(f"Квадратура ln D_(-{xi:g})({b:g}) не сошлась: {e}")
        total += value

    return float(-0.25 * b * b - special.gammaln(xi) + top + np.log(total))
