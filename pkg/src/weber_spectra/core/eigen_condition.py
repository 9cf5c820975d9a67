"""Условие на собственные значения.

G(nu) = 1/Gamma(-nu) - z^2 D_nu(b)^2 Phi(nu) целая по nu и обращается в ноль
ровно на спектре; мероморфная форма M(nu) = Gamma(-nu) D^2 Phi нужна только
для диагностики локальных разложений.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Union

import numpy as np

from .errors import DomainError, PoleError
from .gamma_core import POLE_RADIUS, ComplexLike, as_complex_array, recip_gamma, restore_shape
from .weber_fns import DEFAULT_LIMITS, SeriesLimits, WeberValues, d_prefactors, nu_step, weber_values

logger = logging.getLogger(__name__)

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
SQRT_2PI = np.sqrt(2.0 * np.pi)

# Порог |D_n(b)|, ниже которого целое n считается нулем D
INTEGER_ZERO_THRESHOLD = 1e-10
# Радиус окружности для аналитического продолжения M в целой точке
EXTENSION_RADIUS = 0.01


@dataclass(frozen=True)
class ProblemParams:
    """Оператор с парой точечных взаимодействий z (delta_{x-b} - delta_{x+b})"""
    b: float
    z: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, 'b', float(self.b))
        object.__setattr__(self, 'z', complex(self.z))
        if not (np.isfinite(self.b) and self.b > 0):
            raise DomainError(f"Точка взаимодействия должна быть положительной, получено b={self.b}")
        if not np.isfinite(self.z):
            raise DomainError(f"Константа связи должна быть конечной, получено z={self.z}")

    @classmethod
    def imaginary(cls, b: float, r: float) -> 'ProblemParams':
        return cls(b=b, z=complex(0.0, r))

    @classmethod
    def real(cls, b: float, r: float) -> 'ProblemParams':
        return cls(b=b, z=complex(r, 0.0))

    @property
    def is_imaginary(self) -> bool:
        return self.z.real == 0.0

    @property
    def is_real(self) -> bool:
        return self.z.imag == 0.0

    @property
    def z_squared(self) -> complex:
        """z^2 без ошибки округления для чисто вещественного или мнимого z"""
        if self.z.imag == 0.0:
            return complex(self.z.real * self.z.real, 0.0)
        if self.z.real == 0.0:
            return complex(-self.z.imag * self.z.imag, 0.0)
        return self.z * self.z

    def to_dict(self) -> Dict[str, float]:
        return {'b': self.b, 'z_re': self.z.real, 'z_im': self.z.imag}


@dataclass(frozen=True)
class BoundaryData:
    """Граничные значения в x = b: P = D, Q = D', R = y_e, S = y_e', T = y_o, U = y_o'"""
    nu: Union[complex, np.ndarray]
    P: Union[complex, np.ndarray]
    Q: Union[complex, np.ndarray]
    R: Union[complex, np.ndarray]
    S: Union[complex, np.ndarray]
    T: Union[complex, np.ndarray]
    U: Union[complex, np.ndarray]

    @classmethod
    def from_values(cls, w: WeberValues, like: ComplexLike) -> 'BoundaryData':
        return cls(
            nu=restore_shape(w.nu, like),
            P=restore_shape(w.d, like), Q=restore_shape(w.d_dx, like),
            R=restore_shape(w.even, like), S=restore_shape(w.even_dx, like),
            T=restore_shape(w.odd, like), U=restore_shape(w.odd_dx, like),
        )

    @property
    def even_reduction(self):
        """RQ - SP = W[y_e, D_nu]"""
        return self.R * self.Q - self.S * self.P

    @property
    def odd_reduction(self):
        """TQ - UP = W[y_o, D_nu]"""
        return self.T * self.Q - self.U * self.P

    def reduction_residuals(self):
        """Отклонения от -2^((nu+1)/2) sqrt(pi)/Gamma(-nu/2) и -2^(nu/2) sqrt(pi)/Gamma(1/2 - nu/2)"""
        nu = as_complex_array(self.nu)
        d0, d1 = d_prefactors(nu)
        even = np.abs(as_complex_array(self.even_reduction) - d1)
        odd = np.abs(as_complex_array(self.odd_reduction) + d0)
        return restore_shape(even, self.nu).real, restore_shape(odd, self.nu).real


def boundary_data(nu: ComplexLike, b: float, limits: SeriesLimits = DEFAULT_LIMITS) -> BoundaryData:
    return BoundaryData.from_values(weber_values(nu, b, limits), nu)


def _phi(w: WeberValues) -> np.ndarray:
    return _SQRT_2_OVER_PI * w.even * w.odd


def phi(nu: ComplexLike, b: float, limits: SeriesLimits = DEFAULT_LIMITS):
    """Phi(nu) = sqrt(2/pi) y_even(nu, b) y_odd(nu, b)"""
    return restore_shape(_phi(weber_values(nu, b, limits)), nu)


def _condition_terms(nu: ComplexLike, p: ProblemParams, limits: SeriesLimits):
    nu_arr = as_complex_array(nu)
    w = weber_values(nu_arr, p.b, limits)
    gamma_term = as_complex_array(recip_gamma(-nu_arr))
    coupling_term = p.z_squared * w.d * w.d * _phi(w)
    return gamma_term, coupling_term


def eig_residual_G(nu: ComplexLike, p: ProblemParams, limits: SeriesLimits = DEFAULT_LIMITS):
    """G(nu) = 1/Gamma(-nu) - z^2 D_nu(b)^2 Phi(nu)"""
    gamma_term, coupling_term = _condition_terms(nu, p, limits)
    return restore_shape(gamma_term - coupling_term, nu)


def residual_scale(nu: ComplexLike, p: ProblemParams, limits: SeriesLimits = DEFAULT_LIMITS):
    """Масштаб слагаемых G: |1/Gamma(-nu)| + |z^2 D^2 Phi|"""
    gamma_term, coupling_term = _condition_terms(nu, p, limits)
    return restore_shape(np.abs(gamma_term) + np.abs(coupling_term), nu).real


def eig_residual_G_dnu(nu: complex, p: ProblemParams, limits: SeriesLimits = DEFAULT_LIMITS) -> complex:
    """dG/dnu центральной разностью"""
    nu = complex(nu)
    h = nu_step(nu)
    values = as_complex_array(eig_residual_G(np.array([nu + h, nu - h]), p, limits))
    return complex((values[0] - values[1]) / (2.0 * h))


def taylor_coefficients(func: Callable[[np.ndarray], np.ndarray], center: complex,
                        radius: float, n_samples: int = 64) -> np.ndarray:
    """Коэффициенты Тейлора аналитической функции через дискретные интегралы Коши.

    func принимает массив точек окружности. Надежны коэффициенты с номером
    заметно меньше n_samples/2.
    """
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    points = center + radius * np.exp(1j * theta)
    values = as_complex_array(func(points))
    coefficients = np.fft.fft(values) / n_samples
    return coefficients / radius ** np.arange(n_samples)


def m_on_points(points: np.ndarray, b: float, limits: SeriesLimits = DEFAULT_LIMITS) -> np.ndarray:
    """M(nu) = D^2 Phi / (1/Gamma(-nu)) на массиве точек вне N_0"""
    points = as_complex_array(points)
    w = weber_values(points, b, limits)
    with np.errstate(divide='ignore', invalid='ignore'):
        return w.d * w.d * _phi(w) / as_complex_array(recip_gamma(-points))


def big_m_extension(n: int, b: float, radius: float = EXTENSION_RADIUS, n_samples: int = 64,
                    limits: SeriesLimits = DEFAULT_LIMITS) -> complex:
    """Значение аналитического продолжения M в целой точке n, где D_n(b) = 0"""
    coefficients = taylor_coefficients(lambda pts: m_on_points(pts, b, limits), complex(n), radius, n_samples)
    logger.debug(f"Продолжение M в n={n}, b={b}: коэффициенты {coefficients[:3]}")
    return complex(coefficients[0])


def big_m(nu: complex, b: float, limits: SeriesLimits = DEFAULT_LIMITS) -> complex:
    """M(nu) = Gamma(-nu) D_nu(b)^2 Phi(nu); в нулях D_n(b) целого n - продолжение"""
    nu = complex(nu)
    n = int(round(nu.real))
    if n >= 0 and abs(nu - n) < POLE_RADIUS:
        d_n = complex(weber_values(float(n), b, limits).d[0])
        if abs(d_n) < INTEGER_ZERO_THRESHOLD:
            return big_m_extension(n, b, limits=limits)
        raise PoleError(f"M(nu; b={b}) имеет неустранимый полюс в nu={n} (D_n(b)={d_n:.3e})")

    value = m_on_points(np.array([nu]), b, limits)[0]
    if not np.isfinite(value):
        raise PoleError(f"M(nu; b={b}) не определена в nu={nu}")
    return complex(value)


def boundary_det(nu: ComplexLike, p: ProblemParams, limits: SeriesLimits = DEFAULT_LIMITS):
    """2(RQ - SP)(TQ - UP) - 2 z^2 P^2 R T; совпадает с sqrt(2 pi) G(nu)"""
    bd = boundary_data(nu, p.b, limits)
    return 2.0 * bd.even_reduction * bd.odd_reduction - 2.0 * p.z_squared * bd.P * bd.P * bd.R * bd.T


def boundary_matrix(nu: complex, p: ProblemParams, limits: SeriesLimits = DEFAULT_LIMITS) -> np.ndarray:
    """Матрица условий сшивки для коэффициентов (beta, alpha, sigma, tau).

    y = alpha D_nu(-x) слева, sigma y_e + tau y_o между точками,
    beta D_nu(x) справа; строки - непрерывность в b и -b и скачки
    производной z y(b), -z y(-b).
    """
    bd = boundary_data(complex(nu), p.b, limits)
    z = p.z
    P, Q, R, S, T, U = bd.P, bd.Q, bd.R, bd.S, bd.T, bd.U
    return np.array([
        [-P, 0.0, R, T],
        [0.0, -P, R, -T],
        [z * P - Q, 0.0, S, U],
        [0.0, z * P + Q, -S, U],
    ], dtype=np.complex128)
