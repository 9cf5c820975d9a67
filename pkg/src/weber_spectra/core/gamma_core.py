import logging
from typing import Tuple, Union

import numpy as np
from scipy import special

from .errors import DomainError, NonFiniteError, PoleError

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, np.ndarray]

# Окрестность полюса, в которой Gamma не вычисляется
POLE_RADIUS = 1e-8
# Окрестность точек -n, в которой 1/Gamma принудительно равна нулю
SNAP_RADIUS = 1e-12

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG2 = np.log(2.0)
_SQRT_PI = np.sqrt(np.pi)


def as_complex_array(w: ComplexLike) -> np.ndarray:
    """Приводит скаляр или массив к одномерному массиву complex128"""
    return np.atleast_1d(np.asarray(w, dtype=np.complex128))


def restore_shape(values: np.ndarray, like: ComplexLike):
    """Возвращает скаляр для скалярного входа и массив исходной формы иначе"""
    if np.ndim(like) == 0:
        return complex(values.reshape(-1)[0])
    return values.reshape(np.shape(like))


def ensure_finite(values: np.ndarray, what: str) -> np.ndarray:
    """Не выпускает NaN/Inf из публичных операций"""
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise NonFiniteError(f"{what}: получено {bad} нечисловых значений")
    return values


def pole_distance(w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Расстояние до ближайшей точки -n, n >= 0, и сама эта точка"""
    nearest = np.minimum(np.round(w.real), 0.0)
    return np.abs(w - nearest), nearest


def recip_gamma(w: ComplexLike, snap_radius: float = SNAP_RADIUS):
    """Целая функция 1/Gamma(w).

    Вещественные аргументы считаются на вещественной оси, поэтому мнимая часть
    результата для них ровно нулевая. В окрестности snap_radius точек -n
    возвращается точный ноль.
    """
    w_arr = as_complex_array(w)
    out = np.empty_like(w_arr)

    on_axis = w_arr.imag == 0.0
    if np.any(on_axis):
        out[on_axis] = special.rgamma(w_arr.real[on_axis])
    if np.any(~on_axis):
        out[~on_axis] = special.rgamma(w_arr[~on_axis])

    distance, _ = pole_distance(w_arr)
    out[distance < snap_radius] = 0.0

    ensure_finite(out, "1/Gamma")
    return restore_shape(out, w)


def gamma(w: ComplexLike, pole_radius: float = POLE_RADIUS):
    """Gamma(w) = 1/recip_gamma(w) вне окрестностей полюсов"""
    w_arr = as_complex_array(w)
    distance, nearest = pole_distance(w_arr)
    if np.any(distance < pole_radius):
        idx = int(np.argmin(distance))
        raise PoleError(
            f"Аргумент {w_arr[idx]} находится в пределах {pole_radius:g} от полюса {nearest[idx]:g}"
        )
    out = 1.0 / as_complex_array(recip_gamma(w_arr, snap_radius=0.0))
    ensure_finite(out, "Gamma")
    return restore_shape(out, w)


def log_gamma(w: ComplexLike, pole_radius: float = POLE_RADIUS):
    """Главная ветвь log Gamma(w)"""
    w_arr = as_complex_array(w)
    distance, nearest = pole_distance(w_arr)
    if np.any(distance < pole_radius):
        idx = int(np.argmin(distance))
        raise PoleError(f"log Gamma: аргумент {w_arr[idx]} у полюса {nearest[idx]:g}")
    out = special.loggamma(w_arr)
    ensure_finite(out, "log Gamma")
    return restore_shape(out, w)


def check_duplication(w: complex, pole_radius: float = POLE_RADIUS) -> float:
    """Относительная невязка формулы удвоения Лежандра в точке w"""
    w = complex(w)
    lhs = gamma(2.0 * w, pole_radius)
    rhs = np.exp((2.0 * w - 1.0) * _LOG2) / _SQRT_PI * gamma(w, pole_radius) * gamma(w + 0.5, pole_radius)
    residual = abs(lhs - rhs) / abs(lhs)
    logger.debug(f"Формула удвоения в {w}: невязка {residual:.3e}")
    return float(residual)


def stirling_residual(x: float) -> float:
    """|log Gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2]| для x > 0"""
    if x <= 0:
        raise DomainError(f"Оценка Стирлинга определена для x > 0, получено {x}")
    approx = (x - 0.5) * np.log(x) - x + _HALF_LOG_2PI
    return float(abs(special.gammaln(x) - approx))
