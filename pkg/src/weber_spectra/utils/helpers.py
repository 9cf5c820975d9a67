from typing import List

import numpy as np

from ..core.errors import DomainError


def format_float(value: float) -> str:
    """Десятичная запись с 17 значащими цифрами (обратимая)"""
    value = float(value)
    if value == 0.0:
        return '0'
    return f"{value:.17g}"


def r_grid(r_min: float, r_max: float, r_step: float) -> List[float]:
    """Равномерная сетка r_min, r_min + r_step, ... <= r_max.

    Узлы считаются как r_min + j r_step и округляются до 12 знаков, поэтому
    сетка не зависит от накопления ошибок и одинакова при повторных запусках.
    """
    if not r_step > 0:
        raise DomainError(f"Шаг сетки должен быть положительным, получено {r_step}")
    if r_max < r_min:
        raise DomainError(f"r_max={r_max} меньше r_min={r_min}")
    count = int(np.floor((r_max - r_min) / r_step + 1e-9))
    return [round(r_min + j * r_step, 12) for j in range(count + 1)]


def complex_pair(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]
