"""Независимая проверка спектра конечно-разностной матрицей.

Оператор -y'' + (x^2/4 - 1/2) y на [-L, L] с условием Дирихле; точечные
взаимодействия заменены весами z/h и -z/h в узлах, ближайших к b и -b.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from .eigen_condition import ProblemParams
from .errors import EigensolveError, GridError, OracleMismatchError

logger = logging.getLogger(__name__)

MIN_NODES = 100
MIN_NODES_PER_B = 10.0
TAIL_MARGIN = 5.0
MAX_K = 40
EXTRA_EIGENVALUES = 10
DENSE_FALLBACK_SIZE = 6000
# Значения не дальше NEAR_INTERVAL от [0, k+2] считаются лежащими у отрезка
NEAR_INTERVAL = 1.0


@dataclass(frozen=True)
class GridSpec:
    L: float
    n: int

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.n + 1)

    @property
    def nodes(self) -> np.ndarray:
        return -self.L + self.h * np.arange(1, self.n + 1)

    @classmethod
    def for_problem(cls, b: float, n: int = 2400, L_min: float = 12.0, aligned: bool = True) -> 'GridSpec':
        """L = max(L_min, b + 5); при aligned L растягивается так, чтобы +-b попали точно в узлы"""
        L = max(L_min, b + TAIL_MARGIN)
        if not aligned:
            return cls(L=L, n=n)
        # узел j (с 1) лежит в -L + j h; требуем -L + j h = b, то есть L = b (n+1) / (2j - n - 1)
        j = int(np.floor((n + 1) / 2.0 + b * (n + 1) / (2.0 * L)))
        if 2 * j - n - 1 <= 0:
            return cls(L=L, n=n)
        return cls(L=b * (n + 1) / (2 * j - n - 1), n=n)

    def validate(self, b: float):
        if not self.L > 0:
            raise GridError(f"Полуширина интервала должна быть положительной, получено L={self.L}")
        if self.n < MIN_NODES:
            raise GridError(f"Нужно не меньше {MIN_NODES} внутренних узлов, получено n={self.n}")
        if b / self.h < MIN_NODES_PER_B:
            raise GridError(f"Шаг h={self.h:.4g} не разрешает точку b={b} (b/h < {MIN_NODES_PER_B:g})")
        if self.L < b + TAIL_MARGIN:
            raise GridError(f"Интервал L={self.L} короче b + {TAIL_MARGIN:g}")

    def nearest_node(self, x: float) -> int:
        """Индекс (с нуля) узла, ближайшего к x"""
        return int(np.clip(np.rint((x + self.L) / self.h) - 1, 0, self.n - 1))

    def to_dict(self) -> Dict[str, float]:
        return {'L': self.L, 'n': self.n, 'h': self.h}


def build_matrix(p: ProblemParams, g: GridSpec) -> sparse.csr_matrix:
    g.validate(p.b)
    h = g.h
    x = g.nodes
    diagonal = (2.0 / h ** 2 + x * x / 4.0 - 0.5).astype(np.complex128)
    diagonal[g.nearest_node(p.b)] += p.z / h
    diagonal[g.nearest_node(-p.b)] -= p.z / h
    off = np.full(g.n - 1, -1.0 / h ** 2, dtype=np.complex128)
    matrix = sparse.diags([off, diagonal, off], [-1, 0, 1], format='csr')
    if p.z.imag == 0.0:
        matrix = matrix.real.tocsr()
    return matrix


def snap_offset(p: ProblemParams, g: GridSpec) -> float:
    """|x_узла - b| для узла, получившего вес z/h"""
    return float(abs(g.nodes[g.nearest_node(p.b)] - p.b))


def _shift_invert(matrix, k: int, sigma: float) -> np.ndarray:
    count = min(k + EXTRA_EIGENVALUES, matrix.shape[0] - 2)
    return sparse_linalg.eigs(matrix.astype(np.complex128), k=count, sigma=sigma,
                              which='LM', return_eigenvectors=False)


def _dense(matrix) -> np.ndarray:
    if matrix.shape[0] > DENSE_FALLBACK_SIZE:
        raise EigensolveError(f"Плотное разложение матрицы {matrix.shape[0]}x{matrix.shape[0]} слишком дорогое")
    return linalg.eigvals(matrix.toarray())


def _distance_to_interval(values: np.ndarray, upper: float) -> np.ndarray:
    real_gap = np.maximum(0.0, np.maximum(-values.real, values.real - upper))
    return np.hypot(real_gap, values.imag)


def oracle_spectrum(p: ProblemParams, g: GridSpec, k: int = 10) -> List[complex]:
    """k собственных значений матрицы, ближайших к отрезку [0, k+2], по возрастанию Re"""
    if not 1 <= k <= MAX_K:
        raise GridError(f"Допустимо 1 <= k <= {MAX_K}, получено k={k}")
    matrix = build_matrix(p, g)
    sigma = (k + 2) / 2.0

    try:
        values = _shift_invert(matrix, k, sigma)
    except (sparse_linalg.ArpackNoConvergence, sparse_linalg.ArpackError, RuntimeError) as e:
        logger.warning(f"ARPACK не сошелся ({e}), переход к плотному разложению")
        try:
            values = _dense(matrix)
        except (linalg.LinAlgError, ValueError) as dense_error:
            raise EigensolveError(f"Не удалось найти собственные значения: {dense_error}") from dense_error

    values = np.asarray(values, dtype=np.complex128)
    if not np.all(np.isfinite(values)) or values.size < k:
        raise EigensolveError(f"Получено {values.size} собственных значений, требуется {k}")

    distance = _distance_to_interval(values, k + 2.0)
    near = distance <= NEAR_INTERVAL
    # у отрезка порядок по Re, дальние значения по расстоянию
    order = np.lexsort((np.where(near, 0.0, distance), np.where(near, values.real, 0.0), ~near))
    closest = sorted(values[order[:k]], key=lambda v: (round(v.real, 12), v.imag))
    logger.info("Конечно-разностный спектр b=%g, z=%s, h=%.4g: %d значений", p.b, p.z, g.h, k)
    return [complex(v) for v in closest]


@dataclass
class SpectrumComparison:
    solver_roots: List[complex]
    oracle_values: List[complex]
    solver_to_oracle: List[float]
    oracle_to_solver: List[float]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return float(max(self.solver_to_oracle + self.oracle_to_solver, default=0.0))

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> Dict[str, object]:
        def pairs(values):
            return [[v.real, v.imag] for v in values]
        return {
            'solver': pairs(self.solver_roots),
            'oracle': pairs(self.oracle_values),
            'solver_to_oracle': self.solver_to_oracle,
            'oracle_to_solver': self.oracle_to_solver,
            'max_deviation': self.max_deviation,
            'tolerance': self.tolerance,
            'passed': self.passed,
        }

    def raise_if_failed(self):
        if not self.passed:
            raise OracleMismatchError(
                f"Расхождение с конечно-разностным спектром {self.max_deviation:.3e} > {self.tolerance:.1e}"
            )


def _nearest_distances(source: Sequence[complex], target: Sequence[complex]) -> List[float]:
    if not len(target):
        return [float('inf')] * len(source)
    target = np.asarray(target, dtype=np.complex128)
    return [float(np.min(np.abs(target - s))) for s in source]


def compare_spectra(solver_roots: Sequence[complex], oracle_values: Sequence[complex],
                    re_max: float, tolerance: float = 5e-3) -> SpectrumComparison:
    """Двустороннее сопоставление корней с Re nu <= re_max"""
    solver_roots = [complex(v) for v in solver_roots]
    oracle_values = [complex(v) for v in oracle_values]
    solver_low = [v for v in solver_roots if v.real <= re_max]
    oracle_low = [v for v in oracle_values if v.real <= re_max]
    comparison = SpectrumComparison(
        solver_roots=solver_low,
        oracle_values=oracle_low,
        solver_to_oracle=_nearest_distances(solver_low, oracle_values),
        oracle_to_solver=_nearest_distances(oracle_low, solver_roots),
        tolerance=tolerance,
    )
    logger.info(f"Сравнение с оракулом: максимальное отклонение {comparison.max_deviation:.3e}")
    return comparison


def richardson_ratio(level: int, b: float = 1.0, L: float = 12.0, n: int = 400) -> float:
    """Отношение ошибок уровня level при z = 0 на сетках с шагом h и h/2"""
    p = ProblemParams(b=b)
    errors = []
    for nodes in (n, 2 * n + 1):
        values = oracle_spectrum(p, GridSpec(L=L, n=nodes), k=level + 1)
        errors.append(abs(values[level] - level))
    return float(errors[0] / errors[1])


def refinement_shift(p: ProblemParams, g: GridSpec, k: int = 10, re_max: Optional[float] = None) -> float:
    """Наибольший сдвиг значений с Re nu <= re_max при переходе к сетке 2n+1.

    При n -> 2n+1 шаг делится ровно пополам, узлы +-b и веса +-z/h сохраняют
    положение.
    """
    re_max = k - 2.0 if re_max is None else re_max
    coarse = oracle_spectrum(p, g, k)
    fine = oracle_spectrum(p, GridSpec(L=g.L, n=2 * g.n + 1), k)
    shift = compare_spectra(coarse, fine, re_max).max_deviation
    logger.info(f"Сдвиг спектра при удвоении сетки (b={p.b:g}): {shift:.3e}")
    return shift
