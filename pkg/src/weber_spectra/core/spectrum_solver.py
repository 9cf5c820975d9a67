"""Поиск собственных значений как нулей целой функции G в прямоугольниках.

Число корней дает принцип аргумента (сумма приращений arg G по границе с
адаптивным дроблением отрезков), сами корни уточняются методом Ньютона
после рекурсивного деления прямоугольника на четыре части.
"""
import cmath
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dzero_finder import DZeroInfo, local_expansion
from .eigen_condition import ProblemParams, eig_residual_G
from .errors import ContourError, ConvergenceError, DomainError, RangeError, TooSmallCouplingError
from .gamma_core import as_complex_array
from .root_clusterer import RootClusterer
from .weber_fns import DEFAULT_LIMITS, SeriesLimits, nu_step

logger = logging.getLogger(__name__)

MIN_EDGE_SAMPLES = 16
MAX_REFINE_LEVELS = 30
BOUNDARY_ZERO_GUARD = 1e-10
NUDGE_STEPS = (2.5e-4, 5e-4, 1e-3)
ROUNDING_GAP = 0.1
# Запас на эвристическую оценку B в границе 3 B |eps|^2
SEED_SAFETY_FACTOR = 4.0
# Несимметричные доли деления: линии разреза не проходят через оси симметрии спектра
SPLIT_FRACTIONS = (
    (0.5123, 0.4871),
    (0.4689, 0.5317),
    (0.5461, 0.5573),
    (0.4237, 0.4419),
)


class RootOrigin(str, Enum):
    GRID_SEED = "grid_seed"
    DZERO_SEED = "dzero_seed"
    CONTINUATION = "continuation"


@dataclass(frozen=True)
class RectRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError(
                f"Некорректный прямоугольник [{self.re_min}, {self.re_max}] x [{self.im_min}, {self.im_max}]"
            )

    @classmethod
    def centered_square(cls, center: complex, side: float) -> 'RectRegion':
        half = 0.5 * side
        center = complex(center)
        return cls(center.real - half, center.real + half, center.imag - half, center.imag + half)

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> 'RectRegion':
        return cls(float(data['re_min']), float(data['re_max']), float(data['im_min']), float(data['im_max']))

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self) -> List[complex]:
        """Вершины против часовой стрелки"""
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def contains(self, nu: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= nu.real <= self.re_max + pad
                and self.im_min - pad <= nu.imag <= self.im_max + pad)

    def boundary_distance(self, nu: complex) -> float:
        return float(min(nu.real - self.re_min, self.re_max - nu.real,
                         nu.imag - self.im_min, self.im_max - nu.imag))

    def expanded(self, delta: float) -> 'RectRegion':
        return RectRegion(self.re_min - delta, self.re_max + delta, self.im_min - delta, self.im_max + delta)

    def split(self, fx: float = 0.5, fy: float = 0.5) -> List['RectRegion']:
        xs = self.re_min + fx * self.width
        ys = self.im_min + fy * self.height
        return [
            RectRegion(self.re_min, xs, self.im_min, ys),
            RectRegion(xs, self.re_max, self.im_min, ys),
            RectRegion(xs, self.re_max, ys, self.im_max),
            RectRegion(self.re_min, xs, ys, self.im_max),
        ]

    def max_modulus(self) -> float:
        return max(abs(c) for c in self.corners())

    def to_dict(self) -> Dict[str, float]:
        return {'re_min': self.re_min, 're_max': self.re_max, 'im_min': self.im_min, 'im_max': self.im_max}


def _default_window() -> RectRegion:
    return RectRegion(-1.0, 25.0, -6.0, 6.0)


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-12
    max_newton: int = 60
    winding_samples_per_unit: int = 256
    match_radius: float = 0.25
    imag_tol: float = 1e-7
    nu_window: RectRegion = field(default_factory=_default_window)
    dedup_radius: float = 1e-8
    min_rect_size: float = 1e-6
    limits: SeriesLimits = DEFAULT_LIMITS

    def __post_init__(self):
        for name in ('newton_tol', 'max_newton', 'winding_samples_per_unit', 'match_radius',
                     'imag_tol', 'dedup_radius', 'min_rect_size'):
            if not getattr(self, name) > 0:
                raise DomainError(f"Параметр решателя {name} должен быть положительным")

    def to_dict(self) -> Dict[str, object]:
        return {
            'newton_tol': self.newton_tol,
            'max_newton': self.max_newton,
            'winding_samples_per_unit': self.winding_samples_per_unit,
            'match_radius': self.match_radius,
            'imag_tol': self.imag_tol,
            'nu_window': self.nu_window.to_dict(),
            'dedup_radius': self.dedup_radius,
            'min_rect_size': self.min_rect_size,
        }


@dataclass(frozen=True)
class Eigenvalue:
    nu: complex
    residual: float
    multiplicity: int = 1
    origin: RootOrigin = RootOrigin.GRID_SEED

    @property
    def is_real(self) -> bool:
        return self.nu.imag == 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            're_nu': self.nu.real,
            'im_nu': self.nu.imag,
            'residual': self.residual,
            'multiplicity': self.multiplicity,
            'origin': self.origin.value,
        }


@dataclass(frozen=True)
class HarmonicOscillatorSpectrum:
    """Данные в координатах гармонического осциллятора -u'' + x^2 u"""
    z_ho: complex
    b_ho: float
    eigenvalues: List[complex]


class _BoundaryHit(Exception):
    """G почти обращается в ноль на границе"""


@dataclass
class _Contour:
    region: RectRegion
    count: int
    points: np.ndarray
    values: np.ndarray

    def root_sum(self) -> complex:
        """Сумма корней внутри контура: (1/2 pi i) sum nu d log G"""
        nxt_points = np.roll(self.points, -1)
        increments = np.log(np.roll(self.values, -1) / self.values)
        midpoints = 0.5 * (self.points + nxt_points)
        return complex(np.sum(midpoints * increments) / (2j * np.pi))


def _evaluate(p: ProblemParams, points: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    values = as_complex_array(eig_residual_G(points, p, cfg.limits))
    if not np.all(np.isfinite(values)) or np.any(np.abs(values) < BOUNDARY_ZERO_GUARD):
        raise _BoundaryHit()
    return values


def _boundary_points(region: RectRegion, samples_per_unit: float) -> np.ndarray:
    corners = region.corners()
    edges = []
    for start, end in zip(corners, corners[1:] + corners[:1]):
        n = max(MIN_EDGE_SAMPLES, int(np.ceil(abs(end - start) * samples_per_unit)))
        edges.append(start + (end - start) * (np.arange(n) / n))
    return np.concatenate(edges)


def _trace(p: ProblemParams, region: RectRegion, samples_per_unit: float, cfg: SolverConfig) -> _Contour:
    """Дробит отрезки контура, пока каждое приращение аргумента не меньше pi/2 по модулю"""
    points = _boundary_points(region, samples_per_unit)
    values = _evaluate(p, points, cfg)

    for _ in range(MAX_REFINE_LEVELS):
        jumps = np.angle(np.roll(values, -1) / values)
        bad = np.nonzero(np.abs(jumps) >= 0.5 * np.pi)[0]
        if bad.size == 0:
            break
        mids = 0.5 * (points[bad] + np.roll(points, -1)[bad])
        mid_values = _evaluate(p, mids, cfg)
        points = np.insert(points, bad + 1, mids)
        values = np.insert(values, bad + 1, mid_values)
    else:
        raise ContourError(f"Приращения аргумента на границе {region.to_dict()} не удалось сделать малыми")

    winding = float(np.sum(np.angle(np.roll(values, -1) / values)) / (2.0 * np.pi))
    count = int(round(winding))
    if abs(winding - count) >= ROUNDING_GAP:
        raise _RoundingGap(winding)
    return _Contour(region=region, count=count, points=points, values=values)


class _RoundingGap(Exception):
    def __init__(self, winding: float):
        super().__init__(winding)
        self.winding = winding


def _contour(p: ProblemParams, region: RectRegion, cfg: SolverConfig) -> _Contour:
    samples = float(cfg.winding_samples_per_unit)
    gap = None
    for _ in range(3):
        try:
            return _trace(p, region, samples, cfg)
        except _RoundingGap as e:
            gap = e.winding
            samples *= 2.0
            logger.debug(f"Индекс {gap:.4f} не близок к целому, удваиваем число узлов")
    raise ContourError(f"Индекс контура {gap:.4f} не округляется до целого после двух удвоений")


def _contour_with_nudge(p: ProblemParams, rect: RectRegion, cfg: SolverConfig) -> _Contour:
    for delta in (0.0,) + NUDGE_STEPS:
        region = rect if delta == 0.0 else rect.expanded(delta)
        try:
            return _contour(p, region, cfg)
        except _BoundaryHit:
            logger.warning(f"G почти обращается в ноль на границе {region.to_dict()}, сдвигаем границу")
    raise ContourError(f"Не удалось отодвинуть границу {rect.to_dict()} от корней G")


def _check_window(rect: RectRegion, cfg: SolverConfig):
    if rect.max_modulus() + NUDGE_STEPS[-1] > cfg.limits.nu_max:
        raise RangeError(f"Прямоугольник {rect.to_dict()} выходит за область |nu| <= {cfg.limits.nu_max:g}")


def count_zeros_rect(p: ProblemParams, rect: RectRegion, cfg: Optional[SolverConfig] = None) -> int:
    """Число корней G в прямоугольнике с учетом кратности"""
    cfg = cfg or SolverConfig()
    _check_window(rect, cfg)
    contour = _contour_with_nudge(p, rect, cfg)
    logger.debug(f"В {contour.region.to_dict()} найдено {contour.count} корней")
    return contour.count


def newton_polish(p: ProblemParams, nu0: complex, cfg: Optional[SolverConfig] = None) -> Optional[complex]:
    """Метод Ньютона для G; None, если итерации не сошлись"""
    cfg = cfg or SolverConfig()
    nu = complex(nu0)
    for _ in range(cfg.max_newton):
        h = nu_step(nu)
        try:
            values = as_complex_array(eig_residual_G(np.array([nu, nu + h, nu - h]), p, cfg.limits))
        except RangeError:
            return None
        if values[0] == 0:
            return nu
        slope = (values[1] - values[2]) / (2.0 * h)
        if slope == 0 or not np.isfinite(slope):
            return None
        step = complex(values[0] / slope)
        nu -= step
        if not np.isfinite(nu):
            return None
        if abs(step) <= cfg.newton_tol * max(1.0, abs(nu)):
            return nu
    return None


def make_eigenvalue(p: ProblemParams, nu: complex, multiplicity: int = 1,
                    origin: RootOrigin = RootOrigin.GRID_SEED,
                    cfg: Optional[SolverConfig] = None) -> Eigenvalue:
    limits = cfg.limits if cfg else DEFAULT_LIMITS
    residual = abs(complex(eig_residual_G(nu, p, limits)))
    return Eigenvalue(nu=complex(nu), residual=float(residual), multiplicity=multiplicity, origin=origin)


def _starting_points(contour: _Contour) -> List[complex]:
    region = contour.region
    starts = [contour.root_sum() / max(contour.count, 1), region.center]
    for fx, fy in ((0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)):
        starts.append(complex(region.re_min + fx * region.width, region.im_min + fy * region.height))
    return [s for s in starts if np.isfinite(s)]


def _solve_single(p: ProblemParams, contour: _Contour, cfg: SolverConfig) -> Eigenvalue:
    region = contour.region
    pad = 1e-9 * max(region.width, region.height)
    for start in _starting_points(contour):
        nu = newton_polish(p, start, cfg)
        if nu is not None and region.contains(nu, pad):
            return make_eigenvalue(p, nu, 1, RootOrigin.GRID_SEED, cfg)
    raise ConvergenceError(f"Ньютон не сошелся ни из одной стартовой точки в {region.to_dict()}")


def _solve_cluster(p: ProblemParams, contour: _Contour, cfg: SolverConfig) -> Eigenvalue:
    """Кратный корень или неразделимое скопление в очень малом прямоугольнике"""
    estimate = contour.root_sum() / contour.count
    nu = newton_polish(p, estimate, cfg)
    if nu is None or not contour.region.contains(nu, max(contour.region.width, contour.region.height)):
        nu = estimate
    logger.warning("Корень кратности %d вблизи %s", contour.count, nu)
    return make_eigenvalue(p, nu, contour.count, RootOrigin.GRID_SEED, cfg)


def _split(p: ProblemParams, contour: _Contour, cfg: SolverConfig) -> List[_Contour]:
    """Делит прямоугольник на четыре части с сохранением числа корней"""
    for fx, fy in SPLIT_FRACTIONS:
        try:
            children = [_contour(p, child, cfg) for child in contour.region.split(fx, fy)]
        except _BoundaryHit:
            continue
        if sum(child.count for child in children) == contour.count:
            return children
        logger.debug(f"Разбиение ({fx}, {fy}) потеряло корни, пробуем другое")
    raise ContourError(f"Не удалось разбить {contour.region.to_dict()} с сохранением числа корней")


def solve_rect(p: ProblemParams, rect: RectRegion, cfg: Optional[SolverConfig] = None) -> List[Eigenvalue]:
    """Все корни G в прямоугольнике, по возрастанию (Re, Im)"""
    cfg = cfg or SolverConfig()
    _check_window(rect, cfg)
    top = _contour_with_nudge(p, rect, cfg)
    logger.info("Решение в %s при z=%s, b=%g: %d корней", top.region.to_dict(), p.z, p.b, top.count)

    roots: List[Eigenvalue] = []
    stack = [top]
    while stack:
        contour = stack.pop()
        if contour.count == 0:
            continue
        if contour.count == 1:
            roots.append(_solve_single(p, contour, cfg))
        elif max(contour.region.width, contour.region.height) < cfg.min_rect_size:
            roots.append(_solve_cluster(p, contour, cfg))
        else:
            stack.extend(_split(p, contour, cfg))

    roots = RootClusterer(radius=cfg.dedup_radius).deduplicate(roots)
    total = sum(root.multiplicity for root in roots)
    if total != top.count:
        raise ConvergenceError(f"Найдено {total} корней с учетом кратности, а индекс контура равен {top.count}")

    roots.sort(key=lambda root: (root.nu.real, root.nu.imag))
    return roots


def seeds_near_zero(zero: DZeroInfo, p: ProblemParams, enforce_threshold: bool = True) -> List[complex]:
    """Предсказанные корни lambda + eps, lambda - eps, eps^2 = 1/(z^2 c2)

    enforce_threshold=False отключает проверку |z| > 1/delta (порог эвристический).
    """
    if not zero.is_expanded:
        zero = local_expansion(zero, p.b)
    threshold = zero.coupling_threshold
    if p.z == 0 or (enforce_threshold and not abs(p.z) > threshold):
        raise TooSmallCouplingError(
            f"|z| = {abs(p.z):.6g} не превышает порог {threshold:.6g} для нуля lambda={zero.lam:.12g}"
        )
    eps = 1.0 / (p.z * cmath.sqrt(zero.c2))
    return [zero.lam + eps, zero.lam - eps]


def seed_error_bound(zero: DZeroInfo, p: ProblemParams, safety_factor: float = SEED_SAFETY_FACTOR) -> float:
    """3 B |eps|^2 с запасом safety_factor (оценка B не гарантирована)"""
    eps_sq = 1.0 / (abs(p.z) ** 2 * zero.c2)
    return float(safety_factor * 3.0 * zero.B * eps_sq)


def localize_near_zero(zero: DZeroInfo, p: ProblemParams, cfg: Optional[SolverConfig] = None,
                       enforce_threshold: bool = True) -> List[Eigenvalue]:
    """Пара корней G у нуля D_nu(b), найденная Ньютоном из локальных затравок"""
    cfg = cfg or SolverConfig()
    roots = []
    for seed in seeds_near_zero(zero, p, enforce_threshold):
        nu = newton_polish(p, seed, cfg)
        if nu is None:
            raise ConvergenceError(f"Ньютон из затравки {seed} не сошелся")
        roots.append(make_eigenvalue(p, nu, 1, RootOrigin.DZERO_SEED, cfg))
    if abs(roots[0].nu - roots[1].nu) <= cfg.dedup_radius:
        raise ConvergenceError(f"Обе затравки у lambda={zero.lam} сошлись к одному корню {roots[0].nu}")
    return roots


def count_nonreal(p: ProblemParams, cfg: Optional[SolverConfig] = None) -> int:
    """Число невещественных корней в окне cfg.nu_window при z = ir"""
    cfg = cfg or SolverConfig()
    if not p.is_imaginary:
        raise DomainError(f"Подсчет невещественных корней требует чисто мнимого z, получено {p.z}")
    roots = solve_rect(p, cfg.nu_window, cfg)
    return nonreal_count(roots, cfg.imag_tol)


def nonreal_count(roots: Sequence[Eigenvalue], imag_tol: float) -> int:
    count = sum(root.multiplicity for root in roots if abs(root.nu.imag) > imag_tol)
    if count % 2:
        logger.warning(f"Нечетное число невещественных корней ({count}): окно несимметрично относительно оси?")
    return count


def to_harmonic_oscillator(eigs: Sequence[Union[Eigenvalue, complex]], p: ProblemParams) -> HarmonicOscillatorSpectrum:
    """z_ho = z sqrt(2), b_ho = b/sqrt(2), lambda_ho = 2 nu + 1"""
    values = [e.nu if isinstance(e, Eigenvalue) else complex(e) for e in eigs]
    return HarmonicOscillatorSpectrum(
        z_ho=p.z * np.sqrt(2.0),
        b_ho=p.b / np.sqrt(2.0),
        eigenvalues=[2.0 * nu + 1.0 for nu in values],
    )


def from_harmonic_oscillator(ho: HarmonicOscillatorSpectrum) -> Tuple[ProblemParams, List[complex]]:
    """Обратный переход к форме Вебера"""
    params = ProblemParams(b=ho.b_ho * np.sqrt(2.0), z=ho.z_ho / np.sqrt(2.0))
    return params, [(lam - 1.0) / 2.0 for lam in ho.eigenvalues]
