import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

from PyQt6.QtCore import QCoreApplication, QRunnable, QThreadPool

from .eigen_condition import ProblemParams
from .errors import DomainError
from .root_clusterer import RootClusterer
from .spectrum_solver import Eigenvalue, RectRegion, SolverConfig, nonreal_count, solve_rect

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int, str], None]
POLL_INTERVAL_MS = 200

_core_app: Optional[QCoreApplication] = None


class BranchStatus(str, Enum):
    ALIVE = "alive"
    MERGED = "merged"
    EXITED_WINDOW = "exited_window"


class DropCause(str, Enum):
    WINDOW_EXIT = "window_exit"
    ANNIHILATION = "annihilation"


class CountDrop(NamedTuple):
    """Уменьшение N между соседними r"""
    r_from: float
    r_to: float
    lost: int
    cause: DropCause


class BranchPoint(NamedTuple):
    r: float
    nu: complex
    residual: float


@dataclass
class Branch:
    """Траектория одного собственного значения при росте r"""
    id: int
    points: List[BranchPoint] = field(default_factory=list)
    status: BranchStatus = BranchStatus.ALIVE

    @property
    def last(self) -> BranchPoint:
        return self.points[-1]

    def append(self, r: float, root: Eigenvalue):
        self.points.append(BranchPoint(float(r), root.nu, root.residual))


class SliceTask(QRunnable):
    """Решение на одном срезе r в пуле потоков"""

    def __init__(self, index: int, params: ProblemParams, cfg: SolverConfig):
        super().__init__()
        self.setAutoDelete(False)
        self.index = index
        self.params = params
        self.cfg = cfg
        self.result: Optional[List[Eigenvalue]] = None
        self.error: Optional[Exception] = None

    def run(self):
        try:
            self.result = solve_rect(self.params, self.cfg.nu_window, self.cfg)
        except Exception as e:
            logger.error("Ошибка на срезе %d (z=%s): %s", self.index, self.params.z, e)
            self.error = e

    @property
    def done(self) -> bool:
        return self.result is not None or self.error is not None


def _ensure_core_app():
    global _core_app
    if QCoreApplication.instance() is None:
        _core_app = QCoreApplication([])


class SweepManager:
    """Менеджер серий расчетов по r"""

    def __init__(self, cfg: Optional[SolverConfig] = None, max_threads: int = 1,
                 progress_callback: Optional[ProgressCallback] = None):
        self.cfg = cfg or SolverConfig()
        self.max_threads = max(1, int(max_threads))
        self.progress_callback = progress_callback
        self.tasks: List[SliceTask] = []
        self.thread_pool: Optional[QThreadPool] = None

    def _report(self, done: int, total: int, message: str):
        if self.progress_callback:
            self.progress_callback(done, total, message)

    def solve_slices(self, params_list: Sequence[ProblemParams]) -> List[List[Eigenvalue]]:
        """Корни в окне для каждого среза; порядок результатов совпадает с порядком срезов"""
        self.tasks = [SliceTask(i, params, self.cfg) for i, params in enumerate(params_list)]
        total = len(self.tasks)
        logger.info(f"Запуск серии из {total} срезов, потоков: {self.max_threads}")

        if self.max_threads == 1 or total <= 1:
            for task in self.tasks:
                task.run()
                if task.error is not None:
                    raise task.error
                self._report(task.index + 1, total, f"z={task.params.z}")
        else:
            _ensure_core_app()
            self.thread_pool = QThreadPool()
            self.thread_pool.setMaxThreadCount(self.max_threads)
            for task in self.tasks:
                self.thread_pool.start(task)
            while not self.thread_pool.waitForDone(POLL_INTERVAL_MS):
                self._report(sum(task.done for task in self.tasks), total, "выполняется")
            self._report(total, total, "готово")
            failed = [task for task in self.tasks if task.error is not None]
            if failed:
                raise failed[0].error

        logger.info(f"Серия из {total} срезов завершена")
        return [task.result for task in self.tasks]

    def trajectory(self, b: float, r_grid: Sequence[float]) -> List[Branch]:
        """Ветви собственных значений при z = ir вдоль r_grid"""
        r_grid = [float(r) for r in r_grid]
        if any(later <= earlier for earlier, later in zip(r_grid, r_grid[1:])):
            raise DomainError(f"Сетка r должна строго возрастать, получено {r_grid}")
        slices = self.solve_slices([ProblemParams.imaginary(b, r) for r in r_grid])
        clusterer = RootClusterer(radius=self.cfg.dedup_radius)
        window = self.cfg.nu_window

        branches: List[Branch] = []
        alive: List[Branch] = []
        for r, roots in zip(r_grid, slices):
            mapping = clusterer.match_slice([branch.last.nu for branch in alive],
                                            [root.nu for root in roots], self.cfg.match_radius)
            still_alive = []
            for i, branch in enumerate(alive):
                if i in mapping:
                    branch.append(r, roots[mapping[i]])
                    still_alive.append(branch)
                elif window.boundary_distance(branch.last.nu) <= self.cfg.match_radius:
                    branch.status = BranchStatus.EXITED_WINDOW
                else:
                    branch.status = BranchStatus.MERGED
                    logger.info("Ветвь %d слилась с соседней около %s при r=%g", branch.id, branch.last.nu, r)

            matched = set(mapping.values())
            for j, root in enumerate(roots):
                if j in matched:
                    continue
                branch = Branch(id=len(branches))
                branch.append(r, root)
                branches.append(branch)
                still_alive.append(branch)
            alive = still_alive

        logger.info(f"Траектория b={b:g}: {len(branches)} ветвей, активных в конце {len(alive)}")
        return branches

    def count_sweep(self, b: float, r_values: Sequence[float]) -> List[Tuple[float, int]]:
        """N(r): число невещественных корней в окне для каждого r"""
        r_values = [float(r) for r in r_values]
        slices = self.solve_slices([ProblemParams.imaginary(b, r) for r in r_values])
        return [(r, nonreal_count(roots, self.cfg.imag_tol)) for r, roots in zip(r_values, slices)]

    def count_report(self, b: float, r_values: Sequence[float],
                     edge: float = 1.0) -> Tuple[List[Tuple[float, int]], List[CountDrop]]:
        """N(r) и причины каждого его уменьшения"""
        r_values = [float(r) for r in r_values]
        slices = self.solve_slices([ProblemParams.imaginary(b, r) for r in r_values])
        counts = [(r, nonreal_count(roots, self.cfg.imag_tol)) for r, roots in zip(r_values, slices)]
        return counts, classify_drops(r_values, slices, self.cfg.nu_window, self.cfg.imag_tol, edge)


def classify_drops(r_values: Sequence[float], slices: Sequence[Sequence[Eigenvalue]], window: RectRegion,
                   imag_tol: float, edge: float = 1.0) -> List[CountDrop]:
    """Уменьшение N считается уходом из окна, если на предыдущем срезе у границы
    окна (ближе edge) было не меньше потерянных невещественных корней; иначе пара
    вернулась на вещественную ось.
    """
    drops = []
    counts = [nonreal_count(roots, imag_tol) for roots in slices]
    for k in range(1, len(counts)):
        lost = counts[k - 1] - counts[k]
        if lost <= 0:
            continue
        near_edge = sum(root.multiplicity for root in slices[k - 1]
                        if abs(root.nu.imag) > imag_tol and window.boundary_distance(root.nu) <= edge)
        cause = DropCause.WINDOW_EXIT if near_edge >= lost else DropCause.ANNIHILATION
        drops.append(CountDrop(float(r_values[k - 1]), float(r_values[k]), lost, cause))
        logger.info(f"N уменьшилось на {lost} между r={r_values[k - 1]:g} и r={r_values[k]:g}: {cause.value}")
    return drops


def trajectory(b: float, r_grid: Sequence[float], cfg: Optional[SolverConfig] = None,
               max_threads: int = 1, progress_callback: Optional[ProgressCallback] = None) -> List[Branch]:
    return SweepManager(cfg, max_threads, progress_callback).trajectory(b, r_grid)


def count_sweep(b: float, r_values: Sequence[float], cfg: Optional[SolverConfig] = None,
                max_threads: int = 1, progress_callback: Optional[ProgressCallback] = None) -> List[Tuple[float, int]]:
    return SweepManager(cfg, max_threads, progress_callback).count_sweep(b, r_values)
