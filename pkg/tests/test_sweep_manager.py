import pytest

from weber_spectra.core.eigen_condition import ProblemParams
from weber_spectra.core.errors import DomainError
from weber_spectra.core.spectrum_solver import Eigenvalue, RectRegion, SolverConfig
from weber_spectra.core.sweep_manager import (BranchStatus, DropCause, SliceTask, SweepManager, classify_drops,
                                              count_sweep, trajectory)
from weber_spectra.utils.helpers import r_grid

SMALL_WINDOW = RectRegion(-0.5, 3.5, -1.0, 1.0)


def _roots(*values):
    return [Eigenvalue(nu=complex(v), residual=0.0) for v in values]


def _manager_with_slices(slices, window=RectRegion(-1.0, 10.0, -2.0, 2.0)):
    manager = SweepManager(SolverConfig(nu_window=window, match_radius=0.25))
    manager.solve_slices = lambda params_list: slices
    return manager


def test_branches_follow_nearest_roots():
    slices = [_roots(1.0, 2.0), _roots(1.05, 2.02), _roots(1.1, 2.05)]
    branches = _manager_with_slices(slices).trajectory(1.0, [0.5, 0.6, 0.7])
    assert len(branches) == 2
    assert [p.nu for p in branches[0].points] == [1.0, 1.05, 1.1]
    assert [p.r for p in branches[1].points] == [0.5, 0.6, 0.7]
    assert all(branch.status is BranchStatus.ALIVE for branch in branches)


def test_unmatched_branches_merge_or_exit():
    slices = [_roots(2.0, 2.1, 9.9), _roots(2.05), _roots(2.05, 5.0)]
    branches = _manager_with_slices(slices).trajectory(1.0, [1.0, 2.0, 3.0])
    statuses = {branch.id: branch.status for branch in branches}
    assert statuses[0] is BranchStatus.MERGED or statuses[1] is BranchStatus.MERGED
    assert statuses[2] is BranchStatus.EXITED_WINDOW
    assert branches[3].points[0].r == 3.0
    assert branches[3].status is BranchStatus.ALIVE


def test_trajectory_real_solve_small_window():
    cfg = SolverConfig(nu_window=SMALL_WINDOW)
    branches = trajectory(1.0, [0.1, 0.2], cfg)
    assert len(branches) == 4
    for n, branch in enumerate(sorted(branches, key=lambda br: br.points[0].nu.real)):
        assert len(branch.points) == 2
        assert abs(branch.points[0].nu - n) < 0.25


def test_progress_callback():
    calls = []
    cfg = SolverConfig(nu_window=SMALL_WINDOW)
    count_sweep(1.0, [0.5, 0.7], cfg, progress_callback=lambda done, total, msg: calls.append((done, total)))
    assert calls[-1] == (2, 2)


def test_thread_pool_matches_inline():
    cfg = SolverConfig(nu_window=SMALL_WINDOW)
    params = [ProblemParams.imaginary(1.0, r) for r in (0.5, 1.0, 1.5)]
    inline = SweepManager(cfg, max_threads=1).solve_slices(params)
    pooled = SweepManager(cfg, max_threads=2).solve_slices(params)
    assert [[root.nu for root in roots] for roots in inline] == [[root.nu for root in roots] for roots in pooled]


def test_slice_task_records_error():
    cfg = SolverConfig(nu_window=RectRegion(50.0, 61.0, -1.0, 1.0))
    task = SliceTask(0, ProblemParams.imaginary(1.0, 1.0), cfg)
    task.run()
    assert task.done
    assert task.result is None
    assert task.error is not None


def test_trajectory_requires_increasing_grid():
    manager = _manager_with_slices([_roots(1.0), _roots(1.0)])
    with pytest.raises(DomainError):
        manager.trajectory(1.0, [0.5, 0.5])
    with pytest.raises(DomainError):
        manager.trajectory(1.0, [0.7, 0.6])


DROP_SLICES = [
    _roots(1.5 + 0.5j, 1.5 - 0.5j, 9.5 + 0.3j, 9.5 - 0.3j),
    _roots(1.5 + 0.5j, 1.5 - 0.5j),
    _roots(1.4, 1.6),
]


def test_drops_are_classified():
    drops = classify_drops([1.0, 2.0, 3.0], DROP_SLICES, RectRegion(-1.0, 10.0, -2.0, 2.0), 1e-7)
    assert [(d.r_from, d.r_to, d.lost) for d in drops] == [(1.0, 2.0, 2), (2.0, 3.0, 2)]
    assert drops[0].cause is DropCause.WINDOW_EXIT
    assert drops[1].cause is DropCause.ANNIHILATION


def test_count_report_without_drops():
    manager = _manager_with_slices(list(reversed(DROP_SLICES)))
    counts, drops = manager.count_report(2.0, [1.0, 2.0, 3.0])
    assert counts == [(1.0, 0), (2.0, 2), (3.0, 4)]
    assert drops == []


@pytest.mark.slow
def test_pair_forms_near_persistent_integer():
    cfg = SolverConfig(nu_window=RectRegion(-0.5, 4.5, -3.0, 3.0))
    branches = trajectory(1.0, r_grid(0.5, 10.0, 0.1), cfg, max_threads=2)
    at_ten = [branch.last.nu for branch in branches
              if branch.last.r == 10.0 and abs(branch.last.nu.real - 2.0) < 0.5]
    assert sum(1 for nu in at_ten if abs(nu.imag) > 1e-3) == 2


@pytest.mark.slow
def test_counts_even_across_sweep():
    cfg = SolverConfig(nu_window=RectRegion(-1.0, 12.0, -6.0, 6.0))
    counts = count_sweep(2.0, [1.0, 5.0, 10.0, 20.0], cfg)
    assert [r for r, _ in counts] == [1.0, 5.0, 10.0, 20.0]
    assert all(n % 2 == 0 for _, n in counts)
    assert counts[-1][1] >= counts[0][1]
