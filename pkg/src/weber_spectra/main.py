import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .core.config import Config
from .core.dzero_finder import expand_all, find_d_zeros
from .core.eigen_condition import ProblemParams
from .core.errors import WeberSpectraError
from .core.export_manager import (BRANCH_HEADER, DZERO_HEADER, EIGENVALUE_HEADER, ExportManager, RunManifest,
                                  branch_rows, dzero_rows, eigenvalue_rows)
from .core.fd_oracle import compare_spectra, oracle_spectrum, snap_offset
from .core.spectrum_solver import RectRegion, nonreal_count, solve_rect
from .core.sweep_manager import SweepManager
from .core.validation_suite import ValidationSuite
from .core.weber_fns import pcf_d
from .utils.helpers import complex_pair, r_grid

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ComplexSafeFormatter(logging.Formatter):
    """Форматер, печатающий комплексные числа и скаляры numpy компактно"""

    @staticmethod
    def _compact(arg):
        if isinstance(arg, (complex, np.complexfloating)):
            return f"({arg.real:.12g}{arg.imag:+.12g}j)"
        if isinstance(arg, np.generic):
            return arg.item()
        return arg

    def format(self, record):
        original_args = record.args
        try:
            if isinstance(original_args, tuple) and original_args:
                record.args = tuple(self._compact(arg) for arg in original_args)
        except Exception:
            record.args = original_args
        formatted = super().format(record)
        record.args = original_args
        return formatted


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None):
    """Настройка логирования: stderr и, при наличии, файл"""
    formatter = ComplexSafeFormatter(LOG_FORMAT)

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, '_weber_spectra', False):
            root_logger.removeHandler(handler)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    for handler in handlers:
        handler.setFormatter(formatter)
        handler._weber_spectra = True
        root_logger.addHandler(handler)
    root_logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(' ', '').replace('i', 'j'))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Некорректное комплексное число: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON-файл настроек')
    common.add_argument('--output', help='файл результата (по умолчанию stdout)')
    common.add_argument('--log-level', help='уровень логирования')
    common.add_argument('--log-file', help='файл журнала')
    common.add_argument('--threads', type=int, help='число потоков (WEBER_SPECTRA_THREADS важнее)')

    parser = argparse.ArgumentParser(
        prog='weber-spectra',
        description='Собственные значения осциллятора с парой точечных взаимодействий z(delta_{x-b} - delta_{x+b})',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    dnu = sub.add_parser('dnu', parents=[common], help='D_nu(x) и производная по x')
    dnu.add_argument('--nu', type=parse_complex, required=True)
    dnu.add_argument('--x', type=float)
    dnu.add_argument('--b', type=float, help='точка взаимодействия; используется как x, если --x не задан')

    zeros = sub.add_parser('zeros', parents=[common], help='нули nu -> D_nu(b) и их локальные разложения')
    zeros.add_argument('--b', type=float, required=True)
    zeros.add_argument('--nu-max', type=float, required=True)

    spectrum = sub.add_parser('spectrum', parents=[common], help='все собственные значения в окне')
    spectrum.add_argument('--b', type=float, required=True)
    spectrum.add_argument('--z-re', type=float, default=0.0)
    spectrum.add_argument('--z-im', type=float, default=0.0)
    _add_window_arguments(spectrum)

    trajectory = sub.add_parser('trajectory', parents=[common], help='ветви собственных значений при z = ir')
    trajectory.add_argument('--b', type=float, required=True)
    trajectory.add_argument('--r-min', type=float, required=True)
    trajectory.add_argument('--r-max', type=float, required=True)
    trajectory.add_argument('--r-step', type=float, required=True)
    _add_window_arguments(trajectory)

    count = sub.add_parser('count', parents=[common], help='число невещественных собственных значений в окне')
    count.add_argument('--b', type=float, required=True)
    count.add_argument('--r', type=float, required=True)
    _add_window_arguments(count)

    oracle = sub.add_parser('oracle', parents=[common], help='сверка с конечно-разностной матрицей')
    oracle.add_argument('--b', type=float, required=True)
    oracle.add_argument('--r', type=float, required=True)
    oracle.add_argument('--z-real', action='store_true', help='z = r вместо z = ir')
    oracle.add_argument('--L', type=float)
    oracle.add_argument('--n', type=int)
    oracle.add_argument('--k', type=int)
    oracle.add_argument('--tolerance', type=float)

    validate = sub.add_parser('validate', parents=[common], help='полный набор проверок')
    validate.add_argument('--quick', action='store_true', help='пропустить долгие проверки (серии по r, траектории)')
    validate.add_argument('--category', action='append', help='ограничить проверки категорией')
    return parser


def _add_window_arguments(parser: argparse.ArgumentParser):
    for name in ('re-min', 're-max', 'im-min', 'im-max'):
        parser.add_argument(f'--{name}', type=float)


def load_config(args: argparse.Namespace) -> Config:
    """Настройки по умолчанию, затем файл --config, затем флаги"""
    config = Config(args.config)
    config.override('output.log_level', args.log_level)
    config.override('output.log_file', args.log_file)
    config.override('performance.max_threads', args.threads)
    for key in ('re_min', 're_max', 'im_min', 'im_max'):
        config.override(f'solver.window.{key}', getattr(args, key, None))
    if args.command == 'oracle':
        config.override('oracle.L_min', args.L)
        config.override('oracle.n', args.n)
        config.override('oracle.k', args.k)
        config.override('oracle.tolerance', args.tolerance)
    return config


def _manifest(command: str, params: dict, config: Config, caveat: bool = False, **extra) -> RunManifest:
    settings = {key: value for key, value in config.settings.items() if key != 'output'}
    return RunManifest(command=command, params=params, config=settings, tool_version=__version__,
                       window_caveat=caveat, extra=extra)


def cmd_dnu(args, config: Config, export: ExportManager):
    x = args.x if args.x is not None else args.b
    if x is None:
        raise argparse.ArgumentTypeError("Нужно задать --x или --b")
    pair = pcf_d(args.nu, x, config.series_limits())
    params = {'nu': complex_pair(args.nu), 'x': x}
    export.write_json(_manifest('dnu', params, config),
                      {'value': complex_pair(pair.value), 'dx': complex_pair(pair.dx)})


def cmd_zeros(args, config: Config, export: ExportManager):
    limits = config.series_limits()
    zeros = find_d_zeros(args.b, args.nu_max, limits=limits, **config.dzero_options())
    zeros = expand_all(zeros, args.b, limits, int(config.get('dzero.cauchy_samples')))
    export.write_csv(_manifest('zeros', {'b': args.b, 'nu_max': args.nu_max}, config),
                     DZERO_HEADER, dzero_rows(zeros))


def cmd_spectrum(args, config: Config, export: ExportManager):
    p = ProblemParams(b=args.b, z=complex(args.z_re, args.z_im))
    cfg = config.solver_config()
    roots = solve_rect(p, cfg.nu_window, cfg)
    export.write_csv(_manifest('spectrum', p.to_dict(), config, caveat=True),
                     EIGENVALUE_HEADER, eigenvalue_rows(roots))


def cmd_trajectory(args, config: Config, export: ExportManager):
    grid = r_grid(args.r_min, args.r_max, args.r_step)
    threads = config.max_threads()
    manager = SweepManager(config.solver_config(), threads, _progress)
    branches = manager.trajectory(args.b, grid)
    params = {'b': args.b, 'r_min': args.r_min, 'r_max': args.r_max, 'r_step': args.r_step}
    statuses = {str(branch.id): branch.status.value for branch in branches}
    export.write_csv(_manifest('trajectory', params, config, caveat=True, threads=threads,
                                branch_status=statuses),
                     BRANCH_HEADER, branch_rows(branches))


def cmd_count(args, config: Config, export: ExportManager):
    p = ProblemParams.imaginary(args.b, args.r)
    cfg = config.solver_config()
    roots = solve_rect(p, cfg.nu_window, cfg)
    data = {
        'r': args.r,
        'N_window': nonreal_count(roots, cfg.imag_tol),
        'window': cfg.nu_window.to_dict(),
        'caveat': 'учтены только корни внутри окна',
    }
    export.write_json(_manifest('count', {'b': args.b, 'r': args.r}, config, caveat=True), data)


def cmd_oracle(args, config: Config, export: ExportManager):
    z = complex(args.r, 0.0) if args.z_real else complex(0.0, args.r)
    p = ProblemParams(b=args.b, z=z)
    k = int(config.get('oracle.k'))
    re_max = k - 2.0
    cfg = config.solver_config()
    window = cfg.nu_window
    window = RectRegion(window.re_min, min(window.re_max, re_max + 2.0), window.im_min, window.im_max)

    roots = [root.nu for root in solve_rect(p, window, cfg)]
    grid = config.grid_for(args.b)
    oracle = oracle_spectrum(p, grid, k)
    comparison = compare_spectra(roots, oracle, re_max, float(config.get('oracle.tolerance')))

    manifest = _manifest('oracle', p.to_dict(), config, caveat=True,
                         grid=grid.to_dict(), snap_offset=snap_offset(p, grid))
    export.write_json(manifest, comparison.to_dict())
    comparison.raise_if_failed()


def cmd_validate(args, config: Config, export: ExportManager):
    suite = ValidationSuite(config, include_slow=not args.quick)
    report = suite.run(args.category)
    export.write_json(_manifest('validate', {'quick': args.quick, 'category': args.category}, config),
                      report.to_dict())
    report.raise_if_failed()


def _progress(done: int, total: int, message: str):
    logger.info(f"Срезов готово: {done}/{total} ({message})")


COMMANDS = {
    'dnu': cmd_dnu,
    'zeros': cmd_zeros,
    'spectrum': cmd_spectrum,
    'trajectory': cmd_trajectory,
    'count': cmd_count,
    'oracle': cmd_oracle,
    'validate': cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(args)
        setup_logging(config.get('output.log_level'), config.get('output.log_file'))
        COMMANDS[args.command](args, config, ExportManager(args.output))
    except WeberSpectraError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except argparse.ArgumentTypeError as e:
        parser.error(str(e))
    return 0


if __name__ == '__main__':
    sys.exit(main())
