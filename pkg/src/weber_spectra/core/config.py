import copy
import json
import logging
import os
from typing import Any, Dict, Mapping, Optional

from .errors import DomainError
from .fd_oracle import GridSpec
from .spectrum_solver import RectRegion, SolverConfig
from .weber_fns import SeriesLimits

logger = logging.getLogger(__name__)

THREADS_ENV = 'WEBER_SPECTRA_THREADS'


class Config:
    """Класс для управления настройками расчетов

    Настройки хранятся во вложенном словаре с доступом по ключам вида
    'solver.newton_tol'; файл настроек (JSON) перекрывает значения по умолчанию.
    """

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = config_path
        self.settings = self.load_settings()
        if config_path:
            self.load_file(config_path)

    def load_settings(self) -> Dict[str, Any]:
        """Настройки по умолчанию"""
        return {
            'series': {
                'x_max': 30.0,
                'nu_max': 60.0,
                'eps': 1e-17,
                'max_terms': 2000,
            },
            'quadrature': {
                'epsabs': 1e-12,
                'epsrel': 1e-12,
                'limit': 200,
            },
            'solver': {
                'newton_tol': 1e-12,
                'max_newton': 60,
                'winding_samples_per_unit': 256,
                'match_radius': 0.25,
                'imag_tol': 1e-7,
                'dedup_radius': 1e-8,
                'min_rect_size': 1e-6,
                'window': {'re_min': -1.0, 're_max': 25.0, 'im_min': -6.0, 'im_max': 6.0},
            },
            'dzero': {
                'scan_step': 0.05,
                'integer_threshold': 1e-10,
                'degenerate_threshold': 1e-8,
                'cauchy_samples': 64,
                'safety_factor': 4.0,
            },
            'oracle': {
                'L_min': 12.0,
                'margin': 5.0,
                'n': 2400,
                'k': 10,
                'tolerance': 5e-3,
                'aligned': True,
            },
            'performance': {
                'max_threads': 4,
            },
            'output': {
                'log_file': None,
                'log_level': 'INFO',
            },
        }

    def load_file(self, path: str):
        """Объединяет настройки из JSON-файла с текущими"""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise DomainError(f"Не удалось прочитать файл настроек {path}: {e}") from e
        if not isinstance(data, dict):
            raise DomainError(f"Файл настроек {path} должен содержать JSON-объект")
        self.update(data)
        logger.info(f"Загружены настройки из {path}")

    def save_file(self, path: str):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.settings, f, ensure_ascii=False, indent=2)
        logger.info(f"Настройки сохранены в {path}")

    def update(self, data: Mapping[str, Any]):
        """Рекурсивное слияние словаря с настройками"""
        def merge(target: Dict[str, Any], source: Mapping[str, Any]):
            for key, value in source.items():
                if isinstance(value, Mapping) and isinstance(target.get(key), dict):
                    merge(target[key], value)
                else:
                    target[key] = copy.deepcopy(value)
        merge(self.settings, data)

    def get(self, key: str, default=None) -> Any:
        """Получает значение настройки по ключу"""
        value = self.settings
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any):
        """Устанавливает значение настройки"""
        old_value = self.get(key)

        keys = key.split('.')
        settings = self.settings
        for k in keys[:-1]:
            if k not in settings or not isinstance(settings[k], dict):
                settings[k] = {}
            settings = settings[k]
        settings[keys[-1]] = value

        logger.info("Изменена настройка '%s': %s -> %s", key, old_value, value)

    def override(self, key: str, value: Any):
        """set для необязательных флагов командной строки: None не меняет настройку"""
        if value is not None:
            self.set(key, value)

    def series_limits(self) -> SeriesLimits:
        return SeriesLimits(
            x_max=float(self.get('series.x_max')),
            nu_max=float(self.get('series.nu_max')),
            eps=float(self.get('series.eps')),
            max_terms=int(self.get('series.max_terms')),
        )

    def window(self) -> RectRegion:
        return RectRegion.from_dict(self.get('solver.window'))

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            newton_tol=float(self.get('solver.newton_tol')),
            max_newton=int(self.get('solver.max_newton')),
            winding_samples_per_unit=int(self.get('solver.winding_samples_per_unit')),
            match_radius=float(self.get('solver.match_radius')),
            imag_tol=float(self.get('solver.imag_tol')),
            nu_window=self.window(),
            dedup_radius=float(self.get('solver.dedup_radius')),
            min_rect_size=float(self.get('solver.min_rect_size')),
            limits=self.series_limits(),
        )

    def dzero_options(self) -> Dict[str, float]:
        """Параметры find_d_zeros из раздела dzero"""
        return {
            'step': float(self.get('dzero.scan_step')),
            'integer_threshold': float(self.get('dzero.integer_threshold')),
            'degenerate_threshold': float(self.get('dzero.degenerate_threshold')),
        }

    def quadrature_options(self) -> Dict[str, float]:
        return {
            'epsabs': float(self.get('quadrature.epsabs')),
            'epsrel': float(self.get('quadrature.epsrel')),
            'limit': int(self.get('quadrature.limit')),
        }

    def grid_for(self, b: float) -> GridSpec:
        L_min = max(float(self.get('oracle.L_min')), b + float(self.get('oracle.margin')))
        return GridSpec.for_problem(b, n=int(self.get('oracle.n')), L_min=L_min,
                                    aligned=bool(self.get('oracle.aligned')))

    def max_threads(self) -> int:
        """Лимит потоков: настройка, ограниченная сверху переменной WEBER_SPECTRA_THREADS"""
        threads = max(1, int(self.get('performance.max_threads', 1)))
        value = os.environ.get(THREADS_ENV)
        if value:
            try:
                return min(threads, max(1, int(value)))
            except ValueError:
                logger.warning(f"Некорректное значение {THREADS_ENV}={value!r}, используется настройка")
        return threads
