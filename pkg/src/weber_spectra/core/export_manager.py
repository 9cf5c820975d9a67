import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

from ..utils.helpers import format_float
from .dzero_finder import DZeroInfo
from .errors import DomainError
from .sweep_manager import Branch
from .spectrum_solver import Eigenvalue

logger = logging.getLogger(__name__)

MANIFEST_PREFIX = '# manifest: '


@dataclass
class RunManifest:
    """Описание запуска, встраиваемое в каждый выходной файл"""
    command: str
    params: Dict[str, Any]
    config: Dict[str, Any]
    tool_version: str
    window_caveat: bool = False
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'params': self.params,
            'config': self.config,
            'tool_version': self.tool_version,
            'window_caveat': self.window_caveat,
            'extra': self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if value is None:
        return ''
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def dzero_rows(zeros: Sequence[DZeroInfo]) -> List[List[Any]]:
    return [[z.lam, z.is_integer, z.d_deriv, z.c2, z.B, z.rho,
             z.coupling_threshold if z.is_expanded else None] for z in zeros]


def eigenvalue_rows(roots: Sequence[Eigenvalue]) -> List[List[Any]]:
    return [[e.nu.real, e.nu.imag, e.residual, e.multiplicity, e.origin.value] for e in roots]


def branch_rows(branches: Sequence[Branch]) -> List[List[Any]]:
    """Строки в порядке (branch_id, r)"""
    rows = []
    for branch in sorted(branches, key=lambda br: br.id):
        for point in sorted(branch.points, key=lambda pt: pt.r):
            rows.append([branch.id, point.r, point.nu.real, point.nu.imag, point.residual])
    return rows


DZERO_HEADER = ['lambda', 'is_integer', 'd_deriv', 'c2', 'B', 'rho', 'threshold']
EIGENVALUE_HEADER = ['re_nu', 'im_nu', 'residual', 'multiplicity', 'origin']
BRANCH_HEADER = ['branch_id', 'r', 're_nu', 'im_nu', 'residual']


class ExportManager:
    """Запись результатов в CSV и JSON в файл или в stdout"""

    def __init__(self, output_path: Optional[str] = None, stream: Optional[TextIO] = None):
        self.output_path = output_path
        self.stream = stream

    def _emit(self, text: str):
        if self.output_path:
            with open(self.output_path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            logger.info(f"Результат записан в {self.output_path}")
        else:
            target = self.stream or sys.stdout
            target.write(text)
            target.flush()

    def render_csv(self, manifest: RunManifest, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        buffer.write(MANIFEST_PREFIX + manifest.to_json() + '\n')
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
        return buffer.getvalue()

    def write_csv(self, manifest: RunManifest, header: Sequence[str], rows: Iterable[Sequence[Any]]):
        self._emit(self.render_csv(manifest, header, rows))

    def render_json(self, manifest: RunManifest, data: Any) -> str:
        return json.dumps({'manifest': manifest.to_dict(), 'data': data},
                          ensure_ascii=False, indent=2, sort_keys=True) + '\n'

    def write_json(self, manifest: RunManifest, data: Any):
        self._emit(self.render_json(manifest, data))


def read_csv(text: str):
    """Разбирает CSV с манифестом: (манифест, заголовок, строки)"""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MANIFEST_PREFIX):
        raise DomainError("CSV не содержит строки манифеста")
    manifest = json.loads(lines[0][len(MANIFEST_PREFIX):])
    reader = csv.reader(lines[1:])
    header = next(reader)
    return manifest, header, list(reader)
