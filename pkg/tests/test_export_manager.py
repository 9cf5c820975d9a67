import io
import json

import pytest

from weber_spectra.core.dzero_finder import DZeroInfo
from weber_spectra.core.errors import DomainError
from weber_spectra.core.export_manager import (BRANCH_HEADER, DZERO_HEADER, EIGENVALUE_HEADER, ExportManager,
                                               RunManifest, branch_rows, dzero_rows, eigenvalue_rows, read_csv)
from weber_spectra.core.spectrum_solver import Eigenvalue, RootOrigin
from weber_spectra.core.sweep_manager import Branch


@pytest.fixture
def manifest():
    return RunManifest(command='spectrum', params={'b': 1.0, 'z_re': 0.0, 'z_im': 10.0},
                       config={'solver': {'imag_tol': 1e-7}}, tool_version='0.1.0', window_caveat=True)


def test_manifest_is_deterministic(manifest):
    assert manifest.to_json() == manifest.to_json()
    data = json.loads(manifest.to_json())
    assert data['command'] == 'spectrum'
    assert data['window_caveat'] is True
    assert 'time' not in json.dumps(data)


def test_csv_layout(manifest):
    roots = [Eigenvalue(nu=2.0, residual=0.0), Eigenvalue(nu=2.1 + 0.3j, residual=1e-13, origin=RootOrigin.DZERO_SEED)]
    text = ExportManager().render_csv(manifest, EIGENVALUE_HEADER, eigenvalue_rows(roots))
    lines = text.splitlines()
    assert lines[0].startswith('# manifest: ')
    assert lines[1] == 're_nu,im_nu,residual,multiplicity,origin'
    assert lines[2] == '2,0,0,1,grid_seed'
    assert lines[3].endswith(',1,dzero_seed')

    parsed_manifest, header, rows = read_csv(text)
    assert parsed_manifest['params']['z_im'] == 10.0
    assert header == EIGENVALUE_HEADER
    assert float(rows[1][0]) == 2.1
    assert float(rows[1][2]) == 1e-13


def test_dzero_rows():
    zeros = [
        DZeroInfo(lam=2.0, is_integer=True, d_deriv=-0.5, c2=4.0, B=1.0, rho=0.1),
        DZeroInfo(lam=3.7, is_integer=False, d_deriv=0.2),
    ]
    text = ExportManager().render_csv(RunManifest('zeros', {}, {}, '0.1.0'), DZERO_HEADER, dzero_rows(zeros))
    _, header, rows = read_csv(text)
    assert header == DZERO_HEADER
    assert rows[0][1] == 'true'
    assert float(rows[0][6]) == pytest.approx(15.0)
    assert rows[1][1] == 'false'
    assert rows[1][3:] == ['', '', '', '']


def test_branch_rows_sorted():
    late = Branch(id=1)
    late.append(0.6, Eigenvalue(nu=1.0, residual=0.0))
    late.append(0.5, Eigenvalue(nu=1.01, residual=0.0))
    early = Branch(id=0)
    early.append(0.5, Eigenvalue(nu=0.0, residual=0.0))
    rows = branch_rows([late, early])
    assert [(row[0], row[1]) for row in rows] == [(0, 0.5), (1, 0.5), (1, 0.6)]
    assert len(BRANCH_HEADER) == len(rows[0])


def test_json_to_stream(manifest):
    stream = io.StringIO()
    ExportManager(stream=stream).write_json(manifest, {'N_window': 2})
    data = json.loads(stream.getvalue())
    assert data['data'] == {'N_window': 2}
    assert data['manifest']['tool_version'] == '0.1.0'


def test_write_to_file(tmp_path, manifest):
    path = tmp_path / 'roots.csv'
    ExportManager(str(path)).write_csv(manifest, EIGENVALUE_HEADER, [])
    _, header, rows = read_csv(path.read_text(encoding='utf-8'))
    assert header == EIGENVALUE_HEADER
    assert rows == []


def test_read_csv_requires_manifest():
    with pytest.raises(DomainError):
        read_csv('re_nu,im_nu\n1,0\n')
