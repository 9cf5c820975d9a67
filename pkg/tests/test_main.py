import json
import logging

import pytest

from weber_spectra.core.eigen_condition import ProblemParams
from weber_spectra.core.export_manager import read_csv
from weber_spectra.core.spectrum_solver import RectRegion, solve_rect
from weber_spectra.main import ComplexSafeFormatter, build_parser, main, parse_complex


@pytest.fixture(autouse=True)
def clean_logging(monkeypatch):
    monkeypatch.delenv('WEBER_SPECTRA_THREADS', raising=False)
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_weber_spectra', False):
            root.removeHandler(handler)
            handler.close()


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_parse_complex():
    assert parse_complex('1+2i') == 1 + 2j
    assert parse_complex('-0.5') == -0.5
    assert parse_complex(' 3j ') == 3j


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_formatter_compacts_complex():
    record = logging.LogRecord('x', logging.INFO, __file__, 1, 'nu=%s', (complex(2.0, 0.5),), None)
    assert ComplexSafeFormatter('%(message)s').format(record) == 'nu=(2+0.5j)'


def test_solver_log_line_passes_complex_args(caplog):
    with caplog.at_level(logging.INFO, logger='weber_spectra.core.spectrum_solver'):
        solve_rect(ProblemParams.imaginary(1.0, 0.5), RectRegion(-0.5, 1.5, -1.0, 1.0))
    record = next(r for r in caplog.records
                  if r.name == 'weber_spectra.core.spectrum_solver' and r.levelno == logging.INFO)
    assert any(isinstance(arg, complex) for arg in record.args)
    assert 'z=(0+0.5j)' in ComplexSafeFormatter('%(message)s').format(record)


@pytest.mark.parametrize("argv, expected, tol", [
    (['dnu', '--nu', '0', '--x', '1.2'], 0.6976763261, 1e-10),
    (['dnu', '--nu', '-1', '--x', '0'], 1.2533141373, 1e-10),
    (['dnu', '--nu', '2', '--b', '1'], 0.0, 1e-12),
])
def test_dnu(capsys, argv, expected, tol):
    assert main(argv) == 0
    data = _json(capsys)
    assert abs(data['data']['value'][0] - expected) <= tol
    assert data['manifest']['command'] == 'dnu'


def test_zeros(capsys):
    assert main(['zeros', '--b', '1', '--nu-max', '3']) == 0
    manifest, header, rows = read_csv(capsys.readouterr().out)
    assert manifest['params'] == {'b': 1.0, 'nu_max': 3.0}
    record = [dict(zip(header, row)) for row in rows]
    assert any(float(r['lambda']) == 2.0 and r['is_integer'] == 'true' for r in record)


def test_zeros_b2_expansions(capsys):
    assert main(['zeros', '--b', '2', '--nu-max', '25']) == 0
    _, header, rows = read_csv(capsys.readouterr().out)
    records = [dict(zip(header, row)) for row in rows]
    assert len(records) >= 5
    assert all(float(r['c2']) > 0 for r in records)


def test_spectrum_unperturbed(capsys):
    argv = ['spectrum', '--b', '1', '--re-min', '-0.5', '--re-max', '4.5', '--im-min', '-1', '--im-max', '1']
    assert main(argv) == 0
    manifest, header, rows = read_csv(capsys.readouterr().out)
    assert manifest['window_caveat'] is True
    assert manifest['config']['solver']['window']['re_max'] == 4.5
    assert [round(float(row[0])) for row in rows] == [0, 1, 2, 3, 4]


def test_trajectory_rerun_is_byte_identical(tmp_path):
    argv = ['trajectory', '--b', '1', '--r-min', '0.1', '--r-max', '0.3', '--r-step', '0.1',
            '--re-min', '-0.5', '--re-max', '3.5', '--im-min', '-1', '--im-max', '1']
    first, second = tmp_path / 'first.csv', tmp_path / 'second.csv'
    assert main(argv + ['--output', str(first)]) == 0
    assert main(argv + ['--output', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    _, header, rows = read_csv(first.read_text(encoding='utf-8'))
    assert header[0] == 'branch_id'
    assert len(rows) == 12


def test_count_is_even(capsys):
    assert main(['count', '--b', '2', '--r', '0.5', '--re-max', '12', '--im-min', '-2', '--im-max', '2']) == 0
    data = _json(capsys)['data']
    assert data['N_window'] % 2 == 0
    assert data['window']['re_max'] == 12.0


def test_output_file(tmp_path, capsys):
    path = tmp_path / 'd.json'
    assert main(['dnu', '--nu', '0', '--x', '1', '--output', str(path)]) == 0
    assert capsys.readouterr().out == ''
    assert json.loads(path.read_text(encoding='utf-8'))['data']['dx'][1] == 0.0


def test_config_file(tmp_path, capsys):
    path = tmp_path / 'settings.json'
    path.write_text(json.dumps({'series': {'x_max': 1.0}}))
    assert main(['dnu', '--nu', '0', '--x', '1.5', '--config', str(path)]) == 2


@pytest.mark.parametrize("argv, code", [
    (['spectrum', '--b', '-1'], 2),
    (['zeros', '--b', '1', '--nu-max', '100'], 2),
    (['trajectory', '--b', '1', '--r-min', '1', '--r-max', '2', '--r-step', '0'], 2),
    (['dnu', '--nu', '0', '--x', '1', '--config', '/nonexistent/settings.json'], 2),
    (['count', '--b', '1', '--r', '1', '--re-max', '70'], 2),
])
def test_exit_codes(argv, code):
    assert main(argv) == code


def test_validate_category(capsys):
    assert main(['validate', '--category', 'gamma']) == 0
    data = _json(capsys)['data']
    assert data['passed'] is True
    assert data['n_checks'] == 5


def test_validate_quick_skips_slow_checks(capsys):
    assert main(['validate', '--quick', '--category', 'figure']) == 0
    data = _json(capsys)
    assert data['data']['n_checks'] == 0
    assert data['manifest']['params']['quick'] is True


def test_oracle_agreement(capsys):
    assert main(['oracle', '--b', '1', '--r', '10', '--k', '8']) == 0
    data = _json(capsys)
    assert data['data']['max_deviation'] <= 5e-3
    assert data['manifest']['extra']['snap_offset'] <= 1e-9


def test_oracle_mismatch_exit_code(capsys):
    assert main(['oracle', '--b', '1', '--r', '10', '--k', '8', '--tolerance', '1e-12']) == 5
    assert _json(capsys)['data']['passed'] is False
