import pytest

from weber_spectra.core.errors import DomainError, ValidationError
from weber_spectra.core.validation_suite import Check, ValidationSuite


@pytest.fixture(scope='module')
def suite():
    return ValidationSuite()


def test_slow_checks_run_unless_quick(suite):
    labels = {check.label for check in suite.checks if check.slow}
    assert labels == {'counting_growth', 'figure_trajectories'}
    assert suite.include_slow
    quick = ValidationSuite(include_slow=False).run(['figure'])
    assert quick.passed
    assert quick.results == []
    assert suite.run(['no-such-category']).results == []


@pytest.mark.parametrize("category", ['gamma', 'weber', 'condition', 'dzero'])
def test_fast_categories_pass(suite, category):
    report = suite.run([category])
    assert report.results
    assert report.passed, [result.to_dict() for result in report.failures]


def test_failing_check_is_reported():
    suite = ValidationSuite()

    def broken():
        raise DomainError("сломано")

    suite.checks = [Check('ok', 'demo', lambda: (True, 'fine')), Check('broken', 'demo', broken)]
    report = suite.run()
    assert not report.passed
    assert [result.label for result in report.failures] == ['broken']
    assert report.to_dict()['n_failed'] == 1
    assert 'DomainError' in report.failures[0].message
    with pytest.raises(ValidationError):
        report.raise_if_failed()


@pytest.mark.slow
@pytest.mark.parametrize("category", ['solver', 'oracle', 'figure'])
def test_solver_categories_pass(suite, category):
    report = suite.run([category])
    assert report.passed, [result.to_dict() for result in report.failures]
