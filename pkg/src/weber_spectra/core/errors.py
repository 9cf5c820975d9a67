"""Иерархия исключений пакета.

Каждое исключение знает код завершения CLI, поэтому ``main`` не держит
отдельной таблицы соответствий.
"""


class WeberSpectraError(Exception):
    """Базовое исключение всех ошибок пакета"""
    exit_code = 1


class NonFiniteError(WeberSpectraError, ArithmeticError):
    """Вычисление дало NaN или бесконечность"""
    exit_code = 2


class PoleError(WeberSpectraError, ValueError):
    """Аргумент лежит в окрестности полюса"""
    exit_code = 2


class RangeError(WeberSpectraError, ValueError):
    """Аргументы вне проверенной области рядов"""
    exit_code = 2


class DomainError(WeberSpectraError, ValueError):
    """Аргумент вне области определения операции"""
    exit_code = 2


class QuadratureError(WeberSpectraError):
    """Адаптивная квадратура не достигла требуемой точности"""
    exit_code = 2


class DegenerateZeroError(WeberSpectraError):
    """Ноль D_nu(b) по параметру оказался кратным"""
    exit_code = 3


class FitError(WeberSpectraError):
    """Локальное разложение M не имеет ожидаемого второго порядка"""
    exit_code = 3


class TooSmallCouplingError(WeberSpectraError):
    """|z| ниже порога применимости локальных затравок"""
    exit_code = 3


class ContourError(WeberSpectraError):
    """Не удалось надежно вычислить индекс контура"""
    exit_code = 4


class ConvergenceError(WeberSpectraError):
    """Метод Ньютона не сошелся ни из одной стартовой точки"""
    exit_code = 4


class MatchAmbiguityError(WeberSpectraError):
    """Неразрешимая ничья при сопоставлении ветвей"""
    exit_code = 4


class GridError(WeberSpectraError, ValueError):
    """Сетка конечных разностей не разрешает точку взаимодействия"""
    exit_code = 5


class EigensolveError(WeberSpectraError):
    """Сбой численного решения матричной задачи на собственные значения"""
    exit_code = 5


class OracleMismatchError(WeberSpectraError):
    """Спектр решателя и матричного оракула расходятся"""
    exit_code = 5


class ValidationError(WeberSpectraError):
    """Проверка инвариантов завершилась неудачей"""
    exit_code = 6
