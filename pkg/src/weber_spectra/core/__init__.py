from .errors import WeberSpectraError

__all__ = ['WeberSpectraError']
