# flake8: noqa

from .config import (BASELINE, BLACKBOARD_KEY, BOOLEAN, COMPOSITE, DECORATOR, EVOLVE,
                     INTEGER, REAL, SELECTOR, SEQUENCE, TASK)

__all__ = [
    'COMPOSITE',
    'TASK',
    'DECORATOR',
    'SELECTOR',
    'SEQUENCE',
    'INTEGER',
    'REAL',
    'BOOLEAN',
    'BLACKBOARD_KEY',
    'EVOLVE',
    'BASELINE',
]

__version__ = "0.1.0dev"
