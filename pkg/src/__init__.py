"""tempoc: temporal edge cover and temporal matching solver package.

Modules are imported flat (with src/ on sys.path), as tempoc.py and the
tests do.
"""

__version__ = "1.0.0"
__author__ = "tempoc developers"

__all__ = [
    'token_types',
    'lexer',
    'formats',
    'config',
    'temporal_graph',
    'static_alg',
    'treedec',
    'fpt_dp',
    'approx',
    'exact',
    'reductions',
]
