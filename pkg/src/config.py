"""Defaults and environment overrides for tempoc."""

import logging
import os
import sys

# Largest edge count the exhaustive oracles enumerate without a time limit.
DEFAULT_MAX_EDGES = 22

# Largest vertex count exact treewidth accepts.
EXACT_TREEWIDTH_LIMIT = 12

BUDGET_ENV = 'TEMPOC_BUDGET_EDGES'

LOG_FORMAT = '[%(levelname)s] %(name)s: %(message)s'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def max_edges_from_env() -> int:
    """Exhaustive edge cap, overridden by TEMPOC_BUDGET_EDGES."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == '':
        return DEFAULT_MAX_EDGES
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV} must be an integer, got '{raw}'") from None
    if value < 0:
        raise ValueError(f"{BUDGET_ENV} must be non-negative, got {value}")
    return value


def setup_logging(level: str = 'WARNING'):
    """Send log records to stderr; stdout is reserved for reports."""
    logging.basicConfig(level=getattr(logging, level.upper()), format=LOG_FORMAT,
                        stream=sys.stderr, force=True)
