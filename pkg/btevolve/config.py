import os

from django.conf import settings

# Node kinds
COMPOSITE = 'composite'
TASK = 'task'
DECORATOR = 'decorator'
NODE_KINDS = (COMPOSITE, TASK, DECORATOR)

# Composite types
SELECTOR = 'selector'
SEQUENCE = 'sequence'
COMPOSITE_TYPES = (SELECTOR, SEQUENCE)

# Generated-node property types
INTEGER = 'integer'
REAL = 'real'
BOOLEAN = 'boolean'
BLACKBOARD_KEY = 'blackboard-key'
PROPERTY_TYPES = (INTEGER, REAL, BOOLEAN, BLACKBOARD_KEY)

# Experiment modes
EVOLVE = 'evolve'
BASELINE = 'baseline'
MODES = (EVOLVE, BASELINE)

# Reproduction defaults
DEFAULT_CROSSOVER_PROB = 0.20
DEFAULT_POINT_MUTATOR_PROB = 0.0184
DEFAULT_GAUSSIAN_STD_PERCENT = 0.10
DEFAULT_INIT_ITERATIONS = 10
DEFAULT_INIT_CROSSOVER_PROB = 0.40
DEFAULT_INIT_POINT_PROB_TARGET = 0.40

# Selection defaults
DEFAULT_TOURNAMENT_K = 4
DEFAULT_ELITISM_RATE = 0.12

# Simulation defaults
DEFAULT_DT = 0.1
DEFAULT_EPISODE_LENGTH = 60.0

CHROMOSOME_FORMAT = 'btree/1'
CHROMOSOME_SUFFIX = '.btree.json'

PRESETS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'presets')


def _setting(name, default=None):
    if not settings.configured:
        return default
    return getattr(settings, name, default)


def output_dir():
    """Default directory for run artifacts."""
    return _setting('BTEVOLVE_OUTPUT_DIR') \
        or os.environ.get('BTEVOLVE_OUTPUT_DIR') \
        or os.path.join(os.getcwd(), 'btevolve-runs')


def workers():
    return _setting('BTEVOLVE_WORKERS') or os.cpu_count() or 1


def record_runs():
    return _setting('BTEVOLVE_RECORD_RUNS', False)


def extra_scorers():
    return _setting('BTEVOLVE_SCORERS', {})
