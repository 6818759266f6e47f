"""Event-driven fitness.

Simulations send events that add to per-agent keyed accumulators (the
ledger). After an episode each agent is scored by a strategy, by default the
sum over terms of a piecewise-linear map of the key's value, plus a penalty
for trees outside a size band.
"""
import bisect
import functools
import json
import math
import os
from dataclasses import dataclass, field

from django.utils.module_loading import import_string

from .config import PRESETS_DIR, extra_scorers
from .exceptions import ConfigError, UndeclaredKey


class FitnessLedger(object):
    """Per-agent accumulators for a fixed set of declared keys."""

    def __init__(self, keys):
        self.keys = frozenset(keys)
        self._values = {}

    def declares(self, key):
        return key in self.keys

    def record_event(self, agent_id, key, delta):
        if key not in self.keys:
            raise UndeclaredKey('Fitness key %r was not declared' % key)
        values = self._values.setdefault(agent_id, {})
        values[key] = values.get(key, 0.0) + delta
        return self

    def register(self, agent_id):
        """Make an agent appear in the ledger even if it never sends events."""
        self._values.setdefault(agent_id, {})

    def value(self, agent_id, key):
        return self._values.get(agent_id, {}).get(key, 0.0)

    def values(self, agent_id):
        return {key: self.value(agent_id, key) for key in sorted(self.keys)}

    def agents(self):
        return list(self._values)

    def merge(self, other):
        """Fold another ledger (from a parallel episode) into this one."""
        for agent_id, values in other._values.items():
            self.register(agent_id)
            for key, value in values.items():
                self.record_event(agent_id, key, value)
        return self

    def total(self, key):
        return math.fsum(values.get(key, 0.0) for values in self._values.values())

    def to_dict(self):
        return {agent_id: dict(sorted(values.items())) for agent_id, values in self._values.items()}


@dataclass(frozen=True)
class FitnessTerm:
    """Continuous piecewise-linear map from a key's value to a score.

    Beyond the end breakpoints the first and last segments are extended.
    """
    key: str
    breakpoints: tuple

    def __post_init__(self):
        if not self.breakpoints:
            raise ConfigError('Fitness term %r needs at least one breakpoint' % self.key)
        xs = [x for x, _ in self.breakpoints]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigError('Breakpoints of %r must be strictly increasing' % self.key)

    def __call__(self, value):
        points = self.breakpoints
        if len(points) == 1:
            return float(points[0][1])
        xs = [x for x, _ in points]
        index = bisect.bisect_right(xs, value) - 1
        index = min(max(index, 0), len(points) - 2)
        (x0, y0), (x1, y1) = points[index], points[index + 1]
        if value == x1:
            return float(y1)
        return y0 + (y1 - y0) * (value - x0) / (x1 - x0)

    def to_dict(self):
        return {'key': self.key, 'breakpoints': [list(point) for point in self.breakpoints]}


@dataclass(frozen=True)
class SizeBand:
    min_nodes: int = 5
    max_nodes: int = 40
    per_node_penalty: float = 25.0

    def __post_init__(self):
        if self.min_nodes > self.max_nodes:
            raise ConfigError('Size band minimum exceeds its maximum')
        if self.per_node_penalty <= 0:
            raise ConfigError('The per-node penalty must be positive')

    def penalty(self, size):
        if size < self.min_nodes:
            return -self.per_node_penalty * (self.min_nodes - size)
        if size > self.max_nodes:
            return -self.per_node_penalty * (size - self.max_nodes)
        return 0.0


@dataclass(frozen=True)
class FitnessSpec:
    terms: tuple
    size_band: SizeBand = field(default_factory=SizeBand)
    extra_keys: tuple = ()
    scorer: str = 'linear'
    floor_score: float = -2000.0

    def __post_init__(self):
        if not self.terms:
            raise ConfigError('A fitness spec needs at least one term')

    @property
    def keys(self):
        return tuple(term.key for term in self.terms) + tuple(self.extra_keys)

    def ledger(self):
        return FitnessLedger(self.keys)

    def to_dict(self):
        return {
            'terms': [term.to_dict() for term in self.terms],
            'size_band': {
                'min_nodes': self.size_band.min_nodes,
                'max_nodes': self.size_band.max_nodes,
                'per_node_penalty': self.size_band.per_node_penalty,
            },
            'extra_keys': list(self.extra_keys),
            'scorer': self.scorer,
            'floor_score': self.floor_score,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError('A fitness spec must be a JSON object')
        unknown = set(data) - {'terms', 'size_band', 'extra_keys', 'scorer', 'floor_score'}
        if unknown:
            raise ConfigError('Unknown fitness fields: %s' % ', '.join(sorted(unknown)))
        try:
            terms = tuple(
                FitnessTerm(t['key'], tuple((float(x), float(y)) for x, y in t['breakpoints']))
                for t in data['terms']
            )
            band = SizeBand(**data.get('size_band', {}))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError('Malformed fitness spec: %s' % e)
        spec = cls(
            terms, band,
            extra_keys=tuple(data.get('extra_keys', ())),
            scorer=data.get('scorer', 'linear'),
            floor_score=float(data.get('floor_score', -2000.0)),
        )
        get_scorer(spec.scorer)
        return spec

    @classmethod
    def load(cls, path):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return cls.from_dict(json.load(f))
        except (OSError, ValueError) as e:
            raise ConfigError('Cannot read fitness spec %s: %s' % (path, e))


def linear_score(ledger, agent_id, tree_size, spec):
    """Sum of the piecewise term maps plus the size-band penalty."""
    total = math.fsum(term(ledger.value(agent_id, term.key)) for term in spec.terms)
    return total + spec.size_band.penalty(tree_size)


SCORERS = {
    'linear': linear_score,
}


def get_scorer(name):
    if name in SCORERS:
        return SCORERS[name]
    path = extra_scorers().get(name, name)
    try:
        return import_string(path)
    except ImportError:
        raise ConfigError('Unknown scoring strategy %r' % name)


def score(ledger, agent_id, tree_size, spec):
    return get_scorer(spec.scorer)(ledger, agent_id, tree_size, spec)


def bundled_spec():
    return _bundled_spec()


@functools.lru_cache(maxsize=None)
def _bundled_spec():
    return FitnessSpec.load(os.path.join(PRESETS_DIR, 'fitness.json'))
