"""Node library: the material evolution builds trees from.

A library holds *mapped* node definitions, fixed designer nodes tracked by
id, and *generated* node templates whose properties are sampled within
declared ranges. The two composite types are always available.

The bundled roster (``presets/library.json``) is a reconstruction: it keeps
the shape of the original experiment (8 mapped + 4 generated decorators,
13 mapped + 5 generated tasks) and a few node names known from it, the rest
is filler, including some deliberately weak nodes.
"""
import functools
import json
import os
from collections import namedtuple
from dataclasses import dataclass, field

from .chromosome import GeneratedInstance, MappedRef
from .config import (BLACKBOARD_KEY, BOOLEAN, COMPOSITE, COMPOSITE_TYPES, DECORATOR,
                     INTEGER, NODE_KINDS, PRESETS_DIR, PROPERTY_TYPES, REAL, TASK)
from .exceptions import ConfigError

ValidationIssue = namedtuple('ValidationIssue', ['code', 'node_id', 'message'])

BLACKBOARD_TYPES = ('integer', 'real', 'boolean', 'position', 'entity')


@dataclass(frozen=True)
class PropertySpec:
    name: str
    type: str
    lo: object = None
    hi: object = None
    options: tuple = ()

    @property
    def numeric(self):
        return self.type in (INTEGER, REAL)

    def contains(self, value):
        if self.type == REAL:
            return isinstance(value, (int, float)) and not isinstance(value, bool) \
                and self.lo <= value <= self.hi
        if self.type == INTEGER:
            return isinstance(value, int) and not isinstance(value, bool) \
                and self.lo <= value <= self.hi
        return value in self.options

    def clamp(self, value):
        value = min(max(value, self.lo), self.hi)
        if self.type == INTEGER:
            value = int(round(value))
        return value

    def to_dict(self):
        data = {'name': self.name, 'type': self.type}
        if self.numeric:
            data['range'] = [self.lo, self.hi]
        elif self.type == BLACKBOARD_KEY or list(self.options) != [False, True]:
            data['options'] = list(self.options)
        return data

    @classmethod
    def from_dict(cls, data):
        try:
            name, ptype = data['name'], data['type']
        except (KeyError, TypeError):
            raise ConfigError('Property spec needs a name and a type: %r' % (data,))
        if ptype not in PROPERTY_TYPES:
            raise ConfigError('Unknown property type %r for %r.' % (ptype, name))
        if ptype in (INTEGER, REAL):
            try:
                lo, hi = data['range']
            except (KeyError, TypeError, ValueError):
                raise ConfigError('Numeric property %r needs a [lo, hi] range.' % name)
            if ptype == INTEGER:
                lo, hi = int(lo), int(hi)
            else:
                lo, hi = float(lo), float(hi)
            return cls(name, ptype, lo=lo, hi=hi)
        default = (False, True) if ptype == BOOLEAN else ()
        return cls(name, ptype, options=tuple(data.get('options', default)))


@dataclass(frozen=True)
class MappedNodeDef:
    id: str
    kind: str
    binding: str = None
    params: dict = field(default_factory=dict)

    def payload(self):
        return MappedRef(self.kind, self.id)

    def to_dict(self):
        data = {'id': self.id, 'kind': self.kind, 'primitive': self.binding}
        if self.params:
            data['params'] = dict(self.params)
        return data


@dataclass(frozen=True)
class GeneratedNodeTemplate:
    id: str
    kind: str
    binding: str
    properties: tuple = ()

    def property(self, name):
        for spec in self.properties:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def to_dict(self):
        return {
            'id': self.id,
            'kind': self.kind,
            'primitive': self.binding,
            'properties': [spec.to_dict() for spec in self.properties],
        }


BUILTIN_COMPOSITES = tuple(MappedNodeDef(name, COMPOSITE) for name in COMPOSITE_TYPES)


def sample_property(spec, rng):
    if spec.type == REAL:
        return float(rng.uniform(spec.lo, spec.hi))
    if spec.type == INTEGER:
        return int(rng.integers(spec.lo, spec.hi, endpoint=True))
    return spec.options[int(rng.integers(len(spec.options)))]


def instantiate(template, rng):
    """Create a generated-node payload with freshly sampled property values."""
    properties = {spec.name: sample_property(spec, rng) for spec in template.properties}
    return GeneratedInstance(template.kind, template.id, properties)


class NodeLibrary(object):
    """Registry of mapped definitions and generated templates.

    Immutable after construction; lookups go through :meth:`get`.
    """

    def __init__(self, mapped=(), templates=(), blackboard=None):
        mapped = tuple(mapped)
        ids = set(d.id for d in mapped)
        self.mapped = tuple(d for d in BUILTIN_COMPOSITES if d.id not in ids) + mapped
        self.templates = tuple(templates)
        self.blackboard = dict(blackboard or {})
        self._index = {}
        for entry in self.mapped + self.templates:
            self._index.setdefault(entry.id, entry)

    def __contains__(self, node_id):
        return node_id in self._index

    def get(self, node_id):
        return self._index[node_id]

    def is_template(self, node_id):
        return isinstance(self._index.get(node_id), GeneratedNodeTemplate)

    def mapped_of_kind(self, kind):
        return [d for d in self.mapped if d.kind == kind]

    def templates_of_kind(self, kind):
        return [t for t in self.templates if t.kind == kind]

    def entries_of_kind(self, kind):
        return self.mapped_of_kind(kind) + self.templates_of_kind(kind)

    def instantiate(self, template_id, rng):
        return instantiate(self._index[template_id], rng)

    def new_payload(self, entry, rng):
        """Payload for a library entry: a reference or a fresh instance."""
        if isinstance(entry, GeneratedNodeTemplate):
            return instantiate(entry, rng)
        return entry.payload()

    def roster_counts(self):
        counts = {}
        for entry in self.mapped:
            if entry.kind != COMPOSITE:
                key = ('mapped', entry.kind)
                counts[key] = counts.get(key, 0) + 1
        for entry in self.templates:
            key = ('generated', entry.kind)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def to_dict(self):
        return {
            'blackboard': dict(self.blackboard),
            'mapped': [d.to_dict() for d in self.mapped if d not in BUILTIN_COMPOSITES],
            'templates': [t.to_dict() for t in self.templates],
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError('A node library must be a JSON object.')
        unknown = set(data) - {'blackboard', 'mapped', 'templates'}
        if unknown:
            raise ConfigError('Unknown library sections: %s' % ', '.join(sorted(unknown)))
        try:
            mapped = [
                MappedNodeDef(d['id'], d['kind'], d.get('primitive'), dict(d.get('params', {})))
                for d in data.get('mapped', [])
            ]
            templates = [
                GeneratedNodeTemplate(
                    d['id'], d['kind'], d.get('primitive'),
                    tuple(PropertySpec.from_dict(p) for p in d.get('properties', [])),
                )
                for d in data.get('templates', [])
            ]
        except (KeyError, TypeError) as e:
            raise ConfigError('Malformed library entry: %s' % e)
        return cls(mapped, templates, data.get('blackboard', {}))

    @classmethod
    def load(cls, path):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError('Cannot read node library %s: %s' % (path, e))
        return cls.from_dict(data)

    @classmethod
    def default(cls):
        return _bundled_library()


@functools.lru_cache(maxsize=None)
def _bundled_library():
    return NodeLibrary.load(os.path.join(PRESETS_DIR, 'library.json'))


def validate(lib, primitives=None):
    """Check a library's invariants.

    Returns a list of :class:`ValidationIssue`; the list is empty iff the
    library is well-formed. ``primitives`` defaults to the arena's table.
    """
    if primitives is None:
        from .arena.primitives import PRIMITIVES as primitives
    issues = []
    seen = set()
    for entry in lib.mapped + lib.templates:
        if entry.id in seen:
            issues.append(ValidationIssue('DuplicateId', entry.id, 'id %r is defined twice' % entry.id))
        seen.add(entry.id)

        if entry.kind not in NODE_KINDS:
            issues.append(ValidationIssue('BadKind', entry.id, 'unknown kind %r' % entry.kind))
            continue
        if entry.kind == COMPOSITE:
            if isinstance(entry, GeneratedNodeTemplate):
                issues.append(ValidationIssue('BadKind', entry.id, 'composites cannot be generated'))
            elif entry.binding is not None:
                issues.append(ValidationIssue('CompositeBinding', entry.id,
                                              'composites carry no primitive binding'))
            elif entry.id not in COMPOSITE_TYPES:
                issues.append(ValidationIssue('BadKind', entry.id,
                                              'composite must be one of %s' % ', '.join(COMPOSITE_TYPES)))
            continue
        if not entry.binding:
            issues.append(ValidationIssue('MissingBinding', entry.id, 'no primitive binding'))
        elif not primitives.has(entry.kind, entry.binding):
            issues.append(ValidationIssue('UnknownPrimitive', entry.id,
                                          'no %s primitive named %r' % (entry.kind, entry.binding)))

    for template in lib.templates:
        names = set()
        for spec in template.properties:
            if spec.name in names:
                issues.append(ValidationIssue('DuplicateProperty', template.id,
                                              'property %r declared twice' % spec.name))
            names.add(spec.name)
            if spec.numeric:
                if spec.lo > spec.hi:
                    issues.append(ValidationIssue('InvertedRange', template.id,
                                                  'range of %r is [%s, %s]' % (spec.name, spec.lo, spec.hi)))
            elif not spec.options:
                issues.append(ValidationIssue('EmptyOptions', template.id,
                                              'property %r has no options' % spec.name))
            elif spec.type == BLACKBOARD_KEY:
                unknown = [key for key in spec.options if key not in lib.blackboard]
                if unknown:
                    issues.append(ValidationIssue('UnknownBlackboardKey', template.id,
                                                  'keys not in the blackboard schema: %s' % ', '.join(unknown)))

    for key, vtype in lib.blackboard.items():
        if vtype not in BLACKBOARD_TYPES:
            issues.append(ValidationIssue('UnknownBlackboardType', key, 'unknown value type %r' % vtype))
    return issues
