"""The genome: a serializable tree of node payloads.

A chromosome mirrors a behavior tree. Each node carries a payload, either a
:class:`MappedRef` (a library id) or a :class:`GeneratedInstance` (a template
id plus concrete property values). Composites own ordered children; any tree
node may carry attached decorators, which are never tree children
themselves.

Nodes are addressed by :class:`NodeAddress`: the child-index path from the
root, plus a decorator index for attached decorators.

Document format (``.btree.json``)::

    {"format": "btree/1", "generation_born": 0, "lineage_id": 0,
     "root": {"kind": "composite", "id": "selector", "children": [...],
              "decorators": [...]}}

Generated nodes carry a ``properties`` object.
"""
import json
import math
from collections import namedtuple
from dataclasses import dataclass, field

from .config import CHROMOSOME_FORMAT, COMPOSITE, COMPOSITE_TYPES, DECORATOR, NODE_KINDS, TASK
from .exceptions import DepthOutOfRange, InvariantError, ParseError, SchemaError

NODE_KEYS = frozenset(['kind', 'id', 'properties', 'children', 'decorators'])
DOCUMENT_KEYS = frozenset(['format', 'generation_born', 'lineage_id', 'root'])


def _reject_constant(name):
    raise SchemaError('Non-finite number %s in chromosome document' % name)


def _parse_float(text):
    value = float(text)
    if not math.isfinite(value):
        _reject_constant(text)
    return value


def _document_int(data, key):
    value = data.get(key, 0)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError('%s must be an integer, got %r' % (key, value))
    return value


class NodeAddress(namedtuple('NodeAddress', ['path', 'decorator'])):
    """Root-to-node child-index path, plus the index of an attached decorator."""

    def __new__(cls, path=(), decorator=None):
        return super(NodeAddress, cls).__new__(cls, tuple(path), decorator)

    @property
    def depth(self):
        return len(self.path)

    @property
    def is_decorator(self):
        return self.decorator is not None


ROOT = NodeAddress()


@dataclass(frozen=True)
class MappedRef:
    kind: str
    id: str

    @property
    def generated(self):
        return False

    def copy(self):
        return self

    def key(self):
        return (self.kind, self.id)


@dataclass
class GeneratedInstance:
    kind: str
    template_id: str
    properties: dict = field(default_factory=dict)

    @property
    def id(self):
        return self.template_id

    @property
    def generated(self):
        return True

    def copy(self):
        return GeneratedInstance(self.kind, self.template_id, dict(self.properties))

    def key(self):
        return (self.kind, self.template_id, tuple(sorted(self.properties.items())))


class ChromosomeNode(object):
    __slots__ = ('payload', 'children', 'decorators')

    def __init__(self, payload, children=None, decorators=None):
        self.payload = payload
        self.children = list(children or [])
        self.decorators = list(decorators or [])

    def __repr__(self):
        return '<ChromosomeNode %s:%s>' % (self.kind, self.id)

    @property
    def kind(self):
        return self.payload.kind

    @property
    def id(self):
        return self.payload.id

    @property
    def is_composite(self):
        return self.payload.kind == COMPOSITE

    def copy(self):
        return ChromosomeNode(
            self.payload.copy(),
            [child.copy() for child in self.children],
            [decorator.copy() for decorator in self.decorators],
        )

    def count(self):
        """Nodes in this subtree, attached decorators included."""
        return 1 + len(self.decorators) + sum(child.count() for child in self.children)

    def to_dict(self):
        data = {'kind': self.kind, 'id': self.id}
        if self.payload.generated:
            data['properties'] = dict(self.payload.properties)
        if self.is_composite:
            data['children'] = [child.to_dict() for child in self.children]
        if self.decorators:
            data['decorators'] = [decorator.to_dict() for decorator in self.decorators]
        return data

    @classmethod
    def from_dict(cls, data, attached=False):
        if not isinstance(data, dict):
            raise SchemaError('Node must be an object, got %r' % (data,))
        unknown = set(data) - NODE_KEYS
        if unknown:
            raise SchemaError('Unknown node fields: %s' % ', '.join(sorted(unknown)))
        kind, node_id = data.get('kind'), data.get('id')
        if kind not in NODE_KINDS:
            raise SchemaError('Unknown payload kind %r' % (kind,))
        if not isinstance(node_id, str) or not node_id:
            raise SchemaError('Node id must be a non-empty string, got %r' % (node_id,))
        if 'properties' in data:
            if kind == COMPOSITE:
                raise SchemaError('Composite %r cannot carry properties' % node_id)
            if not isinstance(data['properties'], dict):
                raise SchemaError('Properties of %r must be an object' % node_id)
            for name, value in data['properties'].items():
                if isinstance(value, float) and not math.isfinite(value):
                    raise SchemaError('Property %s of %r is not finite' % (name, node_id))
            payload = GeneratedInstance(kind, node_id, dict(data['properties']))
        else:
            payload = MappedRef(kind, node_id)
        if kind == COMPOSITE and node_id not in COMPOSITE_TYPES:
            raise SchemaError('Unknown composite type %r' % node_id)

        children = data.get('children', [])
        decorators = data.get('decorators', [])
        if not isinstance(children, list) or not isinstance(decorators, list):
            raise SchemaError('children and decorators of %r must be lists' % node_id)
        if kind == DECORATOR and not attached:
            raise InvariantError('Decorator %r placed as a tree child' % node_id)
        if kind != DECORATOR and attached:
            raise InvariantError('Only decorators can be attached, got %s %r' % (kind, node_id))
        if kind != COMPOSITE and children:
            raise InvariantError('%s %r cannot have children' % (kind.capitalize(), node_id))
        if kind == DECORATOR and decorators:
            raise InvariantError('Decorator %r cannot carry decorators' % node_id)
        return cls(
            payload,
            [cls.from_dict(child) for child in children],
            [cls.from_dict(decorator, attached=True) for decorator in decorators],
        )


def _check_node(node, attached=False):
    if node.kind == DECORATOR and not attached:
        raise InvariantError('Decorator %r placed as a tree child' % node.id)
    if node.kind != DECORATOR and attached:
        raise InvariantError('%s %r attached as a decorator' % (node.kind, node.id))
    if node.kind == COMPOSITE and node.id not in COMPOSITE_TYPES:
        raise InvariantError('Unknown composite type %r' % node.id)
    if node.kind != COMPOSITE and node.children:
        raise InvariantError('%s %r cannot have children' % (node.kind, node.id))
    if node.kind == DECORATOR and node.decorators:
        raise InvariantError('Decorator %r cannot carry decorators' % node.id)
    for child in node.children:
        _check_node(child)
    for decorator in node.decorators:
        _check_node(decorator, attached=True)


class Chromosome(object):

    def __init__(self, root, generation_born=0, lineage_id=0):
        self.root = root
        self.generation_born = generation_born
        self.lineage_id = lineage_id

    def __repr__(self):
        return '<Chromosome lineage=%s size=%d>' % (self.lineage_id, self.size())

    def __eq__(self, other):
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self.root.to_dict() == other.root.to_dict()

    __hash__ = None

    def size(self):
        """Total node count: tree nodes plus attached decorators."""
        return self.root.count()

    def walk(self):
        """Yield ``(path, node)`` for every tree node, depth first, pre-order."""
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for index in range(len(node.children) - 1, -1, -1):
                stack.append((path + (index,), node.children[index]))

    def depth_index(self):
        """Map each depth to the addresses found there.

        Attached decorators share the depth of their host.
        """
        index = {}
        for path, node in self.walk():
            addresses = index.setdefault(len(path), [])
            addresses.append(NodeAddress(path))
            addresses.extend(NodeAddress(path, i) for i in range(len(node.decorators)))
        return index

    def max_depth(self):
        return max(len(path) for path, _ in self.walk())

    def nodes_at_depth(self, depth):
        index = self.depth_index()
        if depth not in index:
            raise DepthOutOfRange('Depth %s is outside [0, %d]' % (depth, max(index)))
        return index[depth]

    def tree_addresses(self):
        return [NodeAddress(path) for path, _ in self.walk()]

    def decorator_addresses(self):
        return [NodeAddress(path, i) for path, node in self.walk() for i in range(len(node.decorators))]

    def node(self, address):
        if not isinstance(address, NodeAddress):
            address = NodeAddress(address)
        node = self.root
        for index in address.path:
            node = node.children[index]
        if address.decorator is not None:
            return node.decorators[address.decorator]
        return node

    def parent(self, path):
        """Return ``(parent_node, child_index)`` for a non-root path."""
        assert path, 'The root has no parent.'
        return self.node(NodeAddress(path[:-1])), path[-1]

    def validate(self):
        if not self.root.is_composite:
            raise InvariantError('The root must be a composite, got %s %r' % (self.root.kind, self.root.id))
        _check_node(self.root)
        return self

    def deep_copy(self):
        return Chromosome(self.root.copy(), self.generation_born, self.lineage_id)

    def to_dict(self):
        return {
            'format': CHROMOSOME_FORMAT,
            'generation_born': self.generation_born,
            'lineage_id': self.lineage_id,
            'root': self.root.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or 'root' not in data:
            raise SchemaError('A chromosome document needs a root node.')
        unknown = set(data) - DOCUMENT_KEYS
        if unknown:
            raise SchemaError('Unknown document fields: %s' % ', '.join(sorted(unknown)))
        if data.get('format', CHROMOSOME_FORMAT) != CHROMOSOME_FORMAT:
            raise SchemaError('Unsupported chromosome format %r' % data['format'])
        root = ChromosomeNode.from_dict(data['root'])
        return cls(root, _document_int(data, 'generation_born'), _document_int(data, 'lineage_id')).validate()

    def serialize(self):
        return serialize(self)

    def save(self, path):
        with open(path, 'w', encoding='utf-8') as f:
            f.write(serialize(self))

    @classmethod
    def load(cls, path):
        with open(path, 'r', encoding='utf-8') as f:
            return deserialize(f.read())


def serialize(chromosome):
    """JSON text for a chromosome. Numbers use their shortest exact repr."""
    return json.dumps(chromosome.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def deserialize(text):
    try:
        data = json.loads(text, parse_float=_parse_float, parse_constant=_reject_constant)
    except ValueError as e:
        raise ParseError('Invalid chromosome document: %s' % e)
    return Chromosome.from_dict(data)


def composite(composite_type, *children, decorators=()):
    """Shorthand used by fixtures and tests to build trees."""
    return ChromosomeNode(MappedRef(COMPOSITE, composite_type), children, decorators)


def task(node_id, decorators=(), **properties):
    payload = GeneratedInstance(TASK, node_id, properties) if properties else MappedRef(TASK, node_id)
    return ChromosomeNode(payload, decorators=decorators)


def decorator(node_id, **properties):
    payload = GeneratedInstance(DECORATOR, node_id, properties) if properties else MappedRef(DECORATOR, node_id)
    return ChromosomeNode(payload)
