"""Executable behavior trees.

Chromosomes are compiled into immutable node graphs bound to primitives (the
actual task and condition code) and ticked at a fixed timestep.

Semantics:

* A selector returns the status of its first child that does not fail, and
  fails when every child fails. A sequence fails on the first failing child,
  is running on the first running child and succeeds when all succeed.
* Composites have memory: a tick that ends ``RUNNING`` stores the path of the
  running task and the next tick resumes there, without re-running earlier
  siblings. One pass per tick, no retry loop.
* Attached decorators are checked in order every time their node is
  ticked. A failing decorator makes the node fail without running it. If
  the node was running, its running subtree is aborted.
"""
import enum
import math
from types import MappingProxyType

from .config import COMPOSITE, DECORATOR, SELECTOR, TASK
from .exceptions import ArityViolation, BlackboardError, CompileError, PropertyOutOfRange, UnknownNodeId
from .library import GeneratedNodeTemplate


class NodeStatus(enum.Enum):
    SUCCESS = 'success'
    FAILURE = 'failure'
    RUNNING = 'running'


SUCCESS = NodeStatus.SUCCESS
FAILURE = NodeStatus.FAILURE
RUNNING = NodeStatus.RUNNING


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


_TYPE_CHECKS = {
    'integer': lambda v: isinstance(v, int) and not isinstance(v, bool),
    'real': _is_number,
    'boolean': lambda v: isinstance(v, bool),
    'position': lambda v: isinstance(v, tuple) and len(v) == 2 and all(_is_number(c) for c in v),
    'entity': lambda v: isinstance(v, str),
}


class Blackboard(object):
    """Typed per-agent key/value store with a schema fixed at construction.

    Unset keys read as ``None``. Writing ``None`` clears a key.
    """

    __slots__ = ('schema', '_values')

    def __init__(self, schema):
        self.schema = MappingProxyType(dict(schema))
        self._values = {}

    def __contains__(self, key):
        return key in self.schema

    def get(self, key):
        if key not in self.schema:
            raise KeyError('Blackboard has no key %r' % key)
        return self._values.get(key)

    def set(self, key, value):
        if key not in self.schema:
            raise KeyError('Blackboard has no key %r' % key)
        if value is None:
            self._values.pop(key, None)
            return
        if self.schema[key] == 'position':
            value = tuple(value)
        if not _TYPE_CHECKS[self.schema[key]](value):
            raise BlackboardError('Key %r holds %s values, got %r' % (key, self.schema[key], value))
        self._values[key] = value

    def clear(self, key):
        self.set(key, None)

    def snapshot(self):
        return dict(self._values)


class DecoratorPrimitive(object):
    """Condition code behind a decorator node."""

    def check(self, context, params, memory):
        raise NotImplementedError

    def finished(self, context, params, memory):
        """Called when the host node completes (success or failure)."""


class Condition(DecoratorPrimitive):

    def __init__(self, predicate):
        self.predicate = predicate

    def check(self, context, params, memory):
        return bool(self.predicate(context, params))


class PrimitiveTable(object):
    """Named task and decorator primitives trees are compiled against.

    Tasks are callables ``(context, params, memory, dt) -> NodeStatus``;
    ``memory`` is scratch state, fresh each time the task is entered anew.
    """

    def __init__(self):
        self.tasks = {}
        self.decorators = {}

    def task(self, name):
        def register(func):
            self.tasks[name] = func
            return func
        return register

    def condition(self, name):
        def register(predicate):
            self.decorators[name] = Condition(predicate)
            return predicate
        return register

    def decorator(self, name):
        def register(cls):
            self.decorators[name] = cls()
            return cls
        return register

    def has(self, kind, name):
        if kind == TASK:
            return name in self.tasks
        if kind == DECORATOR:
            return name in self.decorators
        return False

    def get(self, kind, name):
        return (self.tasks if kind == TASK else self.decorators)[name]


class TickContext(object):
    """What a primitive sees of the world: its agent's blackboard and clock."""

    def __init__(self, blackboard, time=0.0, rng=None):
        self.blackboard = blackboard
        self.time = time
        self.rng = rng


class CompiledNode(object):
    __slots__ = ('kind', 'id', 'path', 'params', 'primitive', 'children', 'decorators', 'is_selector')

    def __init__(self, kind, node_id, path, params, primitive, children, decorators):
        self.kind = kind
        self.id = node_id
        self.path = path
        self.params = MappingProxyType(params)
        self.primitive = primitive
        self.children = tuple(children)
        self.decorators = tuple(decorators)
        self.is_selector = kind == COMPOSITE and node_id == SELECTOR

    def __repr__(self):
        return '<CompiledNode %s %s>' % (self.id, self.path)

    def count(self):
        return 1 + len(self.decorators) + sum(child.count() for child in self.children)


class TreeInstance(object):
    """A compiled tree bound to one agent, plus its execution state."""

    def __init__(self, root, owner=None):
        self.root = root
        self.owner = owner
        self.running_path = None
        self.node_count = root.count()
        self._task_memory = {}
        self._decorator_memory = {}

    def reset(self):
        self.running_path = None
        self._task_memory.clear()
        self._decorator_memory.clear()

    def node(self, path):
        node = self.root
        for index in path:
            node = node.children[index]
        return node

    def abort(self, path):
        depth = len(path)
        for key in [k for k in self._task_memory if k[:depth] == path]:
            del self._task_memory[key]
        if self.running_path is not None and self.running_path[:depth] == path:
            self.running_path = None


def _params(entry, payload):
    params = dict(getattr(entry, 'params', {}) or {})
    if not isinstance(entry, GeneratedNodeTemplate):
        if payload.generated:
            raise UnknownNodeId('%r is a mapped node, not a template' % payload.id)
        return params
    if not payload.generated:
        raise UnknownNodeId('%r is a template and needs generated properties' % payload.id)
    expected = set(spec.name for spec in entry.properties)
    if set(payload.properties) != expected:
        raise PropertyOutOfRange('%r expects properties %s, got %s' % (
            payload.id, sorted(expected), sorted(payload.properties)))
    for spec in entry.properties:
        value = payload.properties[spec.name]
        if isinstance(value, float) and math.isnan(value) or not spec.contains(value):
            raise PropertyOutOfRange('%s.%s = %r is outside its template range' % (payload.id, spec.name, value))
        params[spec.name] = value
    return params


def _compile_node(node, lib, primitives, path, attached=False):
    if node.id not in lib:
        raise UnknownNodeId('Unknown node id %r' % node.id)
    entry = lib.get(node.id)
    if entry.kind != node.kind:
        raise UnknownNodeId('%r is a %s in the library, used as %s' % (node.id, entry.kind, node.kind))
    if node.kind != COMPOSITE and node.children:
        raise ArityViolation('%s %r cannot have children' % (node.kind, node.id))
    if node.kind == DECORATOR:
        if not attached or node.decorators:
            raise ArityViolation('Decorator %r must be attached and carry nothing' % node.id)
    elif attached:
        raise ArityViolation('%s %r cannot be attached as a decorator' % (node.kind, node.id))
    params = _params(entry, node.payload)

    primitive = None
    if node.kind != COMPOSITE:
        if not primitives.has(node.kind, entry.binding):
            raise CompileError('No %s primitive %r for node %r' % (node.kind, entry.binding, node.id))
        primitive = primitives.get(node.kind, entry.binding)
    children = [_compile_node(child, lib, primitives, path + (i,)) for i, child in enumerate(node.children)]
    decorators = [_compile_node(d, lib, primitives, path, attached=True) for d in node.decorators]
    return CompiledNode(node.kind, node.id, path, params, primitive, children, decorators)


def compile_tree(genome, lib, primitives=None, owner=None):
    """Translate a chromosome into an executable :class:`TreeInstance`.

    ``primitives`` defaults to the arena's primitive table.
    """
    if primitives is None:
        from .arena.primitives import PRIMITIVES as primitives
    if genome.root.kind != COMPOSITE:
        raise ArityViolation('The root of a tree must be a composite')
    return TreeInstance(_compile_node(genome.root, lib, primitives, ()), owner=owner)


class _Pass(object):
    """State of one tick through a tree."""

    def __init__(self, instance, context, dt):
        self.instance = instance
        self.context = context
        self.dt = dt
        self.running_path = None

    def run(self, node, resuming):
        instance = self.instance
        for index, decorator in enumerate(node.decorators):
            memory = instance._decorator_memory.setdefault((node.path, index), {})
            if not decorator.primitive.check(self.context, decorator.params, memory):
                if resuming:
                    instance.abort(node.path)
                return FAILURE

        if node.kind == TASK:
            if not resuming or node.path not in instance._task_memory:
                instance._task_memory[node.path] = {}
            status = node.primitive(self.context, node.params, instance._task_memory[node.path], self.dt)
            if status is RUNNING:
                self.running_path = node.path
                return status
            del instance._task_memory[node.path]
        else:
            status = self.run_composite(node, resuming)
            if status is RUNNING:
                return status
        self.finished(node)
        return status

    def run_composite(self, node, resuming):
        start = self.instance.running_path[len(node.path)] if resuming else 0
        for index in range(start, len(node.children)):
            status = self.run(node.children[index], resuming and index == start)
            if node.is_selector:
                if status is not FAILURE:
                    return status
            elif status is not SUCCESS:
                return status
        return FAILURE if node.is_selector else SUCCESS

    def finished(self, node):
        for index, decorator in enumerate(node.decorators):
            memory = self.instance._decorator_memory.setdefault((node.path, index), {})
            decorator.primitive.finished(self.context, decorator.params, memory)


def tick(instance, context, dt):
    """Advance a tree by one fixed timestep and return the root status."""
    assert dt > 0, 'dt must be positive'
    tick_pass = _Pass(instance, context, dt)
    status = tick_pass.run(instance.root, instance.running_path is not None)
    instance.running_path = tick_pass.running_path if status is RUNNING else None
    return status
