"""Tree rendering: Graphviz documents and plain-text outlines.

Decorators are drawn as badges inside their host's label, so a graph has
exactly one node per tree node.
"""
import pydot

from .config import COMPOSITE, SELECTOR

SHAPES = {'composite': 'box', 'task': 'ellipse'}


def payload_label(node):
    if not node.payload.generated:
        return node.id
    props = ', '.join('%s=%s' % (name, _format(value)) for name, value in sorted(node.payload.properties.items()))
    return '%s(%s)' % (node.id, props)


def _format(value):
    if isinstance(value, float):
        return '%.4g' % value
    return str(value)


def _quote(text):
    return '"%s"' % text.replace('\\', '\\\\').replace('"', '\\"')


def to_graph(chromosome, name='btree'):
    """Build a :class:`pydot.Dot` graph of ``chromosome``."""
    graph = pydot.Dot(name, graph_type='digraph', rankdir='TB')
    names = {}
    for index, (path, node) in enumerate(chromosome.walk()):
        names[path] = 'n%d' % index
        lines = [payload_label(node)]
        lines.extend('[%s]' % payload_label(decorator) for decorator in node.decorators)
        attrs = {'shape': SHAPES.get(node.kind, 'box')}
        if node.kind == COMPOSITE:
            attrs['style'] = 'rounded' if node.id == SELECTOR else 'solid'
        graph.add_node(pydot.Node(names[path], label=_quote('\\n'.join(lines)), **attrs))
        if path:
            graph.add_edge(pydot.Edge(names[path[:-1]], names[path]))
    return graph


def export_dot(chromosome, name='btree'):
    return to_graph(chromosome, name).to_string()


def graph_nodes(graph):
    """Nodes of a graph, without the ``node``/``edge``/``graph`` defaults pydot may list."""
    return [node for node in graph.get_nodes() if node.get_name() not in ('node', 'edge', 'graph')]


def outline(chromosome):
    """Indented text outline followed by a line of size and shape statistics."""
    lines = []
    counts = {}
    for path, node in chromosome.walk():
        badges = ''.join('  [%s]' % payload_label(d) for d in node.decorators)
        lines.append('%s%s%s' % ('  ' * len(path), payload_label(node), badges))
        counts[node.kind] = counts.get(node.kind, 0) + 1
        counts['decorator'] = counts.get('decorator', 0) + len(node.decorators)
    lines.append('size %d, depth %d, composites %d, tasks %d, decorators %d' % (
        chromosome.size(), chromosome.max_depth(), counts.get('composite', 0),
        counts.get('task', 0), counts.get('decorator', 0)))
    return '\n'.join(lines) + '\n'
