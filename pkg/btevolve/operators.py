"""Reproduction: crossover, the twelve point mutators, child construction
and initial population seeding.

Every public operator is pure: it returns a new chromosome and leaves its
inputs untouched. The in-place versions used internally by
:func:`make_child` are reachable as ``mutator.mutate``.
"""
import functools
from dataclasses import asdict, dataclass, replace

from .chromosome import ChromosomeNode
from .config import (BLACKBOARD_KEY, BOOLEAN, COMPOSITE, DECORATOR, DEFAULT_CROSSOVER_PROB,
                     DEFAULT_GAUSSIAN_STD_PERCENT, DEFAULT_INIT_CROSSOVER_PROB,
                     DEFAULT_INIT_ITERATIONS, DEFAULT_INIT_POINT_PROB_TARGET,
                     DEFAULT_POINT_MUTATOR_PROB, INTEGER, REAL, TASK)
from .exceptions import ConfigError
from .library import GeneratedNodeTemplate


def per_mutator_probability(target, count=12):
    """Probability x such that ``1 - (1 - x) ** count == target``."""
    return 1.0 - (1.0 - target) ** (1.0 / count)


@dataclass(frozen=True)
class MutatorConfig:
    crossover_prob: float = DEFAULT_CROSSOVER_PROB
    point_prob: float = DEFAULT_POINT_MUTATOR_PROB
    gaussian_std_percent: float = DEFAULT_GAUSSIAN_STD_PERCENT
    init_iterations: int = DEFAULT_INIT_ITERATIONS
    init_crossover_prob: float = DEFAULT_INIT_CROSSOVER_PROB
    init_point_prob_target: float = DEFAULT_INIT_POINT_PROB_TARGET

    def __post_init__(self):
        for name in ('crossover_prob', 'point_prob', 'init_crossover_prob', 'init_point_prob_target'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError('mutators.%s must lie in [0, 1]' % name)
        if self.gaussian_std_percent <= 0:
            raise ConfigError('mutators.gaussian_std_percent must be positive')
        if self.init_iterations < 0:
            raise ConfigError('mutators.init_iterations cannot be negative')

    def for_seeding(self):
        """The config used while building the initial population."""
        return replace(
            self,
            crossover_prob=self.init_crossover_prob,
            point_prob=per_mutator_probability(self.init_point_prob_target, len(POINT_MUTATORS)),
        )

    def to_dict(self):
        return asdict(self)


def _choice(rng, items):
    return items[int(rng.integers(len(items)))]


def _pick_subtree(chromosome, rng):
    """A non-root tree node: depth uniform over occupied depths, then node uniform."""
    by_depth = {}
    for path, _ in chromosome.walk():
        if path:
            by_depth.setdefault(len(path), []).append(path)
    if not by_depth:
        return None
    depth = _choice(rng, sorted(by_depth))
    return _choice(rng, by_depth[depth])


def _crossover(child, donor, rng):
    target = _pick_subtree(child, rng)
    if target is None:
        return False
    source = _pick_subtree(donor, rng)
    if source is None:
        return False
    parent, index = child.parent(target)
    parent.children[index] = donor.node(source).copy()
    return True


def crossover(child, donor, rng):
    """Replace a random subtree of ``child`` with a copy of one of ``donor``.

    Roots are never swap points; a lone-root child or donor is returned as is.
    """
    result = child.deep_copy()
    _crossover(result, donor, rng)
    return result


def point_mutator(name, gaussian=False):
    def decorator(func):
        @functools.wraps(func)
        def wrapper(chromosome, library, rng, **kwargs):
            result = chromosome.deep_copy()
            func(result, library, rng, **kwargs)
            return result
        wrapper.mutate = func
        wrapper.mutator_name = name
        wrapper.gaussian = gaussian
        return wrapper
    return decorator


def _paths_of_kind(chromosome, kind):
    return [path for path, node in chromosome.walk() if node.kind == kind]


@point_mutator('add-task')
def add_task(chromosome, library, rng):
    entries = library.entries_of_kind(TASK)
    if not entries:
        return
    host = chromosome.node(_choice(rng, _paths_of_kind(chromosome, COMPOSITE)))
    slot = int(rng.integers(len(host.children) + 1))
    host.children.insert(slot, ChromosomeNode(library.new_payload(_choice(rng, entries), rng)))


@point_mutator('add-composite')
def add_composite(chromosome, library, rng):
    entries = library.mapped_of_kind(COMPOSITE)
    host = chromosome.node(_choice(rng, _paths_of_kind(chromosome, COMPOSITE)))
    slot = int(rng.integers(len(host.children) + 1))
    host.children.insert(slot, ChromosomeNode(_choice(rng, entries).payload()))


@point_mutator('add-decorator')
def add_decorator(chromosome, library, rng):
    entries = library.entries_of_kind(DECORATOR)
    if not entries:
        return
    host = chromosome.node(_choice(rng, chromosome.tree_addresses()))
    host.decorators.append(ChromosomeNode(library.new_payload(_choice(rng, entries), rng)))


@point_mutator('delete-node')
def delete_node(chromosome, library, rng):
    """Delete a non-root tree node; a composite's children take its place."""
    paths = [path for path, _ in chromosome.walk() if path]
    if not paths:
        return
    path = _choice(rng, paths)
    parent, index = chromosome.parent(path)
    parent.children[index:index + 1] = parent.children[index].children


@point_mutator('delete-decorator')
def delete_decorator(chromosome, library, rng):
    addresses = chromosome.decorator_addresses()
    if not addresses:
        return
    address = _choice(rng, addresses)
    del chromosome.node(address.path).decorators[address.decorator]


def _replace_payload(node, library, kind, rng):
    entries = [entry for entry in library.entries_of_kind(kind) if entry.id != node.id]
    if entries:
        node.payload = library.new_payload(_choice(rng, entries), rng)


@point_mutator('replace-task')
def replace_task(chromosome, library, rng):
    paths = _paths_of_kind(chromosome, TASK)
    if paths:
        _replace_payload(chromosome.node(_choice(rng, paths)), library, TASK, rng)


@point_mutator('replace-composite')
def replace_composite(chromosome, library, rng):
    node = chromosome.node(_choice(rng, _paths_of_kind(chromosome, COMPOSITE)))
    _replace_payload(node, library, COMPOSITE, rng)


@point_mutator('replace-decorator')
def replace_decorator(chromosome, library, rng):
    addresses = chromosome.decorator_addresses()
    if addresses:
        _replace_payload(chromosome.node(_choice(rng, addresses)), library, DECORATOR, rng)


def _properties_of_type(chromosome, library, ptype):
    """(node, property spec) pairs over tree nodes and decorators."""
    found = []
    nodes = [node for _, node in chromosome.walk()]
    nodes += [d for node in list(nodes) for d in node.decorators]
    for node in nodes:
        if not node.payload.generated or node.id not in library:
            continue
        template = library.get(node.id)
        if not isinstance(template, GeneratedNodeTemplate):
            continue
        found.extend((node, spec) for spec in template.properties if spec.type == ptype)
    return found


def _perturb(chromosome, library, rng, ptype, std_percent):
    candidates = _properties_of_type(chromosome, library, ptype)
    if not candidates:
        return
    node, spec = _choice(rng, candidates)
    value = node.payload.properties[spec.name]
    std = std_percent * abs(value) if value != 0 else std_percent * (spec.hi - spec.lo)
    if std > 0:
        node.payload.properties[spec.name] = spec.clamp(value + float(rng.normal(0.0, std)))


@point_mutator('mutate-real-property', gaussian=True)
def mutate_real_property(chromosome, library, rng, std_percent=DEFAULT_GAUSSIAN_STD_PERCENT):
    _perturb(chromosome, library, rng, REAL, std_percent)


@point_mutator('mutate-integer-property', gaussian=True)
def mutate_integer_property(chromosome, library, rng, std_percent=DEFAULT_GAUSSIAN_STD_PERCENT):
    _perturb(chromosome, library, rng, INTEGER, std_percent)


def _repick(chromosome, library, rng, ptype):
    candidates = _properties_of_type(chromosome, library, ptype)
    if not candidates:
        return
    node, spec = _choice(rng, candidates)
    current = node.payload.properties[spec.name]
    options = [option for option in spec.options if option != current]
    if options:
        node.payload.properties[spec.name] = _choice(rng, options)


@point_mutator('mutate-boolean-property')
def mutate_boolean_property(chromosome, library, rng):
    _repick(chromosome, library, rng, BOOLEAN)


@point_mutator('mutate-blackboard-property')
def mutate_blackboard_property(chromosome, library, rng):
    _repick(chromosome, library, rng, BLACKBOARD_KEY)


# Application order is fixed.
POINT_MUTATORS = (
    add_task,
    add_composite,
    add_decorator,
    delete_node,
    delete_decorator,
    replace_task,
    replace_composite,
    replace_decorator,
    mutate_real_property,
    mutate_integer_property,
    mutate_boolean_property,
    mutate_blackboard_property,
)


def reproduce(primary, donor, cfg, library, rng):
    """Build a child and report which operators were drawn.

    Returns ``(child, applied)`` where ``applied`` lists operator names in
    application order.
    """
    child = primary.deep_copy()
    applied = []
    if rng.random() < cfg.crossover_prob:
        _crossover(child, donor, rng)
        applied.append('crossover')
    for mutator in POINT_MUTATORS:
        if rng.random() < cfg.point_prob:
            if mutator.gaussian:
                mutator.mutate(child, library, rng, std_percent=cfg.gaussian_std_percent)
            else:
                mutator.mutate(child, library, rng)
            applied.append(mutator.mutator_name)
    return child, applied


def make_child(primary, donor, cfg, library, rng):
    """Copy ``primary``, then maybe cross over with ``donor``, then maybe mutate."""
    return reproduce(primary, donor, cfg, library, rng)[0]


def seed_population(initial, n, cfg, library, rng):
    """Diversify copies of ``initial`` into a population of ``n``.

    Every iteration replaces each member by a child of it and a uniformly
    chosen member of the previous round, with the seeding probabilities.
    """
    assert n >= 2, 'A population needs at least two members'
    seeding = cfg.for_seeding()
    population = [initial.deep_copy() for _ in range(n)]
    for _ in range(cfg.init_iterations):
        population = [
            make_child(member, population[int(rng.integers(n))], seeding, library, rng)
            for member in population
        ]
    for index, member in enumerate(population):
        member.generation_born = 0
        member.lineage_id = index
    return population
