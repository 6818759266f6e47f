"""Evolution runs, the random baseline, and the evaluation harness.

Configs are JSON documents with the sections ``experiment``, ``mutators``,
``selection``, ``sim``, ``fitness``, ``library`` and ``initial_tree``. The
last three take ``{"preset": name}``, ``{"path": file}`` or an inline
document.
"""
import copy
import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import config as btevolve_config
from .arena.maps import PRESET_MAPS, resolve_map
from .arena.simulation import SimConfig, run_episode
from .behavior_tree import compile_tree
from .chromosome import Chromosome
from .config import BASELINE, CHROMOSOME_SUFFIX, EVOLVE, MODES, PRESETS_DIR
from .exceptions import ChromosomeError, ConfigError
from .fitness import FitnessSpec, bundled_spec, score
from .library import NodeLibrary
from .operators import MutatorConfig, seed_population
from .rng import SeedStreams
from .runlog import GenerationRecord, RunLogWriter, best_index, mean
from .selection import SelectionConfig, next_generation, next_generation_random
from .signals import generation_evaluated, run_finished, run_started

logger = logging.getLogger(__name__)

SECTIONS = ('experiment', 'mutators', 'selection', 'sim', 'fitness', 'library', 'initial_tree')
PRESET_CONFIGS = ('desk', 'full-small', 'full-medium', 'full-large')
DEFAULT_PRESET = 'desk'


@dataclass
class ExperimentConfig:
    name: str = DEFAULT_PRESET
    map: str = 'medium'
    zombie_count: int = 12
    human_count: int = 3
    generations: int = 150
    seed: int = 0
    mode: str = EVOLVE
    trials: int = 100
    mutators: MutatorConfig = field(default_factory=MutatorConfig)
    tournament_k: int = 4
    elitism_rate: float = 0.12
    sim: SimConfig = field(default_factory=SimConfig)
    fitness: FitnessSpec = None
    library: NodeLibrary = None
    initial_tree: Chromosome = None
    base_dir: str = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError('experiment.mode must be one of %s' % ', '.join(MODES))
        if self.zombie_count < 2:
            raise ConfigError('experiment.zombie_count must be at least 2')
        if self.human_count < 0:
            raise ConfigError('experiment.human_count cannot be negative')
        if self.generations < 0:
            raise ConfigError('experiment.generations cannot be negative')
        if self.trials < 1:
            raise ConfigError('experiment.trials must be at least 1')
        self.selection = SelectionConfig(self.zombie_count, self.tournament_k, self.elitism_rate)
        if self.fitness is None:
            self.fitness = bundled_spec()
        if self.library is None:
            self.library = NodeLibrary.default()
        if self.initial_tree is None:
            self.initial_tree = load_tree_preset('degraded')

    @property
    def population_size(self):
        return self.zombie_count

    def arena_map(self):
        return resolve_map(self.map, self.base_dir)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        """The effective config; every referenced document is inlined."""
        return {
            'experiment': {
                'name': self.name,
                'map': self.map,
                'zombie_count': self.zombie_count,
                'human_count': self.human_count,
                'generations': self.generations,
                'seed': self.seed,
                'mode': self.mode,
                'trials': self.trials,
            },
            'mutators': self.mutators.to_dict(),
            'selection': self.selection.to_dict(),
            'sim': self.sim.to_dict(),
            'fitness': self.fitness.to_dict(),
            'library': self.library.to_dict(),
            'initial_tree': self.initial_tree.to_dict(),
        }

    @classmethod
    def from_dict(cls, data, base_dir=None):
        if not isinstance(data, dict):
            raise ConfigError('An experiment config must be a JSON object')
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise ConfigError('Unknown config sections: %s' % ', '.join(sorted(unknown)))
        experiment = dict(data.get('experiment', {}))
        allowed = {'name', 'map', 'zombie_count', 'human_count', 'generations', 'seed', 'mode', 'trials'}
        unknown = set(experiment) - allowed
        if unknown:
            raise ConfigError('Unknown experiment settings: %s' % ', '.join(sorted(unknown)))
        selection = dict(data.get('selection', {}))
        unknown = set(selection) - {'tournament_k', 'elitism_rate'}
        if unknown:
            raise ConfigError('Unknown selection settings: %s' % ', '.join(sorted(unknown)))
        mutators = dict(data.get('mutators', {}))
        try:
            mutators = MutatorConfig(**mutators)
        except TypeError as e:
            raise ConfigError('Bad mutator settings: %s' % e)
        map_name = experiment.get('map', 'medium')
        if base_dir and map_name not in PRESET_MAPS and not os.path.isabs(map_name):
            map_name = os.path.abspath(os.path.join(base_dir, map_name))
        experiment['map'] = map_name
        try:
            return cls(
                mutators=mutators,
                sim=SimConfig.from_dict(data.get('sim', {})),
                fitness=_resolve_fitness(data.get('fitness'), base_dir),
                library=_resolve_library(data.get('library'), base_dir),
                initial_tree=_resolve_tree(data.get('initial_tree'), base_dir),
                base_dir=base_dir,
                **experiment, **selection
            )
        except TypeError as e:
            raise ConfigError('Bad experiment settings: %s' % e)


def _reference(section, data, base_dir):
    """Split a section into ``('preset', name)``, ``('path', file)`` or ``('inline', doc)``."""
    if data is None:
        return 'preset', None
    if not isinstance(data, dict):
        raise ConfigError('Section %r must be a JSON object' % section)
    if set(data) == {'preset'}:
        return 'preset', data['preset']
    if set(data) == {'path'}:
        path = data['path']
        if base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return 'path', path
    return 'inline', data


def _resolve_fitness(data, base_dir):
    how, value = _reference('fitness', data, base_dir)
    if how == 'preset':
        if value not in (None, 'default'):
            raise ConfigError('Unknown fitness preset %r' % value)
        return bundled_spec()
    if how == 'path':
        return FitnessSpec.load(value)
    return FitnessSpec.from_dict(value)


def _resolve_library(data, base_dir):
    how, value = _reference('library', data, base_dir)
    if how == 'preset':
        if value not in (None, 'default'):
            raise ConfigError('Unknown library preset %r' % value)
        return NodeLibrary.default()
    if how == 'path':
        return NodeLibrary.load(value)
    return NodeLibrary.from_dict(value)


def _resolve_tree(data, base_dir):
    how, value = _reference('initial_tree', data, base_dir)
    if how == 'preset':
        return load_tree_preset(value or 'degraded')
    if how == 'path':
        return load_tree(value)
    try:
        return Chromosome.from_dict(value)
    except ChromosomeError as e:
        raise ConfigError('Bad initial tree: %s' % e)


def load_tree(path):
    try:
        return Chromosome.load(path)
    except OSError as e:
        raise ConfigError('Cannot read tree %s: %s' % (path, e))


def tree_preset_path(name):
    return os.path.join(PRESETS_DIR, 'trees', name + CHROMOSOME_SUFFIX)


def load_tree_preset(name):
    path = tree_preset_path(name)
    if not os.path.exists(path):
        raise ConfigError('Unknown tree preset %r' % name)
    return Chromosome.load(path)


def resolve_tree(name_or_path):
    """A tree file, or the name of a bundled tree such as ``manual-r1``."""
    if os.path.exists(name_or_path):
        return load_tree(name_or_path)
    return load_tree_preset(name_or_path)


def parse_override(text):
    if '=' not in text:
        raise ConfigError('Override %r is not of the form key=value' % text)
    key, raw = text.split('=', 1)
    try:
        value = json.loads(raw)
    except ValueError:
        value = raw
    return key.strip(), value


def apply_overrides(data, overrides):
    """Set dotted keys of a config document; every key must already exist."""
    data = copy.deepcopy(data)
    for text in overrides:
        key, value = parse_override(text)
        parts = key.split('.')
        node = data
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError('Override %r names an unknown key' % key)
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ConfigError('Override %r names an unknown key' % key)
        node[parts[-1]] = value
    return data


def config_path(name_or_path):
    if name_or_path in PRESET_CONFIGS:
        return os.path.join(PRESETS_DIR, name_or_path + '.json')
    return name_or_path


def load_config(source=None, overrides=(), seed=None):
    """Load an experiment config from a preset name or a file.

    Overrides apply to the effective config, after presets and referenced
    files are inlined.
    """
    path = config_path(source or DEFAULT_PRESET)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError('Cannot read config %s: %s' % (path, e))
    except ValueError as e:
        raise ConfigError('Config %s is not valid JSON: %s' % (path, e))
    base_dir = os.path.dirname(os.path.abspath(path))
    cfg = ExperimentConfig.from_dict(data, base_dir)
    overrides = list(overrides)
    if seed is not None:
        overrides.append('experiment.seed=%d' % int(seed))
    if overrides:
        cfg = ExperimentConfig.from_dict(apply_overrides(cfg.to_dict(), overrides), base_dir)
    cfg.arena_map()
    return cfg


# Evolution

def score_population(result, population, spec):
    fitnesses = []
    for index, member in enumerate(population):
        agent_id = 'z%d' % index
        if agent_id in result.failed:
            logger.warning('Member %d floor-scored: %s', index, result.failed[agent_id])
            fitnesses.append(float(spec.floor_score))
        else:
            fitnesses.append(float(score(result.ledger, agent_id, member.size(), spec)))
    return fitnesses


def evaluate_population(population, cfg, rng, arena_map=None):
    """Run one shared episode for the whole population and score each member."""
    arena_map = arena_map or cfg.arena_map()
    try:
        result = run_episode(population, arena_map, cfg.sim, cfg.library, cfg.fitness, rng, cfg.human_count)
    except Exception:
        logger.exception('Episode failed; every member is floor-scored')
        return [float(cfg.fitness.floor_score)] * len(population)
    return score_population(result, population, cfg.fitness)


def default_output_dir(cfg):
    return os.path.join(btevolve_config.output_dir(), '%s-%s-seed%d' % (cfg.name, cfg.mode, cfg.seed))


def evolve(cfg, output_dir=None):
    """Run evolution (or the random baseline) and write the run log.

    The population is evaluated ``generations + 1`` times: the seeded
    population first, then each new generation.
    """
    output_dir = os.path.abspath(output_dir or default_output_dir(cfg))
    streams = SeedStreams(cfg.seed)
    arena_map = cfg.arena_map()
    writer = RunLogWriter(output_dir, cfg.to_dict(), cfg.seed)
    run_started.send(sender=ExperimentConfig, run_id=output_dir, config=cfg)
    logger.info('Starting %s run %s: %d members, %d generations on %s',
                cfg.mode, cfg.name, cfg.population_size, cfg.generations, arena_map.name)

    started = time.perf_counter()
    population = seed_population(cfg.initial_tree, cfg.population_size, cfg.mutators, cfg.library,
                                 streams.generator('seeding'))
    for generation in range(cfg.generations + 1):
        fitnesses = evaluate_population(population, cfg, streams.generator('episodes', generation), arena_map)
        best = population[best_index(fitnesses)].deep_copy()
        record = writer.write(GenerationRecord(generation, fitnesses, [m.size() for m in population], best))
        logger.info('Generation %d: min %.2f mean %.2f max %.2f',
                    generation, record.minimum, record.mean, record.maximum)
        generation_evaluated.send(sender=ExperimentConfig, run_id=output_dir, record=record)
        if generation == cfg.generations:
            break
        rng = streams.generator('evolution', generation)
        if cfg.mode == BASELINE:
            population = next_generation_random(population, cfg.mutators, cfg.library, rng, generation + 1)
        else:
            population = next_generation(population, fitnesses, cfg.selection, cfg.mutators, cfg.library, rng,
                                         generation + 1)

    log = writer.finish(select_best(writer.log))
    logger.info('Finished run %s in %.1fs', output_dir, time.perf_counter() - started)
    run_finished.send(sender=ExperimentConfig, run_id=output_dir, log=log, best=log.best)
    return log


def evolve_runs(cfg, runs, output_dir=None):
    """``runs`` independent runs with consecutive seeds."""
    logs = []
    for index in range(runs):
        run_cfg = cfg.replace(seed=cfg.seed + index)
        directory = None
        if output_dir:
            directory = os.path.join(output_dir, 'run-%d' % index) if runs > 1 else output_dir
        logs.append(evolve(run_cfg, directory))
    return logs


def select_best_index(log):
    """``(generation, member)`` of the best tree.

    The generation with the highest mean wins, the later one on ties; within
    it the fittest member, the lower index on ties.
    """
    assert len(log), 'The run log is empty'
    record = max(log.records, key=lambda r: (r.mean, r.generation))
    return record.generation, record.best_index


def select_best(log):
    generation, _ = select_best_index(log)
    return log.records[generation].best


# Evaluation harness

class EvaluationStats(object):
    """Scores of every zombie in every trial of one tree."""

    def __init__(self, name, trial_scores):
        self.name = name
        self.trial_scores = [list(scores) for scores in trial_scores]
        self.scores = np.array([s for scores in self.trial_scores for s in scores], dtype=float)

    @property
    def trials(self):
        return len(self.trial_scores)

    @property
    def mean(self):
        return mean(self.scores.tolist())

    @property
    def median(self):
        return float(np.median(self.scores))

    @property
    def iqr(self):
        q1, q3 = np.percentile(self.scores, [25, 75])
        return float(q3 - q1)

    @property
    def minimum(self):
        return float(self.scores.min())

    @property
    def maximum(self):
        return float(self.scores.max())

    def trial_means(self):
        return [mean(scores) for scores in self.trial_scores]

    def row(self):
        return {'name': self.name, 'median': self.median, 'iqr': self.iqr, 'mean': self.mean,
                'min': self.minimum, 'max': self.maximum}


def _run_trial(tree, cfg, seed):
    population = [tree] * cfg.population_size
    result = run_episode(population, cfg.arena_map(), cfg.sim, cfg.library, cfg.fitness,
                         np.random.default_rng(seed), cfg.human_count)
    return score_population(result, population, cfg.fitness)


def evaluate(tree, cfg, trials=None, workers=None, name='tree'):
    """Score ``tree`` as a homogeneous population over independent trials.

    Trial ``t`` always uses the same seed for a given master seed, so the
    number of trials and workers never changes individual results.
    """
    compile_tree(tree, cfg.library)
    trials = trials or cfg.trials
    workers = btevolve_config.workers() if workers is None else workers
    streams = SeedStreams(cfg.seed)
    seeds = [streams.seed('trials', t) for t in range(trials)]
    started = time.perf_counter()
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=min(workers, trials)) as pool:
            results = list(pool.map(_run_trial, [tree] * trials, [cfg] * trials, seeds))
    else:
        results = [_run_trial(tree, cfg, seed) for seed in seeds]
    stats = EvaluationStats(name, results)
    logger.info('Evaluated %s over %d trials in %.1fs: median %.2f (IQR %.2f), mean %.2f',
                name, trials, time.perf_counter() - started, stats.median, stats.iqr, stats.mean)
    return stats


def compare(trees, cfg, trials=None, workers=None):
    """Evaluate each ``(name, tree)`` pair with the same seeds."""
    trees = list(trees)
    if len(trees) < 2:
        raise ConfigError('compare needs at least two trees')
    names = [name for name, _ in trees]
    if len(set(names)) != len(names):
        raise ConfigError('Tree names must be unique')
    return [evaluate(tree, cfg, trials, workers, name=name) for name, tree in trees]


COMPARISON_COLUMNS = ('name', 'median', 'iqr', 'mean', 'min', 'max')


def write_comparison(results, path):
    """Summary CSV at ``path`` plus every member score of every trial in ``<path>.trials.csv``."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=COMPARISON_COLUMNS)
        writer.writeheader()
        for stats in results:
            writer.writerow({key: repr(value) if isinstance(value, float) else value
                             for key, value in stats.row().items()})
    root, _ = os.path.splitext(path)
    trials_path = root + '.trials.csv'
    with open(trials_path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(('name', 'trial', 'member', 'score'))
        for stats in results:
            for trial, scores in enumerate(stats.trial_scores):
                for member, value in enumerate(scores):
                    writer.writerow((stats.name, trial, member, repr(value)))
    return trials_path


def trace_episode(tree, cfg, trial=0):
    """One episode of a homogeneous population, with the per-tick trace."""
    population = [tree] * cfg.population_size
    seed = SeedStreams(cfg.seed).seed('trials', trial)
    return run_episode(population, cfg.arena_map(), cfg.sim, cfg.library, cfg.fitness,
                       np.random.default_rng(seed), cfg.human_count, trace=True)


def effective_json(cfg):
    return json.dumps(cfg.to_dict(), indent=2, ensure_ascii=False) + '\n'


def all_idle_score(cfg, tree):
    """Score of a zombie that never moves nor deals damage for a whole episode."""
    ledger = cfg.fitness.ledger()
    ledger.register('z0')
    if ledger.declares('idle_ticks'):
        ledger.record_event('z0', 'idle_ticks', cfg.sim.ticks)
    return score(ledger, 'z0', tree.size(), cfg.fitness)

