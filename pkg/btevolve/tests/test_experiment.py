import csv
import filecmp
import json
import os

import numpy as np

from ..arena.simulation import SimConfig
from ..chromosome import Chromosome, composite, serialize, task
from ..config import BASELINE
from ..exceptions import ConfigError
from ..experiment import (EvaluationStats, ExperimentConfig, all_idle_score, compare, evaluate,
                          evaluate_population, evolve, evolve_runs, load_config, load_tree_preset,
                          select_best, select_best_index, trace_episode, write_comparison)
from ..operators import MutatorConfig
from ..runlog import GenerationRecord, RunLog
from .testcase import BTEvolveTestCase

SMALL_MAP = '\n'.join([
    'name: room',
    'size: 8x6',
    '########',
    '#Z..W..#',
    '#..##..#',
    '#W....H#',
    '#Z.....#',
    '########',
])


def tiny_config(**changes):
    settings = dict(name='tiny', map='small', zombie_count=4, human_count=1, generations=2, seed=3, trials=2,
                    sim=SimConfig(episode_length=2.0))
    settings.update(changes)
    return ExperimentConfig(**settings)


def synthetic_log(fitness_rows):
    placeholder = Chromosome(composite('selector'))
    return RunLog(records=[
        GenerationRecord(generation, list(fitnesses), [1] * len(fitnesses), placeholder)
        for generation, fitnesses in enumerate(fitness_rows)
    ])


def brute_force_best(fitness_rows):
    means = [sum(row) / len(row) for row in fitness_rows]
    generation = max(g for g, m in enumerate(means) if m == max(means))
    row = fitness_rows[generation]
    return generation, min(i for i, f in enumerate(row) if f == max(row))


class LoadConfigTest(BTEvolveTestCase):

    def test_preset(self):
        cfg = load_config('desk')
        self.assertEqual((cfg.name, cfg.map, cfg.zombie_count, cfg.generations), ('desk', 'medium', 12, 150))
        self.assertEqual(cfg.selection.elite_count(), 2)
        self.assertEqual(cfg.sim.ticks, 600)
        self.assertEqual((cfg.mutators.crossover_prob, cfg.mutators.point_prob), (0.3, 0.04))
        self.assertEqual(cfg.mutators.init_point_prob_target, 0.8)
        self.assertEqual(load_config('full-medium').mutators, MutatorConfig())

    def test_full_presets(self):
        counts = {}
        for name in ('full-small', 'full-medium', 'full-large'):
            cfg = load_config(name)
            counts[name] = (cfg.map, cfg.zombie_count, cfg.human_count)
            self.assertEqual((cfg.generations, cfg.sim.episode_length), (1000, 90.0))
        self.assertEqual(counts, {
            'full-small': ('small', 20, 3),
            'full-medium': ('medium', 50, 6),
            'full-large': ('large', 40, 12),
        })

    def test_overrides(self):
        cfg = load_config('desk', ['experiment.zombie_count=4', 'sim.episode_length=2.0',
                                   'selection.elitism_rate=0.5'], seed=9)
        self.assertEqual(cfg.zombie_count, 4)
        self.assertEqual(cfg.sim.ticks, 20)
        self.assertEqual(cfg.selection.elite_count(), 2)
        self.assertEqual(cfg.seed, 9)

    def test_bad_overrides(self):
        for override in ('experiment.colour=red', 'sim', 'nothing.here=1', 'experiment.zombie_count=1',
                         'experiment.mode="sideways"'):
            with self.assertRaises(ConfigError):
                load_config('desk', [override])

    def test_effective_config_round_trip(self):
        cfg = load_config('desk')
        again = ExperimentConfig.from_dict(cfg.to_dict())
        self.assertEqual(again.to_dict(), cfg.to_dict())
        self.assertEqual(json.loads(json.dumps(cfg.to_dict())), cfg.to_dict())

    def test_relative_documents(self):
        directory = self.make_tempdir()
        with open(os.path.join(directory, 'room.map'), 'w') as f:
            f.write(SMALL_MAP)
        load_tree_preset('manual-r1').save(os.path.join(directory, 'start.btree.json'))
        with open(os.path.join(directory, 'run.json'), 'w') as f:
            json.dump({
                'experiment': {'name': 'room', 'map': 'room.map', 'zombie_count': 2},
                'selection': {'tournament_k': 2},
                'initial_tree': {'path': 'start.btree.json'},
            }, f)
        cfg = load_config(os.path.join(directory, 'run.json'))
        self.assertEqual(cfg.arena_map().name, 'room')
        self.assertEqual(cfg.initial_tree, load_tree_preset('manual-r1'))

    def test_invalid_documents(self):
        with self.assertRaises(ConfigError):
            load_config('/nonexistent/config.json')
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'experiment': {}, 'extras': {}})
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'experiment': {'map': '/nonexistent.map'}}).arena_map()
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'fitness': {'preset': 'harsh'}})
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({'initial_tree': {'root': {'kind': 'task', 'id': 'idle'}}})


class SelectBestTest(BTEvolveTestCase):

    def test_highest_mean_generation(self):
        log = synthetic_log([[1.0], [9.0], [3.0]])
        self.assertEqual(select_best_index(log), (1, 0))
        self.assertIs(select_best(log), log.records[1].best)

    def test_single_generation(self):
        self.assertEqual(select_best_index(synthetic_log([[2.0, 7.0, 7.0, 1.0]])), (0, 1))

    def test_ties_prefer_later_generation(self):
        self.assertEqual(select_best_index(synthetic_log([[5.0, 1.0], [3.0, 3.0], [2.0, 4.0]])), (2, 1))

    def test_matches_brute_force(self):
        for _ in range(500):
            rows = self.rng.integers(0, 5, size=(int(self.rng.integers(1, 8)), 4)).astype(float).tolist()
            self.assertEqual(select_best_index(synthetic_log(rows)), brute_force_best(rows))


class EvolveTest(BTEvolveTestCase):

    def test_zero_generations(self):
        directory = self.make_tempdir()
        log = evolve(tiny_config(generations=0), directory)
        self.assertEqual(len(log), 1)
        self.assertEqual(len(log.records[0].fitnesses), 4)
        self.assertTrue(os.path.exists(os.path.join(directory, 'best.btree.json')))
        self.assertEqual(serialize(log.best), serialize(log.records[0].best))

    def test_run_log_on_disk(self):
        directory = self.make_tempdir()
        log = evolve(tiny_config(), directory)
        self.assertEqual([r.generation for r in log], [0, 1, 2])
        loaded = RunLog.load(directory)
        self.assertEqual(loaded.means(), log.means())
        self.assertEqual(loaded.seed, 3)
        self.assertEqual(loaded.best, log.best)
        self.assertEqual([r.sizes for r in loaded], [r.sizes for r in log])
        with open(os.path.join(directory, 'fitness.csv')) as f:
            rows = list(csv.DictReader(f))
        self.assertEqual([float(row['mean']) for row in rows], log.means())

    def test_killed_run_loads_complete_generations(self):
        directory = self.make_tempdir()
        evolve(tiny_config(), directory)
        path = os.path.join(directory, 'fitness.csv')
        with open(path) as f:
            lines = f.read().splitlines()
        with open(path, 'w') as f:
            f.write('\n'.join(lines[:3] + ['2,-1.0']) + '\n')
        self.assertEqual(len(RunLog.load(directory)), 2)

    def test_reproducible(self):
        first, second = self.make_tempdir(), self.make_tempdir()
        evolve(tiny_config(), first)
        evolve(tiny_config(), second)
        names = ['config.json', 'fitness.csv', 'members.csv', 'best.btree.json'] + \
            ['best/gen-%04d.btree.json' % g for g in range(3)]
        match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
        self.assertEqual((mismatch, errors), ([], []))

    def test_baseline(self):
        log = evolve(tiny_config(mode=BASELINE), self.make_tempdir())
        self.assertEqual(len(log), 3)
        self.assertEqual(log.config['experiment']['mode'], BASELINE)

    def test_consecutive_seeds(self):
        directory = self.make_tempdir()
        logs = evolve_runs(tiny_config(generations=0), 2, directory)
        self.assertEqual([log.seed for log in logs], [3, 4])
        self.assertEqual(sorted(os.listdir(directory)), ['run-0', 'run-1'])

    def test_uncompilable_member_is_floor_scored(self):
        cfg = tiny_config()
        population = [Chromosome(composite('selector', task('no_such_task')))] + [cfg.initial_tree] * 3
        fitnesses = evaluate_population(population, cfg, np.random.default_rng(1))
        self.assertEqual(fitnesses[0], cfg.fitness.floor_score)
        self.assertTrue(all(f > cfg.fitness.floor_score for f in fitnesses[1:]))


class EvaluateTest(BTEvolveTestCase):

    def test_do_nothing_scores_all_idle(self):
        cfg = tiny_config(human_count=0)
        tree = load_tree_preset('do-nothing')
        stats = evaluate(tree, cfg, trials=2, workers=1)
        self.assertEqual(stats.scores.tolist(), [all_idle_score(cfg, tree)] * 8)
        self.assertEqual(all_idle_score(load_config('desk'), tree), -375.0)

    def test_workers_do_not_change_results(self):
        cfg = tiny_config()
        tree = load_tree_preset('manual-r3')
        single = evaluate(tree, cfg, trials=3, workers=1)
        pooled = evaluate(tree, cfg, trials=3, workers=2)
        self.assertEqual(single.trial_scores, pooled.trial_scores)
        self.assertEqual(evaluate(tree, cfg, trials=2, workers=1).trial_scores, single.trial_scores[:2])

    def test_compare(self):
        cfg = tiny_config()
        tree = load_tree_preset('manual-r1')
        results = compare([('a', tree), ('b', tree.deep_copy())], cfg, trials=2, workers=1)
        path = os.path.join(self.make_tempdir(), 'comparison.csv')
        trials_path = write_comparison(results, path)
        with open(path) as f:
            rows = list(csv.DictReader(f))
        self.assertEqual([row.pop('name') for row in rows], ['a', 'b'])
        self.assertEqual(rows[0], rows[1])
        with open(trials_path) as f:
            self.assertEqual(len(list(csv.DictReader(f))), 2 * 2 * cfg.zombie_count)

    def test_compare_needs_distinct_trees(self):
        tree = load_tree_preset('manual-r1')
        with self.assertRaises(ConfigError):
            compare([('a', tree)], tiny_config())
        with self.assertRaises(ConfigError):
            compare([('a', tree), ('a', tree)], tiny_config())

    def test_statistics(self):
        for _ in range(200):
            scores = self.rng.normal(size=(int(self.rng.integers(1, 5)), int(self.rng.integers(1, 6)))).tolist()
            stats = EvaluationStats('x', scores)
            flat = sorted(s for row in scores for s in row)
            middle = len(flat) // 2
            median = flat[middle] if len(flat) % 2 else (flat[middle - 1] + flat[middle]) / 2
            self.assertAlmostEqual(stats.median, median)
            self.assertEqual((stats.minimum, stats.maximum), (flat[0], flat[-1]))
            self.assertGreaterEqual(stats.iqr, 0.0)

    def test_trace(self):
        cfg = tiny_config()
        result = trace_episode(load_tree_preset('manual-r1'), cfg)
        self.assertEqual(len(result.trace), cfg.sim.ticks * (cfg.zombie_count + cfg.human_count))
