import collections

from ..chromosome import serialize
from ..exceptions import ConfigError
from ..library import NodeLibrary
from ..operators import MutatorConfig
from ..selection import (SelectionConfig, elite_count, elites, next_generation, next_generation_random,
                         tournament_select)
from .testcase import BTEvolveTestCase, random_chromosome

ZERO = MutatorConfig(crossover_prob=0.0, point_prob=0.0)


class TournamentTest(BTEvolveTestCase):

    def test_full_tournament_picks_argmax(self):
        for _ in range(200):
            fitnesses = self.rng.normal(size=12).tolist()
            best = max(range(12), key=lambda i: fitnesses[i])
            self.assertEqual(tournament_select(fitnesses, 12, self.rng), best)

    def test_full_tournament_ties_are_uniform(self):
        fitnesses = [1.0, 5.0, 3.0, 5.0]
        counts = collections.Counter(tournament_select(fitnesses, 4, self.rng) for _ in range(4000))
        self.assertEqual(set(counts), {1, 3})
        self.assertAlmostEqual(counts[1] / 4000.0, 0.5, delta=0.04)

    def test_single_entrant_is_uniform(self):
        fitnesses = list(range(10))
        counts = collections.Counter(tournament_select(fitnesses, 1, self.rng) for _ in range(20000))
        for index in range(10):
            self.assertAlmostEqual(counts[index] / 20000.0, 0.1, delta=0.007)

    def test_best_of_eight(self):
        """P(best wins a 4-tournament of 8) = C(7,3) / C(8,4) = 0.5."""
        fitnesses = [float(f) for f in range(1, 9)]
        wins = sum(1 for _ in range(40000) if tournament_select(fitnesses, 4, self.rng) == 7)
        self.assertAlmostEqual(wins / 40000.0, 0.5, delta=0.008)

    def test_pressure_is_monotone(self):
        fitnesses = [float(f) for f in range(10)]
        counts = collections.Counter(tournament_select(fitnesses, 3, self.rng) for _ in range(50000))
        frequencies = [counts[i] for i in range(10)]
        self.assertEqual(frequencies, sorted(frequencies))


class ElitismTest(BTEvolveTestCase):

    def test_elite_count(self):
        self.assertEqual(elite_count(0.12, 50), 6)
        self.assertEqual(elite_count(0.12, 12), 2)
        self.assertEqual(elite_count(0.0, 50), 0)
        self.assertEqual(SelectionConfig(50).elite_count(), 6)

    def test_ties_go_to_lower_index(self):
        library = NodeLibrary.default()
        population = [random_chromosome(library, self.rng) for _ in range(4)]
        kept = elites(population, [2.0, 7.0, 7.0, 1.0], 2)
        self.assertEqual([serialize(c) for c in kept], [serialize(population[1]), serialize(population[2])])

    def test_config_bounds(self):
        with self.assertRaises(ConfigError):
            SelectionConfig(10, tournament_k=11)
        with self.assertRaises(ConfigError):
            SelectionConfig(10, tournament_k=0)
        with self.assertRaises(ConfigError):
            SelectionConfig(10, elitism_rate=1.0)


class NextGenerationTest(BTEvolveTestCase):

    def setUp(self):
        super(NextGenerationTest, self).setUp()
        self.library = NodeLibrary.default()

    def test_elites_survive_unmodified(self):
        """Over 200 generations the first six slots are the previous top six, byte for byte."""
        sel = SelectionConfig(50, tournament_k=4, elitism_rate=0.12)
        population = [random_chromosome(self.library, self.rng) for _ in range(50)]
        for generation in range(200):
            fitnesses = self.rng.normal(size=50).tolist()
            order = sorted(range(50), key=lambda i: (-fitnesses[i], i))
            top = [serialize(population[i]) for i in order[:6]]
            population = next_generation(population, fitnesses, sel, MutatorConfig(), self.library, self.rng,
                                         generation + 1)
            self.assertEqual(len(population), 50)
            self.assertEqual([serialize(c) for c in population[:6]], top)

    def test_whole_population_as_elites(self):
        sel = SelectionConfig(5, tournament_k=2, elitism_rate=0.99)
        population = [random_chromosome(self.library, self.rng) for _ in range(5)]
        fitnesses = [3.0, 1.0, 4.0, 1.5, 9.0]
        result = next_generation(population, fitnesses, sel, MutatorConfig(), self.library, self.rng)
        self.assertEqual([serialize(c) for c in result], [serialize(population[i]) for i in (4, 2, 0, 3, 1)])

    def test_children_come_from_members_without_operators(self):
        sel = SelectionConfig(20)
        population = [random_chromosome(self.library, self.rng) for _ in range(20)]
        members = set(serialize(c) for c in population)
        result = next_generation(population, self.rng.normal(size=20).tolist(), sel, ZERO, self.library, self.rng)
        self.assertTrue(all(serialize(c) in members for c in result))

    def test_generation_is_stamped(self):
        sel = SelectionConfig(10)
        population = [random_chromosome(self.library, self.rng) for _ in range(10)]
        result = next_generation(population, [0.0] * 10, sel, ZERO, self.library, self.rng, generation=7)
        self.assertTrue(all(c.generation_born == 7 for c in result[sel.elite_count():]))


class RandomGenerationTest(BTEvolveTestCase):

    def test_no_operators_keeps_positions(self):
        library = NodeLibrary.default()
        population = [random_chromosome(library, self.rng) for _ in range(15)]
        result = next_generation_random(population, ZERO, library, self.rng)
        self.assertEqual([serialize(c) for c in result], [serialize(c) for c in population])

    def test_size_preserved_with_operators(self):
        library = NodeLibrary.default()
        population = [random_chromosome(library, self.rng) for _ in range(15)]
        for _ in range(5):
            population = next_generation_random(population, MutatorConfig(crossover_prob=0.5, point_prob=0.2),
                                                library, self.rng)
            self.assertEqual(len(population), 15)
            for member in population:
                self.assertValidChromosome(member, library)
