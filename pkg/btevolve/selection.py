"""Parent selection and generational replacement."""
import logging
import math
from dataclasses import asdict, dataclass

from .config import DEFAULT_ELITISM_RATE, DEFAULT_TOURNAMENT_K
from .exceptions import ConfigError
from .operators import make_child
from .rng import derive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionConfig:
    population_size: int
    tournament_k: int = DEFAULT_TOURNAMENT_K
    elitism_rate: float = DEFAULT_ELITISM_RATE

    def __post_init__(self):
        if not 1 <= self.tournament_k <= self.population_size:
            raise ConfigError('selection.tournament_k must lie in [1, population size]')
        if not 0.0 <= self.elitism_rate < 1.0:
            raise ConfigError('selection.elitism_rate must lie in [0, 1)')

    def elite_count(self):
        return elite_count(self.elitism_rate, self.population_size)

    def to_dict(self):
        data = asdict(self)
        del data['population_size']
        return data


def elite_count(rate, population_size):
    # Rounded first so that 0.12 * 50 gives 6, not 7.
    return min(population_size, int(math.ceil(round(rate * population_size, 9))))


def tournament_select(fitnesses, k, rng):
    """Index of the fittest of ``k`` members drawn without replacement.

    Ties among the entrants are broken uniformly at random.
    """
    entrants = rng.choice(len(fitnesses), size=k, replace=False)
    best = max(fitnesses[i] for i in entrants)
    tied = sorted(int(i) for i in entrants if fitnesses[i] == best)
    if len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(len(tied)))]


def elites(population, fitnesses, count):
    """Copies of the ``count`` fittest members; ties go to the lower index."""
    order = sorted(range(len(population)), key=lambda i: (-fitnesses[i], i))
    return [population[i].deep_copy() for i in order[:count]]


def next_generation(population, fitnesses, sel, mut, library, rng, generation=None):
    """Elites first, then children of independent tournament winners."""
    size = len(population)
    assert size == len(fitnesses) == sel.population_size, 'Population and fitness sizes differ'
    count = sel.elite_count()
    if count == size:
        logger.warning('Elitism rate %s keeps the whole population of %d', sel.elitism_rate, size)
    result = elites(population, fitnesses, count)

    pairs = [
        (tournament_select(fitnesses, sel.tournament_k, rng), tournament_select(fitnesses, sel.tournament_k, rng))
        for _ in range(size - count)
    ]
    for (primary, donor), slot_rng in zip(pairs, derive(rng, len(pairs))):
        child = make_child(population[primary], population[donor], mut, library, slot_rng)
        if generation is not None:
            child.generation_born = generation
        result.append(child)
    return result


def next_generation_random(population, mut, library, rng, generation=None):
    """Reproduce every member with a random donor, ignoring fitness entirely."""
    size = len(population)
    assert size, 'The population is empty'
    donors = [int(rng.integers(size)) for _ in range(size)]
    result = []
    for member, donor, slot_rng in zip(population, donors, derive(rng, size)):
        child = make_child(member, population[donor], mut, library, slot_rng)
        if generation is not None:
            child.generation_born = generation
        result.append(child)
    return result
