"""Seeded random streams.

One master seed feeds every random decision of a run. Each concern draws from
its own stream, derived with :class:`numpy.random.SeedSequence` spawn keys, so
that for instance running more evaluation trials never changes what evolution
does::

    >>> streams = SeedStreams(42)
    >>> rng = streams.generator('episodes', 7)   # episode of generation 7
"""
import numpy as np

STREAMS = {
    'seeding': 0,
    'evolution': 1,
    'episodes': 2,
    'trials': 3,
    'slots': 4,
}


class SeedStreams(object):

    def __init__(self, master_seed):
        self.master_seed = int(master_seed)

    def seed_sequence(self, stream, *index):
        spawn_key = (STREAMS[stream],) + tuple(int(i) for i in index)
        return np.random.SeedSequence(self.master_seed, spawn_key=spawn_key)

    def generator(self, stream, *index):
        return np.random.default_rng(self.seed_sequence(stream, *index))

    def seed(self, stream, *index):
        """A plain integer seed for the stream, handy for worker processes."""
        return int(self.seed_sequence(stream, *index).generate_state(1, np.uint64)[0])


def derive(rng, count):
    """Split ``count`` independent generators off ``rng``, in a fixed order."""
    seeds = rng.integers(0, 2 ** 63, size=count)
    return [np.random.default_rng(int(seed)) for seed in seeds]


def as_generator(rng_or_seed):
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)
