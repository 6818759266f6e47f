"""On-disk record of an evolution run.

A run directory holds::

    config.json              effective experiment config
    fitness.csv              generation,min,mean,max
    members.csv              generation,member,fitness,size
    best/gen-0000.btree.json best member of each generation
    best.btree.json          the tree picked by select_best, once finished

Files are appended to after every generation, so a killed run leaves a
readable log up to its last complete generation.
"""
import csv
import json
import math
import os
from collections import namedtuple

from .chromosome import Chromosome
from .config import CHROMOSOME_SUFFIX

FITNESS_COLUMNS = ('generation', 'min', 'mean', 'max')
MEMBER_COLUMNS = ('generation', 'member', 'fitness', 'size')


def mean(values):
    return math.fsum(values) / len(values)


def best_index(fitnesses):
    """Index of the highest fitness; ties go to the lower index."""
    return max(range(len(fitnesses)), key=lambda i: (fitnesses[i], -i))


class GenerationRecord(namedtuple('GenerationRecord', ['generation', 'fitnesses', 'sizes', 'best'])):

    @property
    def minimum(self):
        return min(self.fitnesses)

    @property
    def maximum(self):
        return max(self.fitnesses)

    @property
    def mean(self):
        return mean(self.fitnesses)

    @property
    def best_index(self):
        return best_index(self.fitnesses)

    def summary(self):
        return {'generation': self.generation, 'min': self.minimum, 'mean': self.mean, 'max': self.maximum}


class RunLog(object):

    def __init__(self, config=None, seed=None, records=None, best=None, directory=None):
        self.config = config
        self.seed = seed
        self.records = list(records or [])
        self.best = best
        self.directory = directory

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, record):
        assert record.generation == len(self.records), 'Generations must be logged in order'
        if self.records:
            assert len(record.fitnesses) == len(self.records[0].fitnesses), 'Population size changed'
        self.records.append(record)

    def means(self):
        return [record.mean for record in self.records]

    @classmethod
    def load(cls, directory):
        """Read a run directory, stopping at the last complete generation."""
        config, seed = None, None
        config_path = os.path.join(directory, 'config.json')
        if os.path.exists(config_path):
            with open(config_path, 'r', encoding='utf-8') as f:
                config = json.load(f)
            seed = config.get('experiment', {}).get('seed')

        with open(os.path.join(directory, 'fitness.csv'), 'r', newline='', encoding='utf-8') as f:
            generations = [int(row['generation']) for row in csv.DictReader(f) if row.get('max')]

        members = {}
        with open(os.path.join(directory, 'members.csv'), 'r', newline='', encoding='utf-8') as f:
            for row in csv.DictReader(f):
                if row.get('size'):
                    members.setdefault(int(row['generation']), []).append(
                        (int(row['member']), float(row['fitness']), int(row['size'])))

        log = cls(config, seed, directory=directory)
        for generation in generations:
            if generation != len(log.records) or generation not in members:
                break
            rows = sorted(members[generation])
            best_path = os.path.join(directory, 'best', 'gen-%04d%s' % (generation, CHROMOSOME_SUFFIX))
            best = Chromosome.load(best_path) if os.path.exists(best_path) else None
            log.append(GenerationRecord(generation, [r[1] for r in rows], [r[2] for r in rows], best))

        best_path = os.path.join(directory, 'best' + CHROMOSOME_SUFFIX)
        if os.path.exists(best_path):
            log.best = Chromosome.load(best_path)
        return log


class RunLogWriter(object):
    """Writes a :class:`RunLog` to disk as it grows."""

    def __init__(self, directory, config, seed=None):
        self.directory = directory
        self.log = RunLog(config, seed, directory=directory)
        os.makedirs(os.path.join(directory, 'best'), exist_ok=True)
        with open(os.path.join(directory, 'config.json'), 'w', encoding='utf-8') as f:
            f.write(json.dumps(config, indent=2, ensure_ascii=False) + '\n')
        for name, columns in (('fitness.csv', FITNESS_COLUMNS), ('members.csv', MEMBER_COLUMNS)):
            with open(os.path.join(directory, name), 'w', newline='', encoding='utf-8') as f:
                csv.writer(f).writerow(columns)

    def write(self, record):
        self.log.append(record)
        if record.best is not None:
            record.best.save(os.path.join(
                self.directory, 'best', 'gen-%04d%s' % (record.generation, CHROMOSOME_SUFFIX)))
        with open(os.path.join(self.directory, 'members.csv'), 'a', newline='', encoding='utf-8') as f:
            csv.writer(f).writerows(
                (record.generation, index, repr(fitness), size)
                for index, (fitness, size) in enumerate(zip(record.fitnesses, record.sizes))
            )
        with open(os.path.join(self.directory, 'fitness.csv'), 'a', newline='', encoding='utf-8') as f:
            csv.writer(f).writerow((record.generation, repr(record.minimum), repr(record.mean),
                                    repr(record.maximum)))
        return record

    def finish(self, best):
        self.log.best = best
        best.save(os.path.join(self.directory, 'best' + CHROMOSOME_SUFFIX))
        return self.log
