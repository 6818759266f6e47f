"""Optional run registry.

When ``BTEVOLVE_RECORD_RUNS`` is enabled every evolution run and its
per-generation statistics are indexed in the database. The run directory
stays the primary record; these rows point at it.
"""
from django.db import models

from .config import MODES
from .managers import EvolutionRunManager, GenerationStatsQuerySet


class EvolutionRun(models.Model):
    name = models.CharField(max_length=100)
    mode = models.CharField(max_length=16, choices=[(mode, mode) for mode in MODES])
    seed = models.BigIntegerField()
    output_dir = models.CharField(max_length=500, unique=True)
    config = models.JSONField(default=dict)
    started = models.DateTimeField(auto_now_add=True)
    finished = models.DateTimeField(null=True, blank=True)
    best_tree = models.TextField(blank=True)

    objects = EvolutionRunManager()

    class Meta:
        ordering = ('-started',)

    def __str__(self):
        return '%s (%s, seed %d)' % (self.name, self.mode, self.seed)


class GenerationStats(models.Model):
    run = models.ForeignKey(EvolutionRun, related_name='generations', on_delete=models.CASCADE)
    generation = models.PositiveIntegerField()
    minimum = models.FloatField()
    mean = models.FloatField()
    maximum = models.FloatField()
    best_fitness = models.FloatField()
    best_tree = models.TextField(blank=True)

    objects = GenerationStatsQuerySet.as_manager()

    class Meta:
        ordering = ('run', 'generation')
        unique_together = (('run', 'generation'),)

    def __str__(self):
        return '%s generation %d' % (self.run, self.generation)
