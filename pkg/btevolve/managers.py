from django.db import models


class GenerationStatsQuerySet(models.QuerySet):
    """Queries over logged generations."""

    def best(self):
        """The generation ``select_best`` would pick from: highest mean, later generation on ties.

        Returns ``None`` on an empty queryset.
        """
        return self.order_by('-mean', '-generation').first()

    def curve(self):
        """``(generation, mean)`` pairs in generation order."""
        return self.order_by('generation').values_list('generation', 'mean')


class EvolutionRunQuerySet(models.QuerySet):

    def finished(self):
        return self.filter(finished__isnull=False)

    def unfinished(self):
        return self.filter(finished__isnull=True)


class EvolutionRunManager(models.Manager):
    """Default manager of :class:`btevolve.models.EvolutionRun`.

        >>> EvolutionRun.objects.finished().filter(mode='baseline')
    """

    _queryset_class = EvolutionRunQuerySet

    def __init__(self, queryset_class=None, *args, **kwargs):
        super(EvolutionRunManager, self).__init__(*args, **kwargs)
        if queryset_class:
            self._queryset_class = queryset_class

    def get_queryset(self):
        return self._queryset_class(self.model, using=self._db)

    def finished(self):
        return self.get_queryset().finished()

    def unfinished(self):
        return self.get_queryset().unfinished()
