"""Write runs to the registry models when BTEVOLVE_RECORD_RUNS is enabled."""
import logging

from django.dispatch import receiver
from django.utils import timezone

from .config import record_runs
from .signals import generation_evaluated, run_finished, run_started

logger = logging.getLogger(__name__)


@receiver(run_started)
def record_run_started(sender, run_id, config, **kwargs):
    if not record_runs():
        return
    from .models import EvolutionRun
    EvolutionRun.objects.update_or_create(output_dir=run_id, defaults={
        'name': config.name,
        'mode': config.mode,
        'seed': config.seed,
        'config': config.to_dict(),
        'finished': None,
        'best_tree': '',
    })
    logger.debug('Recorded start of run %s', run_id)


@receiver(generation_evaluated)
def record_generation(sender, run_id, record, **kwargs):
    if not record_runs():
        return
    from .models import EvolutionRun, GenerationStats
    run = EvolutionRun.objects.get(output_dir=run_id)
    GenerationStats.objects.update_or_create(run=run, generation=record.generation, defaults={
        'minimum': record.minimum,
        'mean': record.mean,
        'maximum': record.maximum,
        'best_fitness': record.maximum,
        'best_tree': record.best.serialize() if record.best is not None else '',
    })


@receiver(run_finished)
def record_run_finished(sender, run_id, log, best, **kwargs):
    if not record_runs():
        return
    from .models import EvolutionRun
    EvolutionRun.objects.filter(output_dir=run_id).update(
        finished=timezone.now(),
        best_tree=best.serialize() if best is not None else '',
    )
