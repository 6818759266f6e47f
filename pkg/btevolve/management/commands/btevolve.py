import argparse
import os

from django.core.management.base import BaseCommand, CommandError

from btevolve import experiment
from btevolve.arena.simulation import write_trace
from btevolve.behavior_tree import compile_tree
from btevolve.config import BASELINE
from btevolve.dot import export_dot, outline
from btevolve.exceptions import ChromosomeError, CompileError, ConfigError
from btevolve.library import validate as validate_library

CONFIG_HELP = 'Experiment config: a preset name (%s) or a JSON file.' % ', '.join(experiment.PRESET_CONFIGS)


class Command(BaseCommand):
    help = 'Evolve, evaluate and inspect zombie behavior trees.'
    requires_system_checks = []
    # Set by btevolve.cli.main, which owns the process and its logging.
    configure_logging = None

    def add_arguments(self, parser):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--output', '-o', help='Output directory or file.')
        common.add_argument('--seed', type=int, help='Master seed, replacing experiment.seed.')
        common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                            help='Override a config value by dotted key; repeatable.')
        common.add_argument('--workers', type=int, help='Parallel evaluation processes.')

        subparsers = parser.add_subparsers(dest='subcommand', title='subcommands', required=True)
        for name, help_text in (('evolve', 'Run evolution.'), ('baseline', 'Run the random baseline.')):
            sub = subparsers.add_parser(name, parents=[common], help=help_text)
            sub.add_argument('config', nargs='?', default=experiment.DEFAULT_PRESET, help=CONFIG_HELP)
            sub.add_argument('--runs', type=int, default=1, help='Independent runs with consecutive seeds.')

        sub = subparsers.add_parser('evaluate', parents=[common], help='Evaluate one tree over many trials.')
        sub.add_argument('config', nargs='?', default=experiment.DEFAULT_PRESET, help=CONFIG_HELP)
        sub.add_argument('--tree', required=True, help='Tree file or bundled tree name.')
        sub.add_argument('--trials', type=int, help='Number of trials (default: experiment.trials).')

        sub = subparsers.add_parser('compare', parents=[common], help='Evaluate and tabulate several trees.')
        sub.add_argument('config', nargs='?', default=experiment.DEFAULT_PRESET, help=CONFIG_HELP)
        sub.add_argument('--tree', dest='trees', action='append', required=True, metavar='NAME=FILE',
                         help='Named tree; give at least two.')
        sub.add_argument('--trials', type=int, help='Number of trials (default: experiment.trials).')

        sub = subparsers.add_parser('trace', parents=[common], help='Write a per-tick CSV trace of one episode.')
        sub.add_argument('config', nargs='?', default=experiment.DEFAULT_PRESET, help=CONFIG_HELP)
        sub.add_argument('--tree', required=True, help='Tree file or bundled tree name.')
        sub.add_argument('--trial', type=int, default=0, help='Trial index selecting the episode seed.')

        sub = subparsers.add_parser('validate', parents=[common], help='Check a config and its documents.')
        sub.add_argument('config', nargs='?', default=experiment.DEFAULT_PRESET, help=CONFIG_HELP)
        sub.add_argument('--print-effective', action='store_true', help='Print the effective config JSON.')

        sub = subparsers.add_parser('export-dot', help='Print a Graphviz document of a tree.')
        sub.add_argument('tree', help='Tree file or bundled tree name.')
        sub.add_argument('--output', '-o', help='Write to this file instead of stdout.')

        sub = subparsers.add_parser('inspect', help='Print a text outline of a tree.')
        sub.add_argument('tree', help='Tree file or bundled tree name.')

    def handle(self, *args, **options):
        if self.configure_logging:
            self.configure_logging(options['verbosity'])
        handler = getattr(self, 'handle_%s' % options['subcommand'].replace('-', '_'))
        try:
            handler(options)
        except (ConfigError, ChromosomeError, CompileError) as e:
            raise CommandError(str(e), returncode=2)

    def load_config(self, options):
        return experiment.load_config(options['config'], options['overrides'], options['seed'])

    def handle_evolve(self, options, mode=None):
        cfg = self.load_config(options)
        if mode:
            cfg = cfg.replace(mode=mode)
        if options['runs'] < 1:
            raise CommandError('--runs must be at least 1')
        for log in experiment.evolve_runs(cfg, options['runs'], options['output']):
            record = log.records[-1]
            self.stdout.write('%s: %d generations, final mean %.2f, best tree %s' % (
                log.directory, len(log), record.mean, os.path.join(log.directory, 'best.btree.json')))

    def handle_baseline(self, options):
        self.handle_evolve(options, mode=BASELINE)

    def handle_evaluate(self, options):
        cfg = self.load_config(options)
        tree = experiment.resolve_tree(options['tree'])
        stats = experiment.evaluate(tree, cfg, options['trials'], options['workers'], name=options['tree'])
        self.write_table([stats])
        if options['output']:
            experiment.write_comparison([stats], options['output'])

    def handle_compare(self, options):
        cfg = self.load_config(options)
        trees = []
        for item in options['trees']:
            if '=' not in item:
                raise CommandError('--tree expects NAME=FILE, got %r' % item)
            name, path = item.split('=', 1)
            trees.append((name, experiment.resolve_tree(path)))
        results = experiment.compare(trees, cfg, options['trials'], options['workers'])
        self.write_table(results)
        path = options['output'] or os.path.join(experiment.default_output_dir(cfg), 'comparison.csv')
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        trials_path = experiment.write_comparison(results, path)
        self.stdout.write('Wrote %s and %s' % (path, trials_path))

    def write_table(self, results):
        self.stdout.write('%-24s %10s %10s %10s %10s %10s' % ('name', 'median', 'iqr', 'mean', 'min', 'max'))
        for stats in results:
            self.stdout.write('%-24s %10.2f %10.2f %10.2f %10.2f %10.2f' % (
                stats.name, stats.median, stats.iqr, stats.mean, stats.minimum, stats.maximum))

    def handle_trace(self, options):
        cfg = self.load_config(options)
        tree = experiment.resolve_tree(options['tree'])
        result = experiment.trace_episode(tree, cfg, options['trial'])
        path = options['output'] or os.path.join(experiment.default_output_dir(cfg), 'trace.csv')
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        write_trace(result.trace, path)
        self.stdout.write('Wrote %d rows to %s' % (len(result.trace), path))

    def handle_validate(self, options):
        cfg = self.load_config(options)
        issues = validate_library(cfg.library)
        if issues:
            for issue in issues:
                self.stderr.write('%s %s: %s' % (issue.code, issue.node_id, issue.message))
            raise CommandError('The node library has %d problem(s)' % len(issues), returncode=2)
        compile_tree(cfg.initial_tree, cfg.library)
        if options['print_effective']:
            self.stdout.write(experiment.effective_json(cfg), ending='')
        else:
            self.stdout.write('OK')

    def handle_export_dot(self, options):
        text = export_dot(experiment.resolve_tree(options['tree']))
        if options['output']:
            with open(options['output'], 'w', encoding='utf-8') as f:
                f.write(text)
        else:
            self.stdout.write(text, ending='')

    def handle_inspect(self, options):
        self.stdout.write(outline(experiment.resolve_tree(options['tree'])), ending='')
