"""Console entry point.

``btevolve`` runs the ``btevolve`` management command outside a Django
project, configuring bare settings when none are configured. Exit codes:
0 success, 1 usage error, 2 invalid config, library or tree, 3 any other
failure.
"""
import logging
import logging.config
import sys

import django
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError

from .exceptions import ChromosomeError, CompileError, ConfigError

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2, 3

LOG_LEVELS = {0: 'WARNING', 1: 'INFO', 2: 'DEBUG', 3: 'DEBUG'}


def configure_logging(verbosity):
    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'console': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
        },
        'handlers': {
            'console': {'class': 'logging.StreamHandler', 'formatter': 'console', 'stream': 'ext://sys.stderr'},
        },
        'loggers': {
            'btevolve': {'handlers': ['console'], 'level': LOG_LEVELS.get(verbosity, 'DEBUG'),
                         'propagate': False},
        },
    })


def setup():
    if not settings.configured:
        settings.configure(
            INSTALLED_APPS=['btevolve'],
            DATABASES={},
            LOGGING_CONFIG=None,
        )
    django.setup()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    setup()
    from .management.commands.btevolve import Command

    command = Command()
    command.configure_logging = configure_logging
    try:
        call_command(command, *argv)
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_USAGE
    except CommandError as e:
        sys.stderr.write('btevolve: error: %s\n' % e)
        return e.returncode if e.returncode != EXIT_OK else EXIT_USAGE
    except (ConfigError, ChromosomeError, CompileError) as e:
        sys.stderr.write('btevolve: invalid input: %s\n' % e)
        return EXIT_INVALID
    except Exception as e:
        logger.debug('Unhandled error', exc_info=True)
        sys.stderr.write('btevolve: %s: %s\n' % (type(e).__name__, e))
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
