#!/usr/bin/env python
import os
import sys

import django
from django.conf import settings
from django.test.utils import get_runner

if __name__ == '__main__':
    os.environ['DJANGO_SETTINGS_MODULE'] = 'btevolve.tests.settings'
    args = sys.argv[1:]
    if '--slow' in args:
        args.remove('--slow')
        os.environ['BTEVOLVE_SLOW_TESTS'] = '1'
    django.setup()
    TestRunner = get_runner(settings)
    exclude_tags = [] if os.environ.get('BTEVOLVE_SLOW_TESTS') == '1' else ['slow']
    test_runner = TestRunner(exclude_tags=exclude_tags)
    tests = args or ['btevolve.tests']
    failures = test_runner.run_tests(tests)
    sys.exit(bool(failures))
