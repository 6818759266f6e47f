import codecs
import os
import re

from setuptools import find_packages, setup

here = os.path.abspath(os.path.dirname(__file__))

with open('README.rst', 'r') as f_readme:
    with open('CHANGES', 'r') as f_changes:
        long_description = f_readme.read() + '\n\n' + f_changes.read()


def get_version(package_name):
    version_re = re.compile(r"^__version__ = [\"']([\w_.-]+)[\"']$")
    package_components = package_name.split('.')
    init_path = os.path.join(here, *(package_components + ['__init__.py']))
    with codecs.open(init_path, 'r', 'utf-8') as f:
        for line in f:
            match = version_re.match(line.strip())
            if match:
                return match.groups()[0]
    raise RuntimeError("Unable to find version string.")


version = get_version('btevolve')

setup(
    name='django-btevolve',
    packages=find_packages(exclude=['btevolve.tests']),
    version=version,
    description='Evolve behavior trees for game characters with genetic programming.',
    long_description=long_description,
    keywords=['django', 'behavior tree', 'genetic programming', 'game ai', 'npc'],
    classifiers=[
        'Framework :: Django',
        'Framework :: Django :: 3.2',
        'Framework :: Django :: 4.2',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Games/Entertainment',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Development Status :: 3 - Alpha',
    ],
    license='BSD',
    python_requires='>=3.8',
    install_requires=['Django>=3.2', 'numpy>=1.17', 'pydot>=1.4'],
    extras_require={'test': ['scipy>=1.5']},
    entry_points={'console_scripts': ['btevolve = btevolve.cli:main']},
    include_package_data=True,
)
