#!/usr/bin/env python3

from setuptools import setup

setup(name='apdiff',
      version='0.1.0',
      description='Cut-and-project combs, modulations and their pure point '
      'diffraction',
      packages=['apdiff'],
      install_requires=['numpy', 'scipy', 'PyYAML'],
      scripts=['runapdiff'],
)
