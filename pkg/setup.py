""" Distribution configuration for hinrec
"""
# pylint: disable=R0801
from setuptools import find_packages, setup


setup(
    description='hinrec: disentangled heterogeneous graph attention for top-N recommendation',
    author='hinrec developers',
    install_requires=[
        'click>=7.0',
        'numpy>=1.20.0',
        'pandas>=1.0.5',
        'pyyaml>=3.10',
        'scipy>=1.4.0',
        'setuptools',
        'tqdm>=4.8.4',
    ],
    packages=find_packages(exclude=('tests', 'tests.*')),
    license='BSD',
    entry_points={
        'console_scripts': ['hinrec=hinrec.apps.cli:cli']
    },
    name='hinrec',
    version='0.1.0',
    extras_require={
        'docs': [
            'sphinx-bluebrain-theme',
            'sphinx-autorun',
        ],
    },
    package_data={'hinrec.apps': ['config/*.yaml']},
    include_package_data=True,
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
)
