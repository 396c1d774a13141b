# Copyright (c) 2024, hinrec developers
# All rights reserved.
#
# This file is part of hinrec
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions are met:
#
#     1. Redistributions of source code must retain the above copyright
#        notice, this list of conditions and the following disclaimer.
#     2. Redistributions in binary form must reproduce the above copyright
#        notice, this list of conditions and the following disclaimer in the
#        documentation and/or other materials provided with the distribution.
#     3. Neither the name of the copyright holder nor the names of
#        its contributors may be used to endorse or promote products
#        derived from this software without specific prior written permission.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND
# ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED
# WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE
# DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY
# DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES
# (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES;
# LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND
# ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT
# (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS
# SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

from pathlib import Path

import pytest

from hinrec.apps import sanitize_config
from hinrec.apps.train import train_run
from hinrec.core.graph import build_graph
from hinrec.core.types import MetaRelation
from hinrec.data import prepare_dataset
from hinrec.io.utils import load_dataset
from hinrec.train import TrainConfig

DATA_PATH = Path(__file__).parent / 'data'
TOY_MANIFEST = DATA_PATH / 'toy' / 'manifest.yaml'
TOY_FRACTIONS = (0.6, 0.2, 0.2)

INTERACT = MetaRelation('user', 'interact', 'item')
INTERACTED_BY = MetaRelation('item', 'interacted_by', 'user')
BRAND_OF = MetaRelation('brand', 'brand_of', 'item')
HAS_BRAND = MetaRelation('item', 'has_brand', 'brand')

TOY_INTERACTIONS = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (0, 3)]
TOY_BRANDS = [(0, 0), (0, 1), (1, 2), (1, 3)]


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run long-running experiments')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long-running experiment, needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def toy_graph():
    """3 users, 4 items and 2 brands, with both directions of every relation."""
    return build_graph(
        {'user': 3, 'item': 4, 'brand': 2},
        {INTERACT: TOY_INTERACTIONS,
         INTERACTED_BY: [(i, u) for u, i in TOY_INTERACTIONS],
         BRAND_OF: TOY_BRANDS,
         HAS_BRAND: [(i, b) for b, i in TOY_BRANDS]})


@pytest.fixture
def graph():
    return toy_graph()


def toy_dataset():
    """The dataset of ``data/toy``: 4 users with 3 training, 1 valid and 1 test interaction."""
    graph, log = load_dataset(TOY_MANIFEST)
    return prepare_dataset(graph, log, fractions=TOY_FRACTIONS)


def tiny_config(**overrides):
    """Training hyper-parameters small enough for unit tests."""
    values = dict(learning_rate=0.01, batch_size=10, negative_ratio=1, max_epochs=3,
                  patience=5, fanouts=3, eval_negatives=2, topn=2, d_in=4, d_out=(4,),
                  n_aspects=(2,), n_iterations=2)
    values.update(overrides)
    return TrainConfig(**values)


@pytest.fixture
def dataset():
    return toy_dataset()


def toy_run_config(**sections):
    """A run config over ``data/toy`` with a one-layer model; ``sections`` update sections."""
    config = {
        'seed': 0,
        'dataset': {'manifest': str(TOY_MANIFEST), 'fractions': list(TOY_FRACTIONS)},
        'model': {'n_layers': 1, 'd_in': 4, 'd_out': 4, 'n_aspects': 2, 'n_iterations': 2},
        'train': {'learning_rate': 0.01, 'batch_size': 10, 'negative_ratio': 1,
                  'max_epochs': 3, 'patience': 5, 'fanouts': 3},
        'eval': {'negatives': 2, 'topn': 2},
    }
    for name, values in sections.items():
        config[name].update(values)
    return config


@pytest.fixture(scope='session')
def trained_run(tmp_path_factory):
    """Directory of a short training run on the toy dataset."""
    return train_run(sanitize_config(toy_run_config()), tmp_path_factory.mktemp('run'))
