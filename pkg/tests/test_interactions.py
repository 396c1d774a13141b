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

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal

from hinrec.data import Dataset, chronological_split, prepare_dataset, training_graph
from hinrec.data.interactions import InteractionLog
from hinrec.exceptions import DataError
from hinrec.io.utils import load_dataset

from tests.conftest import INTERACT, INTERACTED_BY, TOY_MANIFEST


def _log(n, n_users=5, n_items=7, timestamps=None):
    rng = np.random.default_rng(0)
    users, items = rng.integers(n_users, size=n), rng.integers(n_items, size=n)
    return InteractionLog.from_arrays(users, items, n_users, n_items, INTERACT,
                                      timestamps=timestamps, inverse=INTERACTED_BY)


def test_log_basics():
    log = _log(10)
    assert len(log) == 10
    assert log.user_type == 'user'
    assert log.item_type == 'item'
    assert not log.is_split
    assert_array_equal(log.timestamps, np.arange(10.))
    by_user = log.items_by_user()
    assert len(by_user) == 5
    assert sum(len(items) for items in by_user) == len(log.pair_codes())


def test_log_rejects_out_of_range():
    with pytest.raises(DataError, match=r'item id outside \[0, 2\)'):
        InteractionLog.from_arrays([0, 1], [0, 2], 2, 2, INTERACT)


def test_split_sizes_and_order():
    rng = np.random.default_rng(1)
    log = chronological_split(_log(100, timestamps=rng.random(100)))
    assert log.is_split
    sizes = [len(log.partition(name)) for name in ('train', 'valid', 'test')]
    assert sizes == [80, 10, 10]
    assert log.partition('train').timestamps.max() <= log.partition('valid').timestamps.min()
    assert log.partition('valid').timestamps.max() <= log.partition('test').timestamps.min()
    assert len(log.partition('valid', 'test')) == 20


def test_split_ties_keep_input_order():
    log = chronological_split(_log(10, timestamps=np.zeros(10)), (0.6, 0.2, 0.2))
    assert list(log.frame['partition']) == ['train'] * 6 + ['valid'] * 2 + ['test'] * 2


def test_split_errors():
    with pytest.raises(DataError, match='summing to 1'):
        chronological_split(_log(10), (0.8, 0.1, 0.2))
    with pytest.raises(DataError, match='empty partitions'):
        chronological_split(_log(4), (0.8, 0.1, 0.1))
    with pytest.raises(DataError, match='unknown partitions'):
        _log(4).partition('holdout')


def test_first_fraction():
    log = chronological_split(_log(100, timestamps=np.arange(100.)[::-1]))
    sparse = log.first_fraction(0.25)
    train = sparse.partition('train')
    assert len(train) == 20
    assert sorted(train.timestamps) == sorted(log.partition('train').timestamps)[:20]
    assert len(sparse.partition('valid', 'test')) == 20
    with pytest.raises(DataError, match='fraction'):
        log.first_fraction(0.)


def test_training_graph_hides_held_out(dataset):
    graph, log = dataset.graph, dataset.log
    assert graph.n_edges(INTERACT) == 12
    assert graph.n_edges(INTERACTED_BY) == 12
    train = set(zip(log.partition('train').users.tolist(), log.partition('train').items.tolist()))
    src, dst = graph.edges(INTERACT)
    assert set(zip(src.tolist(), dst.tolist())) == train
    with pytest.raises(DataError, match='split'):
        training_graph(graph, InteractionLog(log.frame.drop(columns='partition'),
                                             log.n_users, log.n_items, INTERACT))


def test_prepare_dataset():
    graph, log = load_dataset(TOY_MANIFEST)
    dataset = prepare_dataset(graph, log, fractions=(0.6, 0.2, 0.2), train_fraction=0.5,
                              ground_truth={'planted': {}})
    assert isinstance(dataset, Dataset)
    assert len(dataset.log.partition('train')) == 6
    assert dataset.graph.n_edges(INTERACT) == 6
    assert dataset.ground_truth == {'planted': {}}
    by_user = dataset.log.items_by_user('test')
    assert [items.tolist() for items in by_user] == [[4], [5], [1], [2]]
