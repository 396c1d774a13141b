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

import json

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.special import expit

from hinrec import numcore as nc
from hinrec.core.graph import build_graph
from hinrec.data import training_graph
from hinrec.data.interactions import InteractionLog
from hinrec.exceptions import DataError
from hinrec.model import ModelParams
from hinrec.train import TRAIN_LOG_NAME, fit
from hinrec.train.trainer import bce_loss, validation_metrics

from tests.conftest import INTERACT, INTERACTED_BY, tiny_config


def test_bce_chance_level():
    assert_allclose(bce_loss(nc.Tensor([0., 0.]), [1, 0]).value, np.log(2.))


def test_bce_perfect_prediction_hits_floor():
    loss = bce_loss(nc.Tensor([40., -40.]), [1, 0]).value
    assert 0. < loss < 1e-6


def test_bce_gradient():
    s = nc.Tensor([0.3])
    with nc.GradTape() as tape:
        tape.watch(s)
        loss = bce_loss(s, [1.])
    (grad,) = tape.gradient(loss, [s])
    assert_allclose(grad, [expit(0.3) - 1.])


def test_bce_rejects_soft_labels():
    with pytest.raises(ValueError, match='labels must be 0 or 1'):
        bce_loss(nc.Tensor([0.]), [0.5])


def test_validation_metrics(dataset):
    validate = validation_metrics(dataset.graph, dataset.log, tiny_config())
    params = ModelParams.initialize(tiny_config().model_config(), dataset.graph)
    means = validate(params)
    assert sorted(means) == ['ndcg', 'precision', 'recall']
    assert means == validate(params)


def test_early_stopping(dataset):
    snapshots = []
    recalls = iter([0.5, 0.4, 0.3, 0.2])

    def validator(params):
        snapshots.append(params.copy())
        return {'recall': next(recalls)}

    result = fit(dataset.graph, dataset.log, tiny_config(patience=1, max_epochs=4), validator)
    assert [r['epoch'] for r in result.history] == [1, 2]
    assert result.state.best_epoch == 1
    for name, value in snapshots[0].values.items():
        assert_array_equal(result.params.values[name], value)
    assert not np.array_equal(result.params.values['features'],
                              snapshots[1].values['features'])


def test_fit_is_deterministic(dataset, tmp_path):
    config = tiny_config(max_epochs=2, dropout=0.5)
    first = fit(dataset.graph, dataset.log, config, output=tmp_path)
    second = fit(dataset.graph, dataset.log, config)

    def strip(history):
        return [{k: v for k, v in r.items() if k != 'wall_time'} for r in history]

    assert strip(first.history) == strip(second.history)
    for name, value in first.params.values.items():
        assert_array_equal(second.params.values[name], value)

    with open(tmp_path / TRAIN_LOG_NAME, encoding='utf-8') as fd:
        records = [json.loads(line) for line in fd]
    assert [r['epoch'] for r in records] == [1, 2]
    assert set(records[0]) == {'epoch', 'loss', 'precision', 'recall', 'ndcg', 'aborted',
                               'wall_time'}
    assert records[0]['aborted'] is False
    assert np.isfinite(records[0]['loss'])


def test_fit_needs_splits(dataset):
    frame = dataset.log.frame.copy()
    frame['partition'] = frame['partition'].replace({'train': 'test'})
    no_train = InteractionLog(frame, dataset.log.n_users, dataset.log.n_items, INTERACT,
                              INTERACTED_BY)
    with pytest.raises(DataError, match='non-empty training split'):
        fit(dataset.graph, no_train, tiny_config())

    frame = dataset.log.frame.copy()
    frame['partition'] = frame['partition'].replace({'valid': 'test'})
    no_valid = InteractionLog(frame, dataset.log.n_users, dataset.log.n_items, INTERACT,
                              INTERACTED_BY)
    with pytest.raises(DataError, match='non-empty validation split'):
        fit(dataset.graph, no_valid, tiny_config())


@pytest.mark.slow
def test_memorizes_two_communities():
    records = [(u, i, 'train') for u in range(10) for i in range(5)]
    records += [(u, i, 'train') for u in range(10, 20) for i in range(5, 10)]
    records += [(20, 0, 'valid'), (20, 1, 'test')]
    users, items, partitions = zip(*records)
    log = InteractionLog(pd.DataFrame({'user': users, 'item': items,
                                       'timestamp': np.arange(len(users), dtype=float),
                                       'partition': partitions}),
                         21, 10, INTERACT, INTERACTED_BY)
    pairs = list(zip(users, items))
    graph = training_graph(build_graph({'user': 21, 'item': 10},
                                       {INTERACT: pairs,
                                        INTERACTED_BY: [(i, u) for u, i in pairs]}), log)
    config = tiny_config(learning_rate=0.01, batch_size=100, negative_ratio=1,
                         max_epochs=500, patience=1000, d_in=32, d_out=(32,),
                         n_aspects=(8,), n_iterations=3, fanouts=10)
    result = fit(graph, log, config, validator=lambda params: {'recall': 0.})
    assert min(r['loss'] for r in result.history) < 0.05
