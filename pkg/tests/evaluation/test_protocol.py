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
import logging

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal

from hinrec.data.interactions import InteractionLog
from hinrec.evaluation import (LatentOracle, RandomScorer, build_eval_lists, evaluate)
from hinrec.exceptions import DataError

from tests.conftest import INTERACT


def _log(records, n_users, n_items):
    users, items, partitions = zip(*records)
    frame = pd.DataFrame({'user': users, 'item': items,
                          'timestamp': np.arange(len(users), dtype=float),
                          'partition': partitions})
    return InteractionLog(frame, n_users, n_items, INTERACT)


@pytest.fixture
def log():
    rng = np.random.default_rng(0)
    records = []
    for user in range(3):
        items = rng.choice(300, size=12, replace=False)
        records += [(user, i, 'train') for i in items[:8]]
        records += [(user, i, 'valid') for i in items[8:10]]
        records += [(user, i, 'test') for i in items[10:]]
    return _log(records, 4, 300)


class _KnowsPositives:
    """Scores the positives of a split above everything else."""

    def __init__(self, log, split):
        self.positives = set(zip(log.partition(split).users.tolist(),
                                 log.partition(split).items.tolist()))

    def score_candidates(self, users, items):
        return np.array([float((u, i) in self.positives)
                         for u, i in zip(users.tolist(), items.tolist())])


def test_list_sizes(log):
    lists = build_eval_lists(log, 'test', n_neg=100, seed=0)
    assert [r.user for r in lists] == [0, 1, 2]
    for ranked in lists:
        assert len(ranked) == 102
        assert ranked.n_positives == 2
        assert_array_equal(ranked.relevant[:2], True)
        assert ranked.shortfall == 0
        assert len(np.unique(ranked.items)) == 102


def test_negatives_never_observed(log):
    observed = log.items_by_user()
    for ranked in build_eval_lists(log, 'valid', n_neg=100, seed=3):
        negatives = ranked.items[~ranked.relevant]
        assert not np.isin(negatives, observed[ranked.user]).any()


def test_lists_deterministic(log):
    first = build_eval_lists(log, 'test', seed=5)
    second = build_eval_lists(log, 'test', seed=5)
    other = build_eval_lists(log, 'test', seed=6)
    for a, b in zip(first, second):
        assert_array_equal(a.items, b.items)
    assert any(not np.array_equal(a.items, c.items) for a, c in zip(first, other))


def test_shortfall(caplog):
    log = _log([(0, 0, 'train'), (0, 1, 'test'), (1, 2, 'test')], 2, 5)
    with caplog.at_level(logging.WARNING):
        lists = build_eval_lists(log, 'test', n_neg=4, seed=0)
    assert [r.shortfall for r in lists] == [1, 0]
    assert sorted(lists[0].items[1:]) == [2, 3, 4]
    assert 'negatives missing' in caplog.text


def test_split_errors(log):
    with pytest.raises(DataError, match='unknown split'):
        build_eval_lists(log, 'holdout')
    empty = _log([(0, 0, 'train'), (0, 1, 'valid')], 1, 5)
    with pytest.raises(DataError, match='no interactions in the test split'):
        build_eval_lists(empty, 'test')


def test_perfect_scorer(log):
    lists = build_eval_lists(log, 'test', n_neg=100, seed=1)
    report = evaluate(_KnowsPositives(log, 'test'), lists, n=10, seed=1)
    assert report.recall == 1.
    assert report.ndcg == 1.
    assert abs(report.precision - 0.2) < 1e-12
    assert report.n_negatives == 100
    assert len(report.per_user) == 3


def test_report_outputs(log):
    lists = build_eval_lists(log, 'valid', n_neg=50, seed=2)
    report = evaluate(_KnowsPositives(log, 'valid'), lists, n=5, n_negatives=50, seed=2,
                      split='valid')
    data = json.loads(report.to_json())
    assert data['split'] == 'valid'
    assert data['users'] == 3
    assert sorted(data['mean']) == ['ndcg', 'precision', 'recall']
    assert abs(data['mean']['precision'] - 0.4) < 1e-12
    assert data['mean']['recall'] == 1.
    assert len(data['per_user']) == 3
    frame = report.to_frame()
    assert list(frame.columns) == ['split', 'n', 'n_negatives', 'seed', 'users',
                                   'precision@5', 'recall@5', 'ndcg@5']
    assert frame['recall@5'][0] == 1.


def test_invalid_cutoff(log):
    with pytest.raises(ValueError, match='cutoff'):
        evaluate(RandomScorer(), build_eval_lists(log, 'test'), n=0)


def test_random_scorer_chance_level():
    rng = np.random.default_rng(3)
    n_users = 2000
    records = [(u, int(i), 'test') for u, i in enumerate(rng.integers(1000, size=n_users))]
    log = _log(records, n_users, 1000)
    lists = build_eval_lists(log, 'test', n_neg=100, seed=0)
    report = evaluate(RandomScorer(seed=1), lists, n=10)
    assert abs(report.recall - 10. / 101.) < 0.02


def test_latent_oracle():
    oracle = LatentOracle([[1., 0.], [0., 2.]], [[3., 1.], [1., 1.], [0., 0.]])
    assert_array_equal(oracle.score_candidates(np.array([0, 1, 1]), np.array([0, 0, 2])),
                       [3., 2., 0.])
