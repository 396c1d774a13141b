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
import pytest

from hinrec.check import run_checks
from hinrec.io.utils import load_run


@pytest.fixture(scope='module')
def run(trained_run):
    return load_run(trained_run)


def test_has_finite_parameters(run):
    assert run_checks.has_finite_parameters(run)

    values = {k: v.copy() for k, v in run.params.values.items()}
    values['features'][0, 0] = np.nan
    result = run_checks.has_finite_parameters(run._replace(params=run.params.replace(values)))
    assert not result
    assert result.info == ['features']


def test_has_chronological_split(run):
    assert run_checks.has_chronological_split(run)

    frame = run.dataset.log.frame.copy()
    train = frame.index[frame['partition'] == 'train'][0]
    frame.loc[train, 'timestamp'] = frame['timestamp'].max() + 1
    log = run.dataset.log._with_frame(frame)
    result = run_checks.has_chronological_split(run._replace(dataset=run.dataset._replace(
        log=log)))
    assert not result
    assert result.info == [('train', 'valid'), ('train', 'test')]


def test_has_core_thresholds(run):
    assert run_checks.has_core_thresholds(run)

    config = dict(run.config, dataset=dict(run.config['dataset'],
                                           core_filter={'interactions': {'user': 6}}))
    result = run_checks.has_core_thresholds(run._replace(config=config))
    assert not result
    assert result.info == [('user', 4)]


def test_has_unit_norm_aspects(run):
    assert run_checks.has_unit_norm_aspects(run, n_nodes=3)


def test_has_simplex_aspect_weights(run):
    assert run_checks.has_simplex_aspect_weights(run)


def test_has_best_snapshot(run):
    assert run_checks.has_best_snapshot(run)

    history = [dict(record, recall=r) for record, r in zip(run.history, (0.5, 0.2, 0.1))]
    stopped = run._replace(history=history[:2])
    result = run_checks.has_best_snapshot(stopped)
    assert not result
    assert 'best epoch 1 of 2' in result.info[0]

    result = run_checks.has_best_snapshot(run._replace(history=[]))
    assert not result
    assert result.info == ['no training log']
