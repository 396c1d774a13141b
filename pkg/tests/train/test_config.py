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

import pytest

from hinrec.exceptions import ConfigError
from hinrec.model import ModelConfig
from hinrec.train import TrainConfig


def test_defaults():
    config = TrainConfig()
    assert config.learning_rate == 0.005
    assert config.negative_ratio == 4
    assert config.positives_per_batch == 1024 // 5
    assert config.model_config() == ModelConfig()
    assert TrainConfig(batch_size=3, negative_ratio=4).positives_per_batch == 1


@pytest.mark.parametrize('kwargs', [
    {'batch_size': 0}, {'patience': -1}, {'topn': 2.5}, {'max_epochs': True},
    {'learning_rate': 0.}, {'d_out': (10,), 'n_aspects': (3,)},
])
def test_invalid(kwargs):
    with pytest.raises(ConfigError):
        TrainConfig(**kwargs)


def test_dict_round_trip():
    config = TrainConfig(d_out=(8, 4), n_aspects=(4, 2), seed=3)
    values = config.to_dict()
    assert values['d_out'] == [8, 4]
    assert TrainConfig.from_dict(values) == config


def test_unknown_keys():
    with pytest.raises(ConfigError, match='unknown training options'):
        TrainConfig.from_dict({'learning_rate': 0.1, 'momentum': 0.9})


def test_from_run_config():
    run_config = {
        'seed': 7,
        'model': {'n_layers': 1, 'd_in': 8, 'd_out': [4], 'n_aspects': [2],
                  'n_iterations': 3, 'dropout': 0.1, 'per_relation_weight': False,
                  'precision': 64},
        'train': {'learning_rate': 0.01, 'batch_size': 64},
        'eval': {'negatives': 50, 'topn': 20, 'split': 'test', 'seed': 4},
    }
    config = TrainConfig.from_run_config(run_config)
    assert config.seed == 7
    assert config.d_out == (4,)
    assert config.eval_negatives == 50
    assert config.topn == 20
    assert config.eval_seed == 4
    assert config.batch_size == 64
