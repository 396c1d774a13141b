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
from numpy.testing import assert_array_equal

from hinrec.exceptions import ConfigError, SnapshotError
from hinrec.model.params import (FEATURES, ModelConfig, ModelParams, parameter_shapes,
                                 projection_name, semantic_weight_name)

from tests.conftest import INTERACT


def test_model_config_dims():
    config = ModelConfig(d_in=8, d_out=(6, 4), n_aspects=(3, 2))
    assert config.n_layers == 2
    assert config.aspect_dim(1) == 2
    assert config.aspect_dim(2) == 2
    assert config.input_dim(2) == 8
    assert config.input_dim(1) == 4
    assert config.to_dict()['d_out'] == [6, 4]


@pytest.mark.parametrize('kwargs, message', [
    ({'d_out': (10,), 'n_aspects': (3,)}, 'not divisible'),
    ({'d_out': (4, 4), 'n_aspects': (2, 4)}, 'must not increase'),
    ({'d_out': (4, 4), 'n_aspects': (2,)}, 'one entry per layer'),
    ({'n_iterations': 0}, 'n_iterations'),
    ({'dropout': 1.}, 'dropout'),
    ({'precision': 16}, 'precision'),
    ({'d_in': 0}, 'positive'),
])
def test_model_config_errors(kwargs, message):
    with pytest.raises(ConfigError, match=message):
        ModelConfig(**kwargs)


def test_parameter_shapes(graph):
    config = ModelConfig(d_in=6, d_out=(4, 6), n_aspects=(2, 2))
    shapes = parameter_shapes(config, graph.node_counts, graph.relations)
    assert shapes[FEATURES] == (9, 6)
    assert shapes[projection_name(2, 'brand')] == (6, 6)
    assert shapes[projection_name(1, 'user')] == (4, 6)
    assert shapes[semantic_weight_name(1)] == (2, 2)
    assert shapes[f'layer1/intra_attention/{INTERACT.key}'] == (4,)
    assert shapes[f'layer2/semantic_attention/{INTERACT.key}'] == (3,)
    assert len(shapes) == 1 + 2 * (3 + 4 + 4 + 1)

    per_relation = ModelConfig(d_in=6, d_out=(4, 6), n_aspects=(2, 2),
                               per_relation_weight=True)
    shapes = parameter_shapes(per_relation, graph.node_counts, graph.relations)
    assert semantic_weight_name(1) not in shapes
    assert shapes[semantic_weight_name(1, INTERACT)] == (2, 2)


def test_initialize(graph):
    config = ModelConfig(d_in=6, d_out=(4,), n_aspects=(2,))
    params = ModelParams.initialize(config, graph, seed=3)
    again = ModelParams.initialize(config, graph, seed=3)
    for name, value in params.values.items():
        assert_array_equal(value, again.values[name])
        assert np.all(np.isfinite(value))
    assert params.size == sum(v.size for v in params.values.values())
    assert len(params) == 1 + 3 + 4 + 4 + 1
    assert abs(params.values[FEATURES].std() - 0.1) < 0.05

    layer = params.layer(1, params.tensors())
    assert layer.n_aspects == 2
    assert layer.weight(INTERACT).shape == (2, 2)


def test_single_precision(graph):
    config = ModelConfig(d_in=6, d_out=(4,), n_aspects=(2,), precision=32)
    params = ModelParams.initialize(config, graph)
    assert all(v.dtype == np.float32 for v in params.values.values())


def test_copy_is_deep(graph):
    params = ModelParams.initialize(ModelConfig(d_in=4, d_out=(2,), n_aspects=(1,)), graph)
    copy = params.copy()
    copy.values[FEATURES][0, 0] += 1.
    assert copy.values[FEATURES][0, 0] != params.values[FEATURES][0, 0]


def test_save_load(graph, tmp_path):
    config = ModelConfig(d_in=6, d_out=(4,), n_aspects=(2,))
    params = ModelParams.initialize(config, graph, seed=5)
    path = tmp_path / 'params.npz'
    params.save(path)
    loaded = ModelParams.load(path, config, graph.node_counts, graph.relations)
    assert sorted(loaded.values) == sorted(params.values)
    for name, value in params.values.items():
        assert_array_equal(loaded.values[name], value)


def test_load_errors(graph, tmp_path):
    config = ModelConfig(d_in=6, d_out=(4,), n_aspects=(2,))
    with pytest.raises(SnapshotError, match='snapshot not found'):
        ModelParams.load(tmp_path / 'missing.npz', config, graph.node_counts, graph.relations)

    path = tmp_path / 'params.npz'
    ModelParams.initialize(config, graph).save(path)
    other = ModelConfig(d_in=8, d_out=(4,), n_aspects=(2,))
    with pytest.raises(SnapshotError, match='has shape'):
        ModelParams.load(path, other, graph.node_counts, graph.relations)
    deeper = ModelConfig(d_in=6, d_out=(4, 4), n_aspects=(2, 2))
    with pytest.raises(SnapshotError, match='missing parameters'):
        ModelParams.load(path, deeper, graph.node_counts, graph.relations)
