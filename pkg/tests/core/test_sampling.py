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

from hinrec.core.graph import build_graph
from hinrec.core.sampling import (DEFAULT_FANOUT, _fanout_for, build_computation_tree,
                                  sample_neighborhoods, sample_neighbors)
from hinrec.core.types import NodeId
from hinrec.exceptions import GraphError
from hinrec.stats import uniformity

from tests.conftest import BRAND_OF, HAS_BRAND, INTERACT, INTERACTED_BY


def _dense_graph(n_users=12, n_items=4):
    """Every user interacts with every item."""
    pairs = [(u, i) for u in range(n_users) for i in range(n_items)]
    return build_graph({'user': n_users, 'item': n_items},
                       {INTERACT: pairs, INTERACTED_BY: [(i, u) for u, i in pairs]})


def test_padding(graph):
    sample = sample_neighbors(graph, NodeId('user', 0), INTERACTED_BY, 5, seed=0)
    assert sample.fanout == 5
    assert_array_equal(sample.mask, [True, True, True, False, False])
    assert sorted(sample.real_ids) == [0, 1, 3]
    assert_array_equal(sample.neighbor_ids[~sample.mask], [0, 0])


def test_subset_is_deterministic():
    graph = _dense_graph(n_users=10)
    target = NodeId('item', 2)
    first = sample_neighbors(graph, target, INTERACT, 5, seed=7)
    second = sample_neighbors(graph, target, INTERACT, 5, seed=7)
    assert first.mask.all()
    assert len(set(first.real_ids)) == 5
    assert_array_equal(first.neighbor_ids, second.neighbor_ids)
    others = [sample_neighbors(graph, target, INTERACT, 5, seed=s).real_ids for s in range(10)]
    assert len({tuple(sorted(o)) for o in others}) > 1


def test_zero_degree_target():
    graph = build_graph({'user': 2, 'item': 2},
                        {INTERACT: [(0, 0)], INTERACTED_BY: [(0, 0)]})
    sample = sample_neighbors(graph, NodeId('user', 1), INTERACTED_BY, 3, seed=0)
    assert not sample.mask.any()
    assert sample.real_ids.size == 0


def test_sample_errors(graph):
    with pytest.raises(GraphError, match='expected type "item"'):
        sample_neighbors(graph, NodeId('user', 0), INTERACT, 3, seed=0)
    with pytest.raises(GraphError, match='out of range'):
        sample_neighbors(graph, NodeId('item', 9), INTERACT, 3, seed=0)
    with pytest.raises(GraphError, match='fanout must be positive'):
        sample_neighbors(graph, NodeId('item', 0), INTERACT, 0, seed=0)


def test_uniform_over_targets():
    n_items = 10000
    pairs = [(u, i) for i in range(n_items) for u in (0, 1)]
    graph = build_graph({'user': 2, 'item': n_items}, {INTERACT: pairs})
    ids, mask = sample_neighborhoods(graph, np.arange(n_items), INTERACT, 1, seed=0)
    assert mask.all()
    assert abs(np.mean(ids[:, 0] == 0) - 0.5) < 0.02


def test_uniform_over_seeds():
    graph = build_graph({'user': 10, 'item': 1}, {INTERACT: [(u, 0) for u in range(10)]})
    counts = np.zeros(10, dtype=np.int64)
    for seed in range(10000):
        sample = sample_neighbors(graph, NodeId('item', 0), INTERACT, 5, seed)
        assert sample.mask.all()
        assert len(np.unique(sample.neighbor_ids)) == 5
        counts[sample.neighbor_ids] += 1
    assert np.all(np.abs(counts / 10000 - 0.5) <= 0.02)
    assert uniformity(counts).pvalue > 1e-3


def test_batch_independent_of_companions():
    graph = _dense_graph()
    ids, mask = sample_neighborhoods(graph, [0, 1, 2, 3], INTERACT, 4, seed=3)
    alone, alone_mask = sample_neighborhoods(graph, [2], INTERACT, 4, seed=3)
    assert_array_equal(ids[2], alone[0])
    assert_array_equal(mask[2], alone_mask[0])
    assert mask.all()


def test_fanout_spec():
    assert _fanout_for(None, 0, INTERACT) == DEFAULT_FANOUT
    assert _fanout_for(3, 1, INTERACT) == 3
    assert _fanout_for([5, 2], 0, INTERACT) == 5
    assert _fanout_for([5, 2], 4, INTERACT) == 2
    assert _fanout_for({INTERACT.key: 7, 'default': 1}, 0, INTERACT) == 7
    assert _fanout_for({INTERACT.key: 7, 'default': 1}, 0, BRAND_OF) == 1
    assert _fanout_for({}, 0, BRAND_OF) == DEFAULT_FANOUT


def test_one_hop_tree(graph):
    tree = build_computation_tree(graph, [NodeId('user', 0)], 1, fanouts=10)
    assert tree.depth == 1
    assert_array_equal(tree.nodes(0), [0])
    assert_array_equal(tree.root_index, [0])
    (block,) = tree.levels[0].blocks
    assert block.relation == INTERACTED_BY
    assert_array_equal(block.targets, [0])
    # items 0, 1 and 3 have global ids 3, 4 and 6
    assert_array_equal(tree.nodes(1), [3, 4, 6])
    assert sorted(block.neighbors[block.mask]) == [0, 1, 2]
    assert block.mask.sum() == 3
    assert tree.levels[1].blocks == ()


def test_two_hop_tree(graph):
    tree = build_computation_tree(graph, [0], 2, fanouts=10, seed=1)
    assert len(tree.levels) == 3
    assert [b.relation for b in tree.levels[1].blocks] == [INTERACT, BRAND_OF]
    # users 0, 1, 2 and brands 0, 1 of the items of user 0
    assert_array_equal(tree.nodes(2), [0, 1, 2, 7, 8])
    for depth in range(tree.depth):
        for block in tree.levels[depth].blocks:
            assert block.neighbors.shape == block.mask.shape
            assert np.all(block.targets < len(tree.levels[depth]))
            assert np.all(block.neighbors < len(tree.levels[depth + 1]))
            src = tree.nodes(depth + 1)[block.neighbors[block.mask]]
            assert np.all(graph.type_codes(src) == graph.node_types.index(block.relation.src_type))


def test_tree_deduplicates(graph):
    tree = build_computation_tree(graph, [3, 0, 3, 7], 2, fanouts=10)
    assert_array_equal(tree.nodes(0), [0, 3, 7])
    assert_array_equal(tree.root_index, [1, 0, 1, 2])
    for level in tree.levels:
        assert len(np.unique(level.nodes)) == len(level)
    relations = {b.relation for b in tree.levels[0].blocks}
    assert relations == {INTERACTED_BY, INTERACT, BRAND_OF, HAS_BRAND}


def test_tree_deterministic(graph):
    first = build_computation_tree(graph, [0, 1], 2, fanouts=1, seed=5)
    second = build_computation_tree(graph, [0, 1], 2, fanouts=1, seed=5)
    for a, b in zip(first.levels, second.levels):
        assert_array_equal(a.nodes, b.nodes)
        for x, y in zip(a.blocks, b.blocks):
            assert_array_equal(x.neighbors, y.neighbors)
            assert_array_equal(x.mask, y.mask)


def test_isolated_root():
    graph = build_graph({'user': 2, 'item': 2},
                        {INTERACT: [(0, 0)], INTERACTED_BY: [(0, 0)]})
    tree = build_computation_tree(graph, [NodeId('user', 1)], 2)
    assert tree.levels[0].blocks == ()
    assert len(tree.levels[1]) == 0
    assert len(tree.levels[2]) == 0


def test_tree_errors(graph):
    with pytest.raises(GraphError, match='at least 1'):
        build_computation_tree(graph, [0], 0)
    with pytest.raises(GraphError, match='root ids'):
        build_computation_tree(graph, np.array([9]), 1)
