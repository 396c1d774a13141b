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

"""Fixed fan-out neighbor sampling and multi-hop computation trees.

Sampling is stateless: every neighbor slot of a target gets a pseudo-random key that is a hash
of (seed, relation, target, slot), and the ``fanout`` smallest keys win. A neighborhood thus
depends only on the seed, the target and the relation, never on which other targets are
sampled together, and whole batches of targets are sampled without a Python loop.
"""
import logging
import zlib
from dataclasses import dataclass

import numpy as np

from hinrec.core.types import MetaRelation, NodeId
from hinrec.exceptions import GraphError
from hinrec.utils import derive_seed, mix64

L = logging.getLogger(__name__)

DEFAULT_FANOUT = 10


@dataclass(frozen=True)
class SampledNeighborhood:
    """Fixed-length sample of the sources of one target under one relation.

    Padded slots hold index 0 and are masked false.
    """
    relation: MetaRelation
    target: NodeId
    neighbor_ids: np.ndarray
    mask: np.ndarray

    @property
    def fanout(self):
        """Number of slots."""
        return len(self.neighbor_ids)

    @property
    def real_ids(self):
        """Source indices of the unmasked slots."""
        return self.neighbor_ids[self.mask]


def relation_code(relation):
    """Stable integer code of a relation used to salt sampling keys."""
    return zlib.crc32(MetaRelation(*relation).key.encode('utf-8'))


def sample_neighborhoods(graph, targets, relation, fanout, seed):
    """Sample up to ``fanout`` sources for each target without replacement.

    Args:
        graph (HinGraph): the graph
        targets (np.ndarray): local indices of nodes of type ``relation.dst_type``
        relation (MetaRelation): relation to sample from
        fanout (int): number of slots F
        seed (int): sampling seed

    Returns:
        tuple: ``(neighbor_ids, mask)``, both shaped ``(len(targets), fanout)``; rows of
        degree-0 targets are fully masked
    """
    if fanout < 1:
        raise GraphError(f'fanout must be positive, got {fanout}')
    indptr, indices = graph.adjacency(relation)
    targets = np.asarray(targets, dtype=np.int64)
    start = indptr[targets]
    degree = indptr[targets + 1] - start
    first = np.cumsum(degree) - degree
    owner = np.repeat(np.arange(len(targets)), degree)
    slot = np.arange(len(owner)) - first[owner]

    base = np.uint64(derive_seed(seed, relation_code(relation)))
    with np.errstate(over='ignore'):
        keys = mix64(mix64(base ^ targets[owner].astype(np.uint64)) + slot.astype(np.uint64))
    order = np.lexsort((keys, owner))
    rank = np.arange(len(owner)) - first[owner]
    keep = rank < fanout
    chosen = order[keep]
    rows, cols = owner[chosen], rank[keep]

    neighbor_ids = np.zeros((len(targets), fanout), dtype=np.int64)
    mask = np.zeros((len(targets), fanout), dtype=bool)
    neighbor_ids[rows, cols] = indices[start[rows] + slot[chosen]]
    mask[rows, cols] = True
    return neighbor_ids, mask


def sample_neighbors(graph, target, relation, fanout, seed):
    """Sample the neighborhood of a single target.

    If the degree is at least ``fanout`` the sample is uniform without replacement, otherwise
    all sources are returned followed by masked padding; a degree-0 target gets a fully masked
    neighborhood.

    Args:
        graph (HinGraph): the graph
        target (NodeId): node of type ``relation.dst_type``
        relation (MetaRelation): relation to sample from
        fanout (int): number of slots F
        seed (int): sampling seed

    Returns:
        SampledNeighborhood
    """
    relation = MetaRelation(*relation)
    target = NodeId(*target)
    if target.node_type != relation.dst_type:
        raise GraphError(f'cannot sample {relation} for node {target}: '
                         f'expected type "{relation.dst_type}"')
    if not 0 <= target.index < graph.count(target.node_type):
        raise GraphError(f'node {target} out of range')
    ids, mask = sample_neighborhoods(graph, [target.index], relation, fanout, seed)
    return SampledNeighborhood(relation, target, ids[0], mask[0])


@dataclass(frozen=True)
class RelationBlock:
    """Sampled neighborhoods of the targets of one tree level under one relation.

    Attributes:
        relation (MetaRelation): the relation
        targets (np.ndarray): positions in the level of the targets with at least one source
        neighbors (np.ndarray): (m, F) positions of the sampled sources in the next level
        mask (np.ndarray): (m, F) true for real slots
    """
    relation: MetaRelation
    targets: np.ndarray
    neighbors: np.ndarray
    mask: np.ndarray


@dataclass(frozen=True)
class TreeLevel:
    """Deduplicated nodes materialized at one depth, with their sampled neighborhoods."""
    nodes: np.ndarray
    blocks: tuple = ()

    def __len__(self):
        """Number of nodes at this depth."""
        return len(self.nodes)


@dataclass(frozen=True)
class ComputationTree:
    """Sampled L-hop receptive field of a batch of roots.

    ``levels[0]`` holds the unique roots, ``levels[d + 1]`` the unique sampled sources of
    ``levels[d]``; every node is materialized once per depth. The model evaluates the deepest
    level first.

    Attributes:
        levels (tuple[TreeLevel]): depth 0..L
        root_index (np.ndarray): position in ``levels[0]`` of each requested target
    """
    levels: tuple
    root_index: np.ndarray

    @property
    def depth(self):
        """Number of hops L."""
        return len(self.levels) - 1

    def nodes(self, depth):
        """Global ids materialized at ``depth``."""
        return self.levels[depth].nodes


def _fanout_for(fanouts, depth, relation):
    if fanouts is None:
        return DEFAULT_FANOUT
    if isinstance(fanouts, (list, tuple)):
        fanouts = fanouts[min(depth, len(fanouts) - 1)]
    if isinstance(fanouts, dict):
        return int(fanouts.get(relation.key, fanouts.get('default', DEFAULT_FANOUT)))
    return int(fanouts)


def build_computation_tree(graph, targets, depth, fanouts=None, seed=0):
    """Extract the sampled L-hop computation tree of a set of targets.

    Args:
        graph (HinGraph): the graph
        targets: global ids, or NodeIds, of the roots; duplicates are allowed
        depth (int): number of hops L >= 1
        fanouts: one fan-out for all relations, a ``{relation key: fanout}`` mapping (with an
            optional ``default`` entry), or a list of either, one per depth
        seed (int): sampling seed; each depth samples with its own derived seed

    Returns:
        ComputationTree
    """
    if depth < 1:
        raise GraphError(f'computation tree depth must be at least 1, got {depth}')
    if not isinstance(targets, np.ndarray):
        targets = [graph.global_id(NodeId(*t)) if isinstance(t, tuple) else t for t in targets]
    targets = np.asarray(targets, dtype=np.int64)
    if np.any((targets < 0) | (targets >= graph.n_nodes)):
        raise GraphError(f'root ids outside [0, {graph.n_nodes})')
    nodes = np.unique(targets)
    root_index = np.searchsorted(nodes, targets)

    levels = []
    for d in range(depth):
        codes = graph.type_codes(nodes)
        depth_seed = derive_seed(seed, d + 1)
        sampled = []
        for relation in graph.relations:
            positions = np.flatnonzero(codes == graph.node_types.index(relation.dst_type))
            if not len(positions):
                continue
            local = nodes[positions] - graph.offset(relation.dst_type)
            present = graph.degrees(relation, local) > 0
            if not np.any(present):
                continue
            positions, local = positions[present], local[present]
            ids, mask = sample_neighborhoods(graph, local, relation,
                                             _fanout_for(fanouts, d, relation), depth_seed)
            sampled.append((relation, positions, ids + graph.offset(relation.src_type), mask))

        next_nodes = np.unique(np.concatenate([ids[mask] for _, _, ids, mask in sampled]
                                              + [np.empty(0, dtype=np.int64)]))
        blocks = tuple(RelationBlock(relation, positions,
                                     np.where(mask, np.searchsorted(next_nodes, ids), 0), mask)
                       for relation, positions, ids, mask in sampled)
        levels.append(TreeLevel(nodes, blocks))
        L.debug('depth %d: %d nodes, %d relation blocks', d, len(nodes), len(blocks))
        nodes = next_nodes
    levels.append(TreeLevel(nodes))
    return ComputationTree(tuple(levels), root_index)
