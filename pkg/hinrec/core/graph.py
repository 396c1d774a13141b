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

"""Immutable heterogeneous graph with adjacency grouped by meta relation."""
import logging

import numpy as np

from hinrec.core.types import MetaRelation, NodeId
from hinrec.exceptions import GraphError

L = logging.getLogger(__name__)


class HinGraph:
    """Typed nodes and edges with compressed adjacency per meta relation.

    Nodes of every type are numbered ``0..count-1``; global ids concatenate the types in
    declaration order. For each relation the sources of every destination node are stored
    deduplicated and sorted.
    """

    def __init__(self, node_counts, adjacency):
        """Use :func:`build_graph` rather than this constructor.

        Args:
            node_counts (dict): node type -> number of nodes
            adjacency (dict): MetaRelation -> (indptr, indices) over destination nodes
        """
        self._node_counts = dict(node_counts)
        self._adjacency = dict(adjacency)
        self.node_types = tuple(self._node_counts)
        self.relations = tuple(self._adjacency)
        counts = np.array([self._node_counts[t] for t in self.node_types], dtype=np.int64)
        self._offsets = np.concatenate([[0], np.cumsum(counts)])
        for indptr, indices in self._adjacency.values():
            indptr.setflags(write=False)
            indices.setflags(write=False)

    def __repr__(self):
        """Return a string representation."""
        return (f'HinGraph<node_types={len(self.node_types)} relations={len(self.relations)} '
                f'edges={self.n_edges()}>')

    @property
    def node_counts(self):
        """Copy of the node type -> count mapping."""
        return dict(self._node_counts)

    @property
    def n_nodes(self):
        """Total number of nodes."""
        return int(self._offsets[-1])

    @property
    def heterogeneity(self):
        """``|A| + |R|``, number of node types plus number of relations."""
        return len(self.node_types) + len(self.relations)

    def count(self, node_type):
        """Number of nodes of a type."""
        try:
            return self._node_counts[node_type]
        except KeyError as e:
            raise GraphError(f'undeclared node type "{node_type}"') from e

    def offset(self, node_type):
        """Global id of node 0 of a type."""
        self.count(node_type)
        return int(self._offsets[self.node_types.index(node_type)])

    def global_id(self, node):
        """Global id of a :class:`NodeId`."""
        if not 0 <= node.index < self.count(node.node_type):
            raise GraphError(f'node {node} out of range')
        return self.offset(node.node_type) + node.index

    def node_id(self, global_id):
        """Inverse of :meth:`global_id`."""
        code = int(self.type_codes(global_id))
        return NodeId(self.node_types[code], int(global_id - self._offsets[code]))

    def type_codes(self, global_ids):
        """Index into :attr:`node_types` of each global id."""
        return np.searchsorted(self._offsets, global_ids, side='right') - 1

    def _csr(self, relation):
        try:
            return self._adjacency[relation]
        except KeyError as e:
            raise GraphError(f'undeclared relation "{relation}"') from e

    def relations_into(self, node_type):
        """Relations whose destination type is ``node_type``."""
        return [r for r in self.relations if r.dst_type == node_type]

    def neighbors(self, node, relation):
        """Sorted source indices of ``node`` under ``relation``.

        Args:
            node (NodeId): destination node; its type must be ``relation.dst_type``
            relation (MetaRelation): a declared relation

        Raises:
            GraphError: for an undeclared relation or a node of the wrong type
        """
        relation = MetaRelation(*relation)
        indptr, indices = self._csr(relation)
        if node.node_type != relation.dst_type:
            raise GraphError(f'node {node} is not of type "{relation.dst_type}" '
                             f'required by relation {relation}')
        if not 0 <= node.index < len(indptr) - 1:
            raise GraphError(f'node {node} out of range')
        return indices[indptr[node.index]:indptr[node.index + 1]]

    def degrees(self, relation, targets=None):
        """Number of sources per destination node (all, or the given local indices)."""
        indptr, _ = self._csr(MetaRelation(*relation))
        deg = np.diff(indptr)
        return deg if targets is None else deg[np.asarray(targets, dtype=np.int64)]

    def adjacency(self, relation):
        """Read-only ``(indptr, indices)`` pair of a relation."""
        return self._csr(MetaRelation(*relation))

    def edges(self, relation):
        """``(src, dst)`` local index arrays of a relation, sorted by destination."""
        indptr, indices = self._csr(MetaRelation(*relation))
        return indices.copy(), np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))

    def n_edges(self, relation=None):
        """Number of edges of a relation or of the whole graph."""
        if relation is None:
            return int(sum(len(indices) for _, indices in self._adjacency.values()))
        return len(self._csr(MetaRelation(*relation))[1])


def _as_edge_arrays(relation, edges):
    if isinstance(edges, tuple) and len(edges) == 2 and isinstance(edges[0], np.ndarray):
        src, dst = (np.asarray(a) for a in edges)
    else:
        pairs = np.asarray(list(edges)).reshape(-1, 2)
        src, dst = pairs[:, 0], pairs[:, 1]
    if src.shape != dst.shape or (src.size and not np.issubdtype(src.dtype, np.integer)):
        raise GraphError(f'relation {relation}: edges must be integer (src, dst) pairs')
    return src.astype(np.int64), dst.astype(np.int64)


def build_graph(typed_node_counts, typed_edge_lists):
    """Build an immutable :class:`HinGraph`.

    Inverse relations are not generated; declare them as relations of their own.

    Args:
        typed_node_counts (dict): node type -> count
        typed_edge_lists (dict): MetaRelation -> iterable of (src, dst) pairs or a
            ``(src_array, dst_array)`` tuple of local indices

    Returns:
        HinGraph

    Raises:
        GraphError: for a dangling endpoint, an undeclared endpoint type, a negative count or a
        schema with ``|A| + |R| <= 2``
    """
    node_counts = {}
    for node_type, count in typed_node_counts.items():
        if int(count) != count or count < 0:
            raise GraphError(f'invalid node count {count} for type "{node_type}"')
        node_counts[str(node_type)] = int(count)

    adjacency = {}
    for relation, edges in typed_edge_lists.items():
        relation = MetaRelation(*relation)
        if relation in adjacency:
            raise GraphError(f'relation {relation} declared twice')
        for end in (relation.src_type, relation.dst_type):
            if end not in node_counts:
                raise GraphError(f'relation {relation} uses undeclared node type "{end}"')
        n_src, n_dst = node_counts[relation.src_type], node_counts[relation.dst_type]
        src, dst = _as_edge_arrays(relation, edges)
        bad = (src < 0) | (src >= n_src) | (dst < 0) | (dst >= n_dst)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise GraphError(f'relation {relation}: edge ({src[i]}, {dst[i]}) has an endpoint '
                             f'outside {relation.src_type}[0..{n_src}) or '
                             f'{relation.dst_type}[0..{n_dst})')
        codes = np.unique(dst * max(n_src, 1) + src)
        dst, src = np.divmod(codes, max(n_src, 1))
        indptr = np.concatenate([[0], np.cumsum(np.bincount(dst, minlength=n_dst))])
        adjacency[relation] = (indptr.astype(np.int64), src.astype(np.int64))
        L.debug('relation %s: %d edges', relation, len(src))

    if len(node_counts) + len(adjacency) <= 2:
        raise GraphError(f'not a heterogeneous graph: {len(node_counts)} node types and '
                         f'{len(adjacency)} relations (|A| + |R| must exceed 2)')
    return HinGraph(node_counts, adjacency)
