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

"""Iterative core filtering of a graph and its interaction log."""
import logging

import numpy as np

from hinrec.core.graph import build_graph
from hinrec.exceptions import DataError

L = logging.getLogger(__name__)


def _resolve_relation(graph, name):
    matches = [r for r in graph.relations if name in (r.key, r.edge_type)]
    if len(matches) != 1:
        raise DataError(f'core filter: relation "{name}" matches {len(matches)} relations')
    return matches[0]


def relation_threshold_violations(graph, thresholds):
    """Relation thresholds a graph fails.

    Arguments:
        graph (HinGraph): graph to test
        thresholds (dict): relation key or edge name -> minimum number of sources per
            destination node

    Returns:
        list: (relation, number of destination nodes below the minimum) pairs
    """
    failing = []
    for name, minimum in thresholds.items():
        relation = _resolve_relation(graph, name)
        low = int(np.count_nonzero(graph.degrees(relation) < minimum))
        if low:
            failing.append((relation, low))
    return failing


def _violations(graph, log, alive, thresholds):
    """Nodes of every type that fail a threshold given the nodes still alive."""
    failing = {t: np.zeros_like(a) for t, a in alive.items()}
    users, items = log.users, log.items
    live = alive[log.user_type][users] & alive[log.item_type][items]
    for node_type, minimum in thresholds.get('interactions', {}).items():
        if node_type == log.user_type:
            counts = np.bincount(users[live], minlength=log.n_users)
        elif node_type == log.item_type:
            counts = np.bincount(items[live], minlength=log.n_items)
        else:
            raise DataError(f'core filter: "{node_type}" is neither the user nor the item type')
        failing[node_type] |= alive[node_type] & (counts < minimum)
    for name, minimum in thresholds.get('relations', {}).items():
        relation = _resolve_relation(graph, name)
        src, dst = graph.edges(relation)
        kept = alive[relation.src_type][src] & alive[relation.dst_type][dst]
        counts = np.bincount(dst[kept], minlength=graph.count(relation.dst_type))
        failing[relation.dst_type] |= alive[relation.dst_type] & (counts < minimum)
    return failing


def core_filter(log, graph, thresholds):
    """Remove nodes below thresholds until every surviving node meets all of them.

    Removing a node removes its edges and interactions, which may push other nodes below a
    threshold; the filter repeats until nothing changes. Surviving nodes are renumbered
    compactly, keeping their relative order.

    Args:
        log (InteractionLog): interactions
        graph (HinGraph): graph holding the interaction relation and the context relations
        thresholds (dict): ``{'interactions': {node type: n}, 'relations': {relation: n}}``;
            a relation threshold requires every node of the relation's destination type to
            have at least n sources under it, relations are named by key or edge type

    Returns:
        tuple: filtered (HinGraph, InteractionLog)

    Raises:
        DataError: for a negative threshold or if a node type ends up empty
    """
    thresholds = thresholds or {}
    for group in thresholds.values():
        for name, minimum in group.items():
            if minimum < 0:
                raise DataError(f'core filter threshold for "{name}" is negative: {minimum}')

    alive = {t: np.ones(graph.count(t), dtype=bool) for t in graph.node_types}
    rounds = 0
    while True:
        failing = _violations(graph, log, alive, thresholds)
        if not any(f.any() for f in failing.values()):
            break
        rounds += 1
        for node_type, mask in failing.items():
            alive[node_type] &= ~mask
        L.debug('core filter round %d: %s', rounds,
                {t: int(a.sum()) for t, a in alive.items()})

    emptied = [t for t, a in alive.items() if graph.count(t) and not a.any()]
    if emptied:
        raise DataError(f'core filter {thresholds} removes every node of type(s) '
                        f'{", ".join(emptied)}')

    remap = {t: np.cumsum(a) - 1 for t, a in alive.items()}
    edges = {}
    for relation in graph.relations:
        src, dst = graph.edges(relation)
        kept = alive[relation.src_type][src] & alive[relation.dst_type][dst]
        edges[relation] = (remap[relation.src_type][src[kept]],
                           remap[relation.dst_type][dst[kept]])
    filtered = build_graph({t: int(a.sum()) for t, a in alive.items()}, edges)

    frame = log.frame
    kept = alive[log.user_type][log.users] & alive[log.item_type][log.items]
    frame = frame[kept].copy()
    frame['user'] = remap[log.user_type][frame['user'].to_numpy()]
    frame['item'] = remap[log.item_type][frame['item'].to_numpy()]
    filtered_log = type(log)(frame, int(alive[log.user_type].sum()),
                             int(alive[log.item_type].sum()), log.relation, log.inverse)
    L.info('core filter: %d rounds, %d of %d nodes and %d of %d interactions kept', rounds,
           filtered.n_nodes, graph.n_nodes, len(filtered_log), len(log))
    return filtered, filtered_log
