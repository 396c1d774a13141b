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

"""Disentangled propagation layer.

A layer projects every node into K aspect channels, then refines the aspect embeddings of each
target through a few routing iterations. An iteration attends over the sampled sources of
every relation of the target (one softmax per relation, shared by all aspects), weighs each
relation over the aspects and adds the relation summaries to the target's own channels.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from hinrec import numcore as nc
from hinrec.exceptions import ShapeError

L = logging.getLogger(__name__)


@dataclass
class DisenState:
    """Working state of the routing loop.

    Attributes:
        z (Tensor): (n, K, dk) unit-norm aspect embeddings of the targets
        r (dict): relation -> (m, K) aspect weights of the targets having that relation
        iteration (int): number of completed iterations
    """
    z: nc.Tensor
    r: dict
    iteration: int = 0


@dataclass
class RoutingTrace:
    """Convergence diagnostics of one propagation.

    Attributes:
        deltas (list[float]): mean ``||z(i) - z(i-1)||`` over targets for each iteration
        aspect_weights (dict): relation -> (m, K) final aspect weights
        entropy (float): mean entropy of the final aspect weight rows
    """
    deltas: list = field(default_factory=list)
    aspect_weights: dict = field(default_factory=dict)
    entropy: float = 0.

    @classmethod
    def merge(cls, traces):
        """Pool the aspect weights of several traces; deltas are averaged per iteration."""
        traces = list(traces)
        merged = cls()
        for trace in traces:
            for relation, weights in trace.aspect_weights.items():
                merged.aspect_weights.setdefault(relation, []).append(weights)
        merged.aspect_weights = {r: np.concatenate(w) for r, w in merged.aspect_weights.items()}
        if traces:
            merged.deltas = list(np.mean([t.deltas for t in traces], axis=0))
        merged.entropy = _mean_entropy(merged.aspect_weights)
        return merged

    def mean_aspect_weights(self):
        """Relation -> aspect weights averaged over targets."""
        return {r: w.mean(axis=0) for r, w in self.aspect_weights.items()}


def _mean_entropy(aspect_weights):
    rows = [w for w in aspect_weights.values() if len(w)]
    if not rows:
        return 0.
    r = np.concatenate(rows)
    with np.errstate(divide='ignore', invalid='ignore'):
        return float(np.mean(-np.sum(np.where(r > 0, r * np.log(r), 0.), axis=-1)))


def content_transform(x, node_type, params):
    """Project features into K unit-norm channels.

    Args:
        x (Tensor): (..., d_in) features of nodes of type ``node_type``
        node_type (str): node type selecting the projection
        params (LayerParams): layer parameters

    Returns:
        Tensor of shape (..., K, d_out / K); all-zero channels stay zero
    """
    x = nc.as_tensor(x)
    hidden = nc.relu(nc.affine(x, params.projections[node_type]))
    return nc.l2_normalize(nc.reshape(hidden, x.shape[:-1] + (params.n_aspects,
                                                               params.aspect_dim)))


def project_level(graph, nodes, inputs, params, dropout=0., rng=None):
    """Channel projections of the nodes of one tree level.

    Args:
        graph (HinGraph): graph the global ids refer to
        nodes (np.ndarray): global ids
        inputs (Tensor): (n, d_in) input features in the order of ``nodes``
        params (LayerParams): layer parameters
        dropout (float): channel dropout rate, used when ``rng`` is given
        rng (np.random.Generator): dropout randomness

    Returns:
        Tensor of shape (n, K, d_out / K)
    """
    codes = graph.type_codes(nodes)
    parts, order = [], []
    for code in np.unique(codes):
        positions = np.flatnonzero(codes == code)
        parts.append(content_transform(nc.take(inputs, positions), graph.node_types[code],
                                       params))
        order.append(positions)
    if not parts:
        return nc.Tensor(np.zeros((0, params.n_aspects, params.aspect_dim)),
                         dtype=inputs.dtype)
    channels = parts[0] if len(parts) == 1 else nc.concat(parts)
    channels = nc.take(channels, np.argsort(np.concatenate(order)))
    if rng is not None and dropout > 0.:
        keep = rng.random(channels.shape) >= dropout
        channels = nc.mul(channels, keep / (1. - dropout))
    return channels


def intra_relation_attention(z, neighbors, mask, alpha, r):
    """Attention pooling of the sampled sources of one relation.

    Args:
        z (Tensor): (m, K, dk) current target embeddings
        neighbors (Tensor): (m, F, K, dk) channel features of the sampled sources
        mask (np.ndarray): (m, F) true for real slots; each row needs one
        alpha (Tensor): (2 dk,) attention vector of the relation
        r (Tensor): (m, K) current aspect weights of the relation

    Returns:
        tuple: ``(summary, attention)``, the (m, K, dk) relation summaries and the (m, F)
        neighbor weights
    """
    z, neighbors, r = nc.as_tensor(z), nc.as_tensor(neighbors), nc.as_tensor(r)
    m, fanout, k, dk = neighbors.shape
    if z.shape != (m, k, dk) or alpha.shape != (2 * dk,):
        raise ShapeError(f'intra_relation_attention: targets {z.shape}, neighbors '
                         f'{neighbors.shape} and attention {alpha.shape} do not agree')
    own = nc.sum(nc.mul(z, alpha[:dk]), axis=-1)
    other = nc.sum(nc.mul(neighbors, alpha[dk:]), axis=-1)
    per_aspect = nc.relu(nc.add(nc.reshape(own, (m, 1, k)), other))
    scores = nc.sum(nc.mul(per_aspect, nc.reshape(r, (m, 1, k))), axis=-1)
    attention = nc.masked_softmax(scores, mask)
    pooled = nc.sum(nc.mul(nc.reshape(attention, (m, fanout, 1, 1)), neighbors), axis=1)
    return nc.relu(pooled), attention


def inter_relation_weights(summary, q, W):
    """Aspect weights of a relation: softmax over K of ``q . tanh(W z_k)``.

    Args:
        summary (Tensor): (..., K, dk) relation summaries
        q (Tensor): (dk,) semantic attention vector
        W (Tensor): (dk, dk) routing matrix

    Returns:
        Tensor of shape (..., K) on the probability simplex
    """
    return nc.softmax(nc.sum(nc.mul(nc.tanh(nc.affine(summary, W)), q), axis=-1))


def _drop_slots(mask, rate, rng):
    """Randomly mask real slots, keeping at least one per row."""
    dropped = mask & (rng.random(mask.shape) >= rate)
    empty = ~np.any(dropped, axis=1)
    dropped[empty] = mask[empty]
    return dropped


def _route(channels, groups, params, n_iterations):
    """Run the routing loop.

    Args:
        channels (Tensor): (n, K, dk) channel projections of the targets
        groups (list): ``(relation, targets, neighbors, mask)`` with target positions into
            ``channels`` and the gathered (m, F, K, dk) source channels
        params (LayerParams): layer parameters
        n_iterations (int): routing iterations

    Returns:
        tuple: final DisenState and RoutingTrace
    """
    n, k = channels.shape[0], params.n_aspects
    state = DisenState(channels,
                       {relation: nc.Tensor(np.full((len(targets), k), 1. / k),
                                            dtype=channels.dtype)
                        for relation, targets, _, _ in groups})
    trace = RoutingTrace()
    for _ in range(n_iterations):
        update = channels
        r_next = {}
        for relation, targets, neighbors, mask in groups:
            summary, _ = intra_relation_attention(nc.take(state.z, targets), neighbors, mask,
                                                  params.intra_attention[relation],
                                                  state.r[relation])
            W = params.weight(relation)
            r_next[relation] = inter_relation_weights(summary,
                                                      params.semantic_attention[relation], W)
            message = nc.mul(nc.reshape(r_next[relation], (len(targets), k, 1)),
                             nc.affine(summary, W))
            update = nc.add(update, nc.segment_sum(message, targets, n))
        z = nc.l2_normalize(update)
        delta = np.sqrt(np.sum((z.value - state.z.value).reshape(n, -1) ** 2, axis=1))
        trace.deltas.append(float(delta.mean()) if n else 0.)
        state = DisenState(z, r_next, state.iteration + 1)
    trace.aspect_weights = {relation: r.numpy() for relation, r in state.r.items()}
    trace.entropy = _mean_entropy(trace.aspect_weights)
    return state, trace


def propagate(channels, blocks, source_channels, params, n_iterations, dropout=0., rng=None):
    """Propagate one tree level: every target of ``blocks`` attends over its sampled sources.

    Args:
        channels (Tensor): (n, K, dk) channel projections of the level
        blocks (tuple[RelationBlock]): sampled neighborhoods of the level
        source_channels (Tensor): channel projections of the next level
        params (LayerParams): layer parameters
        n_iterations (int): routing iterations I
        dropout (float): attention dropout rate, used when ``rng`` is given
        rng (np.random.Generator): dropout randomness

    Returns:
        tuple: (n, K, dk) embeddings and the RoutingTrace
    """
    groups = []
    for block in blocks:
        mask = block.mask
        if rng is not None and dropout > 0.:
            mask = _drop_slots(mask, dropout, rng)
        groups.append((block.relation, block.targets,
                       nc.take(source_channels, block.neighbors), mask))
    state, trace = _route(channels, groups, params, n_iterations)
    return state.z, trace


def propagate_node(channels, neighborhoods, params, n_iterations):
    """Routing for a single target.

    Args:
        channels (Tensor): (K, dk) channel projections of the target
        neighborhoods (list): ``(relation, source_channels, mask)`` for each relation of the
            target, with (F, K, dk) source channels and an (F,) mask; relations without any real
            slot are skipped
        params (LayerParams): layer parameters
        n_iterations (int): routing iterations I

    Returns:
        tuple: the (K, dk) embedding and a relation -> (K,) mapping of final aspect weights
    """
    channels = nc.as_tensor(channels)
    groups = []
    for relation, sources, mask in neighborhoods:
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            continue
        sources = nc.as_tensor(sources)
        groups.append((relation, np.zeros(1, dtype=np.intp),
                       nc.reshape(sources, (1,) + sources.shape), mask[None]))
    state, trace = _route(nc.reshape(channels, (1,) + channels.shape), groups, params,
                          n_iterations)
    z = nc.reshape(state.z, channels.shape)
    return z, {relation: weights[0] for relation, weights in trace.aspect_weights.items()}
