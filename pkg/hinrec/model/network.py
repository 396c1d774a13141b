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

"""Stacked propagation over computation trees, scoring and the trained recommender."""
import logging

import numpy as np

from hinrec import numcore as nc
from hinrec.core.sampling import build_computation_tree
from hinrec.exceptions import ShapeError
from hinrec.model.layers import RoutingTrace, project_level, propagate
from hinrec.model.params import FEATURES

L = logging.getLogger(__name__)

EMBED_CHUNK = 512


def forward(graph, tree, params, tensors=None, training=False, rng=None):
    """Root embeddings of a computation tree.

    The deepest layer consumes free embeddings at every depth; each shallower layer consumes the
    concatenated aspect outputs of the layer below, one depth less, until layer 1 produces the
    roots.

    Args:
        graph (HinGraph): graph the tree was sampled from
        tree (ComputationTree): sampled receptive field, depth L
        params (ModelParams): parameters
        tensors (dict): name -> Tensor overriding ``params.tensors()``, e.g. watched copies
        training (bool): apply dropout
        rng (np.random.Generator): dropout randomness, required when training with dropout

    Returns:
        tuple: (n_roots, K1, dk1) Tensor in the order of the requested roots, and a
        layer -> RoutingTrace mapping pooled over the propagated depths
    """
    config = params.config
    if tree.depth != config.n_layers:
        raise ShapeError(f'computation tree of depth {tree.depth} for a model with '
                         f'{config.n_layers} layers')
    tensors = params.tensors() if tensors is None else tensors
    dropout = config.dropout if training else 0.
    if dropout > 0. and rng is None:
        rng = np.random.default_rng()
    inputs = [nc.take(tensors[FEATURES], level.nodes) for level in tree.levels]
    traces = {}
    for layer in range(config.n_layers, 0, -1):
        layer_params = params.layer(layer, tensors)
        channels = [project_level(graph, tree.levels[d].nodes, inputs[d], layer_params,
                                  dropout, rng) for d in range(layer + 1)]
        outputs, layer_traces = [], []
        for d in range(layer):
            z, trace = propagate(channels[d], tree.levels[d].blocks, channels[d + 1],
                                 layer_params, config.n_iterations, dropout, rng)
            outputs.append(nc.reshape(z, (len(tree.levels[d]), config.d_out[layer - 1])))
            layer_traces.append(trace)
        traces[layer] = RoutingTrace.merge(layer_traces)
        inputs = outputs
    roots = nc.reshape(inputs[0], (len(tree.levels[0]), config.n_aspects[0],
                                   config.aspect_dim(1)))
    return nc.take(roots, tree.root_index), traces


def score(z_u, z_v):
    """Matching score ``sum_k z_u[k] . z_v[k]`` of aspect embeddings.

    Args:
        z_u (Tensor): (..., K, dk) user embeddings
        z_v (Tensor): (..., K, dk) item embeddings

    Returns:
        Tensor of shape (...)
    """
    z_u, z_v = nc.as_tensor(z_u), nc.as_tensor(z_v)
    if z_u.shape != z_v.shape or z_u.ndim < 2:
        raise ShapeError(f'score: aspect embeddings {z_u.shape} and {z_v.shape} do not agree')
    return nc.sum(nc.sum(nc.mul(z_u, z_v), axis=-1), axis=-1)


def predict(s):
    """Interaction probability of a score."""
    return nc.sigmoid(s)


class Recommender:
    """Scores user item pairs with a trained parameter snapshot.

    Embeddings are computed once per node and cached; sampling uses a fixed seed, so a node's
    embedding does not depend on which other nodes are embedded with it.
    """

    def __init__(self, graph, params, user_type, item_type, fanouts=None, seed=0):
        """Initialize.

        Args:
            graph (HinGraph): graph to propagate over
            params (ModelParams): parameter snapshot
            user_type (str): node type of users
            item_type (str): node type of items
            fanouts: fan-out specification, see :func:`build_computation_tree`
            seed (int): sampling seed of the computation trees
        """
        self.graph = graph
        self.params = params
        self.user_type = user_type
        self.item_type = item_type
        self.fanouts = fanouts
        self.seed = seed
        self._cache = {}
        self._traces = []

    def embed(self, global_ids):
        """(n, K, dk) aspect embeddings of nodes given by global id."""
        global_ids = np.asarray(global_ids, dtype=np.int64)
        missing = np.unique([g for g in global_ids.tolist() if g not in self._cache])
        for start in range(0, len(missing), EMBED_CHUNK):
            chunk = missing[start:start + EMBED_CHUNK]
            tree = build_computation_tree(self.graph, chunk, self.params.config.n_layers,
                                          self.fanouts, self.seed)
            z, traces = forward(self.graph, tree, self.params)
            self._traces.append(traces)
            self._cache.update(zip(chunk.tolist(), z.numpy()))
        k, dk = self.params.config.n_aspects[0], self.params.config.aspect_dim(1)
        if not len(global_ids):
            return np.zeros((0, k, dk))
        return np.stack([self._cache[g] for g in global_ids.tolist()])

    def embed_nodes(self, node_type, indices):
        """Aspect embeddings of nodes of one type given by local index."""
        return self.embed(self.graph.offset(node_type) + np.asarray(indices, dtype=np.int64))

    def score_candidates(self, users, items):
        """Scores of (user, item) pairs given as equal-length local index arrays."""
        z_u = self.embed_nodes(self.user_type, users)
        z_v = self.embed_nodes(self.item_type, items)
        return np.einsum('nkd,nkd->n', z_u, z_v)

    def aspect_weights(self):
        """Layer -> RoutingTrace pooled over every embedding computed so far."""
        layers = sorted({layer for traces in self._traces for layer in traces})
        return {layer: RoutingTrace.merge(t[layer] for t in self._traces if layer in t)
                for layer in layers}
