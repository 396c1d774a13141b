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

"""Model dimensions and trainable parameters."""
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from hinrec.core.types import MetaRelation
from hinrec.exceptions import ConfigError, SnapshotError
from hinrec.numcore import Tensor

L = logging.getLogger(__name__)

FEATURES = 'features'
FEATURE_STD = 0.1


@dataclass(frozen=True)
class ModelConfig:
    """Dimensions of the stacked propagation layers.

    Per-layer tuples are indexed by layer 1..L, layer 1 producing the root embeddings.

    Attributes:
        d_in (int): size of the free input embedding of every node
        d_out (tuple[int]): output size of each layer
        n_aspects (tuple[int]): number of aspects K of each layer, non-increasing with depth
        n_iterations (int): routing iterations I per layer
        dropout (float): dropout rate used during training
        per_relation_weight (bool): one routing matrix per relation instead of one per layer
        precision (int): 64 or 32 bit parameters
    """
    d_in: int = 100
    d_out: tuple = (100, 100)
    n_aspects: tuple = (5, 5)
    n_iterations: int = 5
    dropout: float = 0.0
    per_relation_weight: bool = False
    precision: int = 64

    def __post_init__(self):
        """Validate the dimensions."""
        object.__setattr__(self, 'd_out', tuple(int(d) for d in self.d_out))
        object.__setattr__(self, 'n_aspects', tuple(int(k) for k in self.n_aspects))
        if len(self.d_out) != len(self.n_aspects) or not self.d_out:
            raise ConfigError(f'd_out {self.d_out} and n_aspects {self.n_aspects} must give '
                              'one entry per layer')
        if self.d_in < 1 or min(self.d_out) < 1 or min(self.n_aspects) < 1:
            raise ConfigError('d_in, d_out and n_aspects must be positive')
        for layer, (d, k) in enumerate(zip(self.d_out, self.n_aspects), 1):
            if d % k:
                raise ConfigError(f'layer {layer}: d_out {d} is not divisible by K={k}')
        if any(a < b for a, b in zip(self.n_aspects, self.n_aspects[1:])):
            raise ConfigError(f'aspect counts must not increase with depth: {self.n_aspects}')
        if self.n_iterations < 1:
            raise ConfigError(f'n_iterations must be at least 1, got {self.n_iterations}')
        if not 0. <= self.dropout < 1.:
            raise ConfigError(f'dropout must lie in [0, 1), got {self.dropout}')
        if self.precision not in (32, 64):
            raise ConfigError(f'precision must be 32 or 64, got {self.precision}')

    @property
    def n_layers(self):
        """Number of propagation layers L."""
        return len(self.d_out)

    @property
    def dtype(self):
        """Numpy dtype of the parameters."""
        return np.float64 if self.precision == 64 else np.float32

    def aspect_dim(self, layer):
        """Per-aspect dimension ``d_out / K`` of a layer (1-based)."""
        return self.d_out[layer - 1] // self.n_aspects[layer - 1]

    def input_dim(self, layer):
        """Input size of a layer (1-based): the free embeddings feed the deepest layer."""
        return self.d_in if layer == self.n_layers else self.d_out[layer]

    def to_dict(self):
        """Plain mapping of the fields."""
        d = asdict(self)
        d['d_out'], d['n_aspects'] = list(self.d_out), list(self.n_aspects)
        return d


def projection_name(layer, node_type):
    """Parameter name of the channel projections of a node type."""
    return f'layer{layer}/projection/{node_type}'


def intra_attention_name(layer, relation):
    """Parameter name of the neighbor attention vector of a relation."""
    return f'layer{layer}/intra_attention/{MetaRelation(*relation).key}'


def semantic_attention_name(layer, relation):
    """Parameter name of the aspect attention vector of a relation."""
    return f'layer{layer}/semantic_attention/{MetaRelation(*relation).key}'


def semantic_weight_name(layer, relation=None):
    """Parameter name of the routing matrix, shared by the layer unless a relation is given."""
    if relation is None:
        return f'layer{layer}/semantic_weight'
    return f'layer{layer}/semantic_weight/{MetaRelation(*relation).key}'


@dataclass
class LayerParams:
    """Trainable symbols of one propagation layer, as tensors.

    Attributes:
        n_aspects (int): number of aspects K
        aspect_dim (int): per-aspect dimension d_out / K
        projections (dict): node type -> (d_out, d_in) matrix stacking the K channel matrices
        intra_attention (dict): relation -> attention vector of length 2 * aspect_dim
        semantic_attention (dict): relation -> attention vector of length aspect_dim
        semantic_weight: (aspect_dim, aspect_dim) matrix, or a dict relation -> matrix
    """
    n_aspects: int
    aspect_dim: int
    projections: dict = field(default_factory=dict)
    intra_attention: dict = field(default_factory=dict)
    semantic_attention: dict = field(default_factory=dict)
    semantic_weight: object = None

    def weight(self, relation):
        """Routing matrix used for ``relation``."""
        if isinstance(self.semantic_weight, dict):
            return self.semantic_weight[relation]
        return self.semantic_weight


def _glorot(rng, shape, fan_in, fan_out, dtype):
    limit = np.sqrt(6. / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def parameter_shapes(config, node_counts, relations):
    """Name -> shape of every parameter of a model over the given schema."""
    shapes = {FEATURES: (int(sum(node_counts.values())), config.d_in)}
    for layer in range(1, config.n_layers + 1):
        dk = config.aspect_dim(layer)
        for node_type in node_counts:
            shapes[projection_name(layer, node_type)] = (config.d_out[layer - 1],
                                                         config.input_dim(layer))
        for relation in relations:
            shapes[intra_attention_name(layer, relation)] = (2 * dk,)
            shapes[semantic_attention_name(layer, relation)] = (dk,)
            if config.per_relation_weight:
                shapes[semantic_weight_name(layer, relation)] = (dk, dk)
        if not config.per_relation_weight:
            shapes[semantic_weight_name(layer)] = (dk, dk)
    return shapes


class ModelParams:
    """All trainable parameters of a model, stored as a flat name -> array mapping.

    The ``features`` table holds one free embedding row per node, in global id order.
    """

    def __init__(self, config, node_counts, relations, values):
        """Wrap parameter arrays after checking their names and shapes.

        Raises:
            SnapshotError: if a parameter is missing or has the wrong shape
        """
        self.config = config
        self.node_counts = dict(node_counts)
        self.relations = tuple(MetaRelation(*r) for r in relations)
        expected = parameter_shapes(config, self.node_counts, self.relations)
        missing = sorted(set(expected) - set(values))
        if missing:
            raise SnapshotError(f'missing parameters: {", ".join(missing)}')
        self.values = {}
        for name, shape in expected.items():
            value = np.asarray(values[name], dtype=config.dtype)
            if value.shape != shape:
                raise SnapshotError(f'parameter "{name}" has shape {value.shape}, '
                                    f'the model config requires {shape}')
            self.values[name] = value

    @classmethod
    def initialize(cls, config, graph, seed=0):
        """Random initial parameters for a model over ``graph``.

        Matrices and attention vectors are drawn from a Glorot uniform range, free embeddings
        from a normal distribution with standard deviation 0.1.
        """
        rng = np.random.default_rng(seed)
        values = {}
        for name, shape in parameter_shapes(config, graph.node_counts, graph.relations).items():
            if name == FEATURES:
                values[name] = rng.normal(0., FEATURE_STD, size=shape).astype(config.dtype)
            elif len(shape) == 2:
                layer = int(name.split('/')[0][len('layer'):])
                fan_out = config.aspect_dim(layer) if 'projection' in name else shape[0]
                values[name] = _glorot(rng, shape, shape[1], fan_out, config.dtype)
            else:
                values[name] = _glorot(rng, shape, shape[0], 1, config.dtype)
        L.debug('initialized %d parameters', sum(v.size for v in values.values()))
        return cls(config, graph.node_counts, graph.relations, values)

    def __len__(self):
        """Number of parameter arrays."""
        return len(self.values)

    @property
    def size(self):
        """Total number of scalar parameters."""
        return int(sum(v.size for v in self.values.values()))

    def copy(self):
        """Deep copy."""
        return ModelParams(self.config, self.node_counts, self.relations,
                           {k: v.copy() for k, v in self.values.items()})

    def replace(self, values):
        """New parameters with the same schema and the given arrays."""
        return ModelParams(self.config, self.node_counts, self.relations, values)

    def tensors(self):
        """Name -> constant Tensor of every parameter."""
        return {name: Tensor(value, name=name) for name, value in self.values.items()}

    def layer(self, layer, tensors):
        """Assemble the :class:`LayerParams` of a layer (1-based) from named tensors."""
        c = self.config
        if c.per_relation_weight:
            weight = {r: tensors[semantic_weight_name(layer, r)] for r in self.relations}
        else:
            weight = tensors[semantic_weight_name(layer)]
        return LayerParams(
            n_aspects=c.n_aspects[layer - 1],
            aspect_dim=c.aspect_dim(layer),
            projections={t: tensors[projection_name(layer, t)] for t in self.node_counts},
            intra_attention={r: tensors[intra_attention_name(layer, r)] for r in self.relations},
            semantic_attention={r: tensors[semantic_attention_name(layer, r)]
                                for r in self.relations},
            semantic_weight=weight)

    def save(self, path):
        """Write the parameters to a ``.npz`` archive keyed by parameter name."""
        path = Path(path)
        with open(path, 'wb') as fd:
            np.savez(fd, **self.values)
        L.info('saved %d parameters to %s', len(self), path)

    @classmethod
    def load(cls, path, config, node_counts, relations):
        """Read parameters saved by :meth:`save`.

        Raises:
            SnapshotError: if the file is missing or does not match ``config``
        """
        path = Path(path)
        if not path.exists():
            raise SnapshotError(f'snapshot not found: {path}')
        with np.load(path) as archive:
            values = {name: archive[name] for name in archive.files}
        return cls(config, node_counts, relations, values)
