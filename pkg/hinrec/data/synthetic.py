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

"""Synthetic heterogeneous datasets with planted aspects.

Users and items get latent vectors with one coordinate per true aspect. Each context relation
(brand-like entities attached to items, community-like entities attached to users) drives
exactly one aspect: all nodes attached to the same entity share that coordinate up to noise.
Interactions are Bernoulli draws with probability ``expit(scale * <u, v> / K + bias)``, the
bias being calibrated to the requested number of interactions per user.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from hinrec.core.graph import build_graph
from hinrec.core.types import MetaRelation
from hinrec.data.interactions import InteractionLog
from hinrec.exceptions import DataError

L = logging.getLogger(__name__)

USER, ITEM = 'user', 'item'
INTERACT, INTERACT_INVERSE = 'interact', 'interacted_by'
SIDES = (USER, ITEM)


@dataclass(frozen=True)
class ContextSpec:
    """A context relation: ``entities`` nodes of type ``name`` attached to ``side`` nodes."""
    name: str
    entities: int
    aspect: int
    side: str = ITEM

    @property
    def relation(self):
        """Relation from the entity to the attached users or items."""
        return MetaRelation(self.name, f'{self.name}_of', self.side)

    @property
    def inverse(self):
        """Relation from the attached users or items to the entity."""
        return self.relation.inverse(f'has_{self.name}')


DEFAULT_CONTEXTS = (ContextSpec('brand', 50, 0, ITEM),
                    ContextSpec('category', 30, 1, ITEM),
                    ContextSpec('community', 40, 2, USER))


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic generator.

    Attributes:
        n_aspects (int): true aspect count K*
        n_users (int): number of users
        n_items (int): number of items
        interactions_per_user (float): expected interactions per user
        noise (float): standard deviation of the per-node deviation from the entity value
        affinity_scale (float): logit scale of the aspect-summed affinity
        contexts (tuple[ContextSpec]): context relations with their planted aspect; by default
            a brand, a category and a community relation planted on aspects 0, 1 and 2
            modulo K*
    """
    n_aspects: int = 3
    n_users: int = 2000
    n_items: int = 1000
    interactions_per_user: float = 20.
    noise: float = 0.1
    affinity_scale: float = 8.
    contexts: tuple = None

    def __post_init__(self):
        """Coerce context mappings and validate."""
        if self.n_aspects < 1 or self.n_users < 1 or self.n_items < 1:
            raise DataError('synthetic spec needs at least one aspect, user and item')
        if self.contexts is None:
            object.__setattr__(self, 'contexts', tuple(
                ContextSpec(c.name, c.entities, c.aspect % self.n_aspects, c.side)
                for c in DEFAULT_CONTEXTS))
        contexts = tuple(c if isinstance(c, ContextSpec) else ContextSpec(**c)
                         for c in self.contexts)
        object.__setattr__(self, 'contexts', contexts)
        if not 0. < self.interactions_per_user < self.n_items:
            raise DataError(f'interactions_per_user must lie in (0, {self.n_items}), '
                            f'got {self.interactions_per_user}')
        if self.noise < 0. or self.affinity_scale <= 0.:
            raise DataError('noise must be non-negative and affinity_scale positive')
        names = [c.name for c in contexts]
        if len(set(names)) != len(names) or set(names) & set(SIDES) or \
                any('-' in n for n in names):
            raise DataError(f'context names must be unique, free of "-" and differ from '
                            f'{SIDES}: {names}')
        for c in contexts:
            if c.side not in SIDES or c.entities < 1 or not 0 <= c.aspect < self.n_aspects:
                raise DataError(f'invalid context relation {c}')

    @classmethod
    def from_dict(cls, data):
        """Build from a plain mapping, e.g. a yaml section."""
        return cls(**dict(data))

    def to_dict(self):
        """Plain mapping of the fields."""
        d = asdict(self)
        d['contexts'] = [asdict(c) for c in self.contexts]
        return d


def _latents(spec, rng, side, count):
    """Latent vectors of one side and the entity assignment of each of its contexts."""
    latent = rng.normal(size=(count, spec.n_aspects))
    planted = {}
    for c in spec.contexts:
        if c.side == side:
            planted.setdefault(c.aspect, []).append(c)
    assignment = {}
    for aspect, contexts in planted.items():
        value = np.zeros(count)
        for c in contexts:
            entity_values = rng.normal(size=c.entities)
            assignment[c.name] = rng.integers(c.entities, size=count)
            value += entity_values[assignment[c.name]]
        latent[:, aspect] = value / np.sqrt(len(contexts)) + spec.noise * rng.normal(size=count)
    return latent, assignment


def _calibrate_bias(logits, target):
    """Bias giving ``target`` expected interactions per row."""
    def excess(bias):
        return expit(logits + bias).sum(axis=1).mean() - target
    return brentq(excess, -60., 60., xtol=1e-8)


def generate_synthetic(spec, seed=0):
    """Draw a synthetic dataset.

    Args:
        spec (SyntheticSpec): generator parameters
        seed (int): random seed

    Returns:
        tuple: (HinGraph, unsplit InteractionLog, ground truth dict) where the ground truth holds
        the planted aspect of each context relation key and the latent vectors
    """
    rng = np.random.default_rng(seed)
    user_latent, user_assignment = _latents(spec, rng, USER, spec.n_users)
    item_latent, item_assignment = _latents(spec, rng, ITEM, spec.n_items)
    logits = spec.affinity_scale * (user_latent @ item_latent.T) / spec.n_aspects
    bias = _calibrate_bias(logits, spec.interactions_per_user)
    users, items = np.nonzero(rng.random(logits.shape) < expit(logits + bias))
    if not len(users):
        raise DataError('synthetic spec produced no interactions')
    order = rng.permutation(len(users))
    users, items = users[order], items[order]
    timestamps = rng.random(len(users))

    interact = MetaRelation(USER, INTERACT, ITEM)
    inverse = interact.inverse(INTERACT_INVERSE)
    counts = {USER: spec.n_users, ITEM: spec.n_items}
    edges = {interact: (users, items), inverse: (items, users)}
    assignments = {USER: user_assignment, ITEM: item_assignment}
    for c in spec.contexts:
        counts[c.name] = c.entities
        attached = np.arange(counts[c.side])
        entity = assignments[c.side][c.name]
        edges[c.relation] = (entity, attached)
        edges[c.inverse] = (attached, entity)
    graph = build_graph(counts, edges)
    log = InteractionLog.from_arrays(users, items, spec.n_users, spec.n_items, interact,
                                     timestamps=timestamps, inverse=inverse)
    ground_truth = {
        'n_aspects': spec.n_aspects,
        'seed': seed,
        'bias': float(bias),
        'planted': {c.relation.key: c.aspect for c in spec.contexts},
        'user_latent': user_latent,
        'item_latent': item_latent,
        'spec': spec.to_dict(),
    }
    L.info('synthetic dataset: %d interactions (%.1f per user), bias %.3f', len(log),
           len(log) / spec.n_users, bias)
    return graph, log, ground_truth
