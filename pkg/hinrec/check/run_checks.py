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

"""Invariant checks of a trained run.

Every check takes a :class:`hinrec.io.utils.Run` and optional thresholds, and returns a
:class:`CheckResult` whose info lists the offending items.
"""
import numpy as np

from hinrec.check import CheckResult
from hinrec.data.interactions import PARTITIONS, TEST, TRAIN, VALID
from hinrec.data.filtering import relation_threshold_violations
from hinrec.model.network import Recommender


def _recommender(run):
    config = run.train_config
    log = run.dataset.log
    return Recommender(run.dataset.graph, run.params, log.user_type, log.item_type,
                       config.fanouts, config.seed)


def _sample_nodes(run, node_type, count):
    n = run.dataset.graph.count(node_type)
    rng = np.random.default_rng(run.train_config.seed)
    return np.sort(rng.choice(n, size=min(n, count), replace=False))


def has_finite_parameters(run):
    """Check that every parameter of the snapshot is finite.

    Returns:
        CheckResult with the names of non-finite parameters
    """
    bad = sorted(name for name, value in run.params.values.items()
                 if not np.all(np.isfinite(value)))
    return CheckResult(len(bad) == 0, bad)


def has_chronological_split(run):
    """Check that no training record is later than a validation or test record.

    Returns:
        CheckResult with the offending partition pairs
    """
    frame = run.dataset.log.frame
    stamps = {name: frame.loc[frame['partition'] == name, 'timestamp'] for name in PARTITIONS}
    bad = []
    for earlier, later in ((TRAIN, VALID), (VALID, TEST), (TRAIN, TEST)):
        if len(stamps[earlier]) and len(stamps[later]) and \
                stamps[earlier].max() > stamps[later].min():
            bad.append((earlier, later))
    return CheckResult(len(bad) == 0, bad)


def has_core_thresholds(run):
    """Check that the dataset satisfies the core filter of the run.

    Interaction thresholds are checked on all interactions of the split log, and skipped when
    the run kept only part of its training split.

    Returns:
        CheckResult with (relation or node type, count of violating nodes) pairs
    """
    thresholds = run.config['dataset'].get('core_filter') or {}
    log = run.dataset.log
    bad = []
    if run.config['dataset']['train_fraction'] < 1.:
        thresholds = {'relations': thresholds.get('relations', {})}
    counts = {log.user_type: np.bincount(log.users, minlength=log.n_users),
              log.item_type: np.bincount(log.items, minlength=log.n_items)}
    for node_type, minimum in thresholds.get('interactions', {}).items():
        low = int(np.count_nonzero(counts[node_type] < minimum))
        if low:
            bad.append((node_type, low))
    interactions = {log.relation, log.inverse}
    for relation, low in relation_threshold_violations(run.dataset.graph,
                                                       thresholds.get('relations', {})):
        if relation not in interactions:
            bad.append((relation.key, low))
    return CheckResult(len(bad) == 0, bad)


def has_unit_norm_aspects(run, n_nodes=50, tol=1e-6):
    """Check that every aspect embedding of a node sample has unit norm.

    Arguments:
        run(Run): the run to test
        n_nodes(int): users and items sampled
        tol(float): allowed deviation from 1

    Returns:
        CheckResult with the (type, index) pairs of offending nodes
    """
    recommender = _recommender(run)
    bad = []
    for node_type in (recommender.user_type, recommender.item_type):
        nodes = _sample_nodes(run, node_type, n_nodes)
        norms = np.linalg.norm(recommender.embed_nodes(node_type, nodes), axis=-1)
        bad.extend((node_type, int(i)) for i in nodes[np.any(np.abs(norms - 1.) > tol, axis=1)])
    return CheckResult(len(bad) == 0, bad)


def has_simplex_aspect_weights(run, n_nodes=50, tol=1e-6):
    """Check that the routing weights of every relation sum to one over the aspects.

    Returns:
        CheckResult with the (layer, relation key) pairs holding a bad row
    """
    recommender = _recommender(run)
    for node_type in (recommender.user_type, recommender.item_type):
        recommender.embed_nodes(node_type, _sample_nodes(run, node_type, n_nodes))
    bad = []
    for layer, trace in recommender.aspect_weights().items():
        for relation, weights in trace.aspect_weights.items():
            if np.any(np.abs(weights.sum(axis=-1) - 1.) > tol) or np.any(weights < 0.):
                bad.append((layer, relation.key))
    return CheckResult(len(bad) == 0, bad)


def has_best_snapshot(run):
    """Check that the training log reaches its best recall at the last improving epoch.

    The best epoch must be the first one reaching the maximal validation recall, and training
    must have stopped within the patience window after it.

    Returns:
        CheckResult with a description of the violation
    """
    history = run.history
    if not history:
        return CheckResult(False, ['no training log'])
    recall = np.array([record['recall'] for record in history])
    best = int(np.argmax(recall))
    patience = run.train_config.patience
    stopped_early = len(history) < run.train_config.max_epochs
    if stopped_early and len(history) - 1 - best != patience:
        return CheckResult(False, [f'best epoch {best + 1} of {len(history)} with patience '
                                   f'{patience}'])
    return CheckResult(True)
