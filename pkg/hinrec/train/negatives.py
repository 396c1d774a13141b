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

"""Uniform negative sampling over unobserved user item pairs."""
import logging

import numpy as np

from hinrec.data.interactions import TRAIN

L = logging.getLogger(__name__)

MAX_REJECTION_ROUNDS = 100


def sample_negatives(log, user, ratio, seed, n_positives=None):
    """Items user ``user`` never interacted with in the training split.

    Items are drawn uniformly with replacement among the unobserved ones.

    Args:
        log (InteractionLog): split interaction log
        user (int): user index
        ratio (int): negatives per positive
        seed (int): sampling seed
        n_positives (int): positives to draw for, defaults to the user's training interactions

    Returns:
        np.ndarray: ``ratio * n_positives`` item indices, empty if every item was observed
    """
    observed = log.items_by_user(TRAIN)[user]
    if n_positives is None:
        n_positives = len(observed)
    eligible = np.setdiff1d(np.arange(log.n_items), observed)
    if not len(eligible):
        L.warning('user %d interacted with every item, no negatives sampled', user)
        return np.empty(0, dtype=np.int64)
    rng = np.random.default_rng(seed)
    return eligible[rng.integers(len(eligible), size=ratio * n_positives)]


def sample_negative_items(log, users, ratio, rng):
    """``ratio`` unobserved items for every entry of ``users``, vectorized by rejection.

    Args:
        log (InteractionLog): split interaction log
        users (np.ndarray): user of every positive
        ratio (int): negatives per positive
        rng (np.random.Generator): randomness

    Returns:
        tuple: (len(users), ratio) item array and a per-entry mask, false for users who
        interacted with every item
    """
    users = np.asarray(users, dtype=np.int64)
    observed = log.pair_codes(TRAIN)
    saturated = np.bincount(observed // log.n_items, minlength=log.n_users) >= log.n_items
    valid = ~saturated[users]
    for user in np.unique(users[~valid]):
        L.warning('user %d interacted with every item, its positives are skipped', user)
    owners = np.repeat(users, ratio).reshape(len(users), ratio)
    items = rng.integers(log.n_items, size=owners.shape)
    pending = np.isin(owners * log.n_items + items, observed) & valid[:, None]
    for _ in range(MAX_REJECTION_ROUNDS):
        if not pending.any():
            break
        items[pending] = rng.integers(log.n_items, size=int(pending.sum()))
        pending &= np.isin(owners * log.n_items + items, observed)
    for row, col in zip(*np.nonzero(pending)):
        eligible = np.setdiff1d(np.arange(log.n_items), log.items_by_user(TRAIN)[users[row]])
        items[row, col] = eligible[rng.integers(len(eligible))]
    return items, valid


def epoch_batches(log, ratio, batch_size, rng):
    """Yield the training batches of one epoch.

    Training positives are shuffled; every batch holds ``P = max(1, B // (1 + ratio))``
    positives followed by their ``ratio`` freshly sampled negatives each.

    Yields:
        tuple: users, items and float labels of a batch
    """
    train = log.partition(TRAIN)
    order = rng.permutation(len(train))
    users, items = train.users[order], train.items[order]
    per_batch = max(1, batch_size // (1 + ratio))
    negatives, valid = sample_negative_items(log, users, ratio, rng)
    users, items, negatives = users[valid], items[valid], negatives[valid]
    for start in range(0, len(users), per_batch):
        u = users[start:start + per_batch]
        neg = negatives[start:start + per_batch].ravel()
        yield (np.concatenate([u, np.repeat(u, ratio)]),
               np.concatenate([items[start:start + per_batch], neg]),
               np.concatenate([np.ones(len(u)), np.zeros(len(neg))]))
