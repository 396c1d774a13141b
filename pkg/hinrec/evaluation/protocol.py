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

"""Sampled-negatives evaluation protocol.

Every user with at least one interaction in the evaluated split gets one candidate list: all
of the user's split positives ranked jointly against one shared sample of negatives, drawn
uniformly among the items the user never interacted with in any split.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from hinrec import evaluation
from hinrec.data.interactions import PARTITIONS
from hinrec.evaluation.ranking import RankedList
from hinrec.exceptions import DataError
from hinrec.utils import HinRecJSON, derive_seed

L = logging.getLogger(__name__)

DEFAULT_METRICS = ('precision', 'recall', 'ndcg')


def _sample_excluding(rng, n_items, observed, count):
    """``count`` distinct items uniformly among those not in the sorted ``observed``."""
    eligible = n_items - len(observed)
    if eligible <= count:
        return np.setdiff1d(np.arange(n_items), observed)
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < count:
        draw = rng.integers(n_items, size=2 * (count - len(chosen)) + 8)
        draw = draw[~np.isin(draw, observed)]
        _, first = np.unique(np.concatenate([chosen, draw]), return_index=True)
        chosen = np.concatenate([chosen, draw])[np.sort(first)]
    return chosen[:count]


def build_eval_lists(log, split, n_neg=100, seed=0):
    """Candidate lists of every user with positives in ``split``.

    Args:
        log (InteractionLog): split interaction log
        split (str): ``valid`` or ``test``
        n_neg (int): negatives per user
        seed (int): sampling seed; a user's negatives depend only on the seed and the user

    Returns:
        list[RankedList]: unscored lists ordered by user

    Raises:
        DataError: if the split has no interactions
    """
    if split not in PARTITIONS:
        raise DataError(f'unknown split "{split}"')
    positives = log.items_by_user(split)
    observed = log.items_by_user()
    lists, shortfall = [], 0
    for user, items in enumerate(positives):
        if not len(items):
            continue
        rng = np.random.default_rng(derive_seed(seed, user))
        negatives = _sample_excluding(rng, log.n_items, observed[user], n_neg)
        missing = n_neg - len(negatives)
        shortfall += missing
        lists.append(RankedList(user, np.concatenate([items, negatives]),
                                np.arange(len(items) + len(negatives)) < len(items),
                                shortfall=missing))
    if not lists:
        raise DataError(f'no interactions in the {split} split')
    if shortfall:
        L.warning('%s lists: %d negatives missing, too few eligible items', split, shortfall)
    L.info('built %d %s lists with %d negatives each', len(lists), split, n_neg)
    return lists


@dataclass
class MetricReport:
    """Per-user and mean ranking metrics at a cutoff.

    Attributes:
        n (int): cutoff N
        n_negatives (int): negatives sampled per user
        seed (int): sampling seed of the lists
        split (str): evaluated split
        per_user (pandas.DataFrame): one row per user
    """
    n: int
    n_negatives: int
    seed: int
    split: str
    per_user: pd.DataFrame = field(repr=False)

    @property
    def means(self):
        """Metric name -> unweighted mean over users."""
        return {name: float(self.per_user[name].mean()) for name in self.metric_names}

    @property
    def metric_names(self):
        """Names of the reported metrics."""
        return [c for c in self.per_user.columns if c in evaluation.metric_names()]

    @property
    def precision(self):
        """Mean Prec@N."""
        return self.means['precision']

    @property
    def recall(self):
        """Mean Recall@N."""
        return self.means['recall']

    @property
    def ndcg(self):
        """Mean NDCG@N."""
        return self.means['ndcg']

    def to_dict(self):
        """Mapping with means and per-user rows."""
        return {'n': self.n, 'n_negatives': self.n_negatives, 'seed': self.seed,
                'split': self.split, 'users': len(self.per_user),
                'shortfall': int(self.per_user['shortfall'].sum()), 'mean': self.means,
                'per_user': self.per_user.to_dict(orient='records')}

    def to_json(self):
        """JSON text of :meth:`to_dict`."""
        return json.dumps(self.to_dict(), indent=2, cls=HinRecJSON)

    def to_frame(self):
        """One-row frame of the means, for sweep tables."""
        row = {'split': self.split, 'n': self.n, 'n_negatives': self.n_negatives,
               'seed': self.seed, 'users': len(self.per_user)}
        row.update({f'{name}@{self.n}': value for name, value in self.means.items()})
        return pd.DataFrame([row])


def evaluate(scorer, lists, n=10, metrics=DEFAULT_METRICS, n_negatives=None, seed=None,
             split='test'):
    """Score candidate lists and aggregate ranking metrics.

    Args:
        scorer: object with ``score_candidates(users, items)`` returning one score per pair
        lists (list[RankedList]): lists from :func:`build_eval_lists`
        n (int): cutoff N
        metrics (tuple[str]): registered metric names
        n_negatives (int): recorded in the report, defaults to the largest negative count
        seed (int): recorded in the report
        split (str): recorded in the report

    Returns:
        MetricReport
    """
    if n <= 0:
        raise ValueError(f'cutoff must be positive, got {n}')
    sizes = [len(ranked) for ranked in lists]
    users = np.repeat([ranked.user for ranked in lists], sizes)
    items = np.concatenate([ranked.items for ranked in lists])
    scores = np.split(np.asarray(scorer.score_candidates(users, items), dtype=np.float64),
                      np.cumsum(sizes)[:-1])
    rows = []
    for ranked, values in zip(lists, scores):
        scored = ranked.with_scores(values)
        row = {'user': ranked.user, 'positives': ranked.n_positives,
               'shortfall': ranked.shortfall}
        row.update({name: evaluation.get(name, scored, n) for name in metrics})
        rows.append(row)
    if n_negatives is None:
        n_negatives = max(len(r) - r.n_positives + r.shortfall for r in lists)
    report = MetricReport(n, n_negatives, seed, split, pd.DataFrame(rows))
    L.info('evaluated %d users: %s', len(rows),
           ', '.join(f'{k}@{n}={v:.4f}' for k, v in report.means.items()))
    return report


class RandomScorer:
    """Chance baseline: independent uniform scores, reproducible per call."""

    def __init__(self, seed=0):
        """Initialize with a seed."""
        self.seed = seed

    def score_candidates(self, users, items):
        """Uniform random scores."""
        return np.random.default_rng(self.seed).random(len(items))


class LatentOracle:
    """Scores pairs by the inner product of known latent vectors."""

    def __init__(self, user_latent, item_latent):
        """Initialize with (n_users, d) and (n_items, d) latent matrices."""
        self.user_latent = np.asarray(user_latent, dtype=np.float64)
        self.item_latent = np.asarray(item_latent, dtype=np.float64)

    def score_candidates(self, users, items):
        """Latent affinities."""
        return np.einsum('nd,nd->n', self.user_latent[users], self.item_latent[items])
