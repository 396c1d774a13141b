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

"""Ranking metrics with binary relevance."""
from dataclasses import dataclass

import numpy as np

from hinrec.evaluation import metric


@dataclass(frozen=True)
class RankedList:
    """Candidates of one user: split positives plus sampled negatives.

    Attributes:
        user (int): user index
        items (np.ndarray): candidate item indices, positives first
        relevant (np.ndarray): true for the split positives
        scores (np.ndarray): predicted scores, None until scored
        shortfall (int): number of negatives missing because too few items were eligible
    """
    user: int
    items: np.ndarray
    relevant: np.ndarray
    scores: np.ndarray = None
    shortfall: int = 0

    def __len__(self):
        """Number of candidates."""
        return len(self.items)

    @property
    def n_positives(self):
        """Number of relevant candidates."""
        return int(np.count_nonzero(self.relevant))

    def with_scores(self, scores):
        """Copy carrying the given scores."""
        scores = np.asarray(scores, dtype=np.float64)
        if scores.shape != self.items.shape:
            raise ValueError(f'{len(scores)} scores for {len(self.items)} candidates')
        return RankedList(self.user, self.items, self.relevant, scores, self.shortfall)

    def ranking(self):
        """Candidate positions by descending score, ties by ascending item id."""
        if self.scores is None:
            raise ValueError(f'candidate list of user {self.user} is not scored')
        return np.lexsort((self.items, -self.scores))

    def hits(self, n):
        """Relevance flags of the top ``n`` candidates in rank order."""
        if n <= 0:
            raise ValueError(f'cutoff must be positive, got {n}')
        return self.relevant[self.ranking()[:n]]


def _discounts(count):
    return 1. / np.log2(np.arange(2, count + 2))


@metric(name='precision')
def precision_at(ranked, n):
    """Share of the top ``n`` that is relevant."""
    return float(np.count_nonzero(ranked.hits(n))) / n


@metric(name='recall')
def recall_at(ranked, n):
    """Share of the relevant items ranked in the top ``n``."""
    positives = ranked.n_positives
    return float(np.count_nonzero(ranked.hits(n))) / positives if positives else 0.


@metric(name='ndcg')
def ndcg_at(ranked, n):
    """Normalized discounted cumulative gain with binary gains and a log2 discount."""
    hits = ranked.hits(n)
    ideal = _discounts(min(n, ranked.n_positives)).sum()
    if not ideal:
        return 0.
    return float(_discounts(len(hits))[hits].sum() / ideal)
