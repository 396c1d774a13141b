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

"""Timestamped user item interactions and their chronological split."""
import logging

import numpy as np
import pandas as pd

from hinrec.core.types import MetaRelation
from hinrec.exceptions import DataError

L = logging.getLogger(__name__)

TRAIN, VALID, TEST = 'train', 'valid', 'test'
PARTITIONS = (TRAIN, VALID, TEST)
DEFAULT_FRACTIONS = (0.8, 0.1, 0.1)
COLUMNS = ['user', 'item', 'timestamp', 'partition']


class InteractionLog:
    """User item interaction records, optionally partitioned into train, valid and test.

    Records are kept in input order; ``partition`` is empty before
    :func:`chronological_split`.
    """

    def __init__(self, frame, n_users, n_items, relation, inverse=None):
        """Initialize.

        Args:
            frame (pandas.DataFrame): columns user, item, timestamp and optionally partition
            n_users (int): number of user nodes
            n_items (int): number of item nodes
            relation (MetaRelation): interaction relation, users to items
            inverse (MetaRelation): declared inverse relation, if any

        Raises:
            DataError: if an id is out of range
        """
        frame = frame.reset_index(drop=True).copy()
        if 'partition' not in frame:
            frame['partition'] = ''
        frame['user'] = frame['user'].astype(np.int64)
        frame['item'] = frame['item'].astype(np.int64)
        frame['timestamp'] = frame['timestamp'].astype(np.float64)
        self.frame = frame[COLUMNS]
        self.n_users = int(n_users)
        self.n_items = int(n_items)
        self.relation = MetaRelation(*relation)
        self.inverse = None if inverse is None else MetaRelation(*inverse)
        for column, bound in (('user', self.n_users), ('item', self.n_items)):
            values = self.frame[column].to_numpy()
            if len(values) and (values.min() < 0 or values.max() >= bound):
                raise DataError(f'{column} id outside [0, {bound}) in interaction log')

    @classmethod
    def from_arrays(cls, users, items, n_users, n_items, relation, timestamps=None,
                    inverse=None):
        """Build a log from parallel arrays; missing timestamps follow input order."""
        users = np.asarray(users, dtype=np.int64)
        if timestamps is None:
            timestamps = np.arange(len(users), dtype=np.float64)
        frame = pd.DataFrame({'user': users, 'item': np.asarray(items, dtype=np.int64),
                              'timestamp': np.asarray(timestamps, dtype=np.float64)})
        return cls(frame, n_users, n_items, relation, inverse)

    def __len__(self):
        """Number of records."""
        return len(self.frame)

    def __repr__(self):
        """Return a string representation."""
        return (f'InteractionLog<records={len(self)} users={self.n_users} '
                f'items={self.n_items} split={self.is_split}>')

    @property
    def user_type(self):
        """Node type of users."""
        return self.relation.src_type

    @property
    def item_type(self):
        """Node type of items."""
        return self.relation.dst_type

    @property
    def users(self):
        """User ids of the records."""
        return self.frame['user'].to_numpy()

    @property
    def items(self):
        """Item ids of the records."""
        return self.frame['item'].to_numpy()

    @property
    def timestamps(self):
        """Timestamps of the records."""
        return self.frame['timestamp'].to_numpy()

    @property
    def is_split(self):
        """Whether every record carries a partition label."""
        return len(self) > 0 and bool(self.frame['partition'].isin(PARTITIONS).all())

    def _with_frame(self, frame):
        return InteractionLog(frame, self.n_users, self.n_items, self.relation, self.inverse)

    def partition(self, *names):
        """Records of the given partitions, in input order."""
        unknown = set(names) - set(PARTITIONS)
        if unknown:
            raise DataError(f'unknown partitions {sorted(unknown)}')
        return self._with_frame(self.frame[self.frame['partition'].isin(names)])

    def items_by_user(self, *names):
        """Sorted unique item ids of every user, over the given partitions or all records."""
        frame = self.frame if not names else self.partition(*names).frame
        pairs = np.unique(frame['user'].to_numpy() * self.n_items + frame['item'].to_numpy())
        users, items = np.divmod(pairs, self.n_items) if self.n_items else (pairs, pairs)
        bounds = np.searchsorted(users, np.arange(self.n_users + 1))
        return [items[bounds[u]:bounds[u + 1]] for u in range(self.n_users)]

    def pair_codes(self, *names):
        """Sorted unique ``user * n_items + item`` codes over the given partitions or all."""
        frame = self.frame if not names else self.partition(*names).frame
        return np.unique(frame['user'].to_numpy() * self.n_items + frame['item'].to_numpy())

    def first_fraction(self, fraction, name=TRAIN):
        """Keep only the chronologically first ``fraction`` of one partition.

        Used to simulate sparser training data; the other partitions are untouched.
        """
        if not 0. < fraction <= 1.:
            raise DataError(f'fraction must lie in (0, 1], got {fraction}')
        part = self.frame[self.frame['partition'] == name]
        keep = part.sort_values('timestamp', kind='stable').index[:int(round(fraction *
                                                                              len(part)))]
        dropped = part.index.difference(keep)
        L.info('keeping %d of %d %s interactions', len(keep), len(part), name)
        return self._with_frame(self.frame.drop(index=dropped))


def chronological_split(log, fractions=DEFAULT_FRACTIONS):
    """Partition a log by one global sort on timestamps.

    The first ``round(f_train * n)`` records go to train, the next ``round(f_valid * n)`` to
    valid and the rest to test. Equal timestamps keep their input order.

    Raises:
        DataError: if fractions do not sum to 1 or a partition is empty
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or min(fractions) < 0 or abs(sum(fractions) - 1.) > 1e-9:
        raise DataError(f'split fractions must be three non-negative numbers summing to 1, '
                        f'got {fractions}')
    n = len(log)
    n_train = int(round(fractions[0] * n))
    n_valid = int(round(fractions[1] * n))
    sizes = (n_train, n_valid, n - n_train - n_valid)
    if min(sizes) <= 0:
        raise DataError(f'chronological split of {n} interactions gives empty partitions: '
                        f'{dict(zip(PARTITIONS, sizes))}')
    order = np.argsort(log.timestamps, kind='stable')
    labels = np.empty(n, dtype=object)
    labels[order] = np.repeat(PARTITIONS, sizes)
    frame = log.frame.copy()
    frame['partition'] = labels
    L.info('split %d interactions into %d/%d/%d', n, *sizes)
    return log._with_frame(frame)  # pylint: disable=protected-access
