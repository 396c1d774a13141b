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

"""Datasets: interaction logs, core filtering, splitting and synthetic generation."""
import logging
from typing import NamedTuple

from hinrec.core.graph import HinGraph, build_graph
from hinrec.data.filtering import core_filter
from hinrec.data.interactions import (DEFAULT_FRACTIONS, PARTITIONS, TEST, TRAIN, VALID,
                                      InteractionLog, chronological_split)
from hinrec.data.synthetic import ContextSpec, SyntheticSpec, generate_synthetic
from hinrec.exceptions import DataError

L = logging.getLogger(__name__)


class Dataset(NamedTuple):
    """A dataset ready for training.

    Attributes:
        graph (HinGraph): graph whose interaction relations hold training interactions only
        log (InteractionLog): split interaction log
        ground_truth (dict): planted aspects and latents of a synthetic dataset, else None
    """
    graph: HinGraph
    log: InteractionLog
    ground_truth: dict = None


def training_graph(graph, log):
    """Rebuild the interaction relation and its inverse from the training partition only.

    Validation and test interactions thus never take part in propagation. Context relations
    are kept as they are.
    """
    if not log.is_split:
        raise DataError('training_graph needs a split interaction log')
    train = log.partition(TRAIN)
    edges = {}
    for relation in graph.relations:
        if relation == log.relation:
            edges[relation] = (train.users, train.items)
        elif relation == log.inverse:
            edges[relation] = (train.items, train.users)
        else:
            edges[relation] = graph.edges(relation)
    if log.relation not in edges:
        raise DataError(f'graph lacks the interaction relation {log.relation}')
    return build_graph(graph.node_counts, edges)


def prepare_dataset(graph, log, thresholds=None, fractions=DEFAULT_FRACTIONS,
                    train_fraction=1., ground_truth=None):
    """Filter, split and restrict a loaded dataset to its training graph.

    Args:
        graph (HinGraph): graph with all interactions
        log (InteractionLog): unsplit interactions
        thresholds (dict): core filter thresholds, see :func:`core_filter`
        fractions (tuple): train, valid and test fractions
        train_fraction (float): keep only the chronologically first part of the training split
        ground_truth (dict): synthetic ground truth, passed through

    Returns:
        Dataset
    """
    if thresholds:
        graph, log = core_filter(log, graph, thresholds)
    log = chronological_split(log, fractions)
    if train_fraction < 1.:
        log = log.first_fraction(train_fraction)
    return Dataset(training_graph(graph, log), log, ground_truth)
