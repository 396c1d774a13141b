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

"""hinrec: disentangled heterogeneous graph attention for top-N recommendation.

Examples:
    Generate a synthetic dataset and split it chronologically

    >>> import hinrec
    >>> graph, log, truth = hinrec.generate_synthetic(hinrec.SyntheticSpec(), seed=0)
    >>> dataset = hinrec.prepare_dataset(graph, log, ground_truth=truth)

    Train with early stopping on validation recall, then rank the test items

    >>> result = hinrec.fit(dataset.graph, dataset.log, hinrec.TrainConfig(max_epochs=20))
    >>> model = hinrec.Recommender(dataset.graph, result.params, 'user', 'item')
    >>> lists = hinrec.build_eval_lists(dataset.log, 'test', n_neg=100, seed=0)
    >>> hinrec.evaluate(model, lists, n=10).means
"""
from hinrec.core.types import MetaRelation, NodeId
from hinrec.core.graph import HinGraph, build_graph
from hinrec.core.sampling import build_computation_tree, sample_neighbors

from hinrec.data import (Dataset, InteractionLog, SyntheticSpec, chronological_split,
                         core_filter, generate_synthetic, prepare_dataset, training_graph)
from hinrec.evaluation import build_eval_lists, evaluate
from hinrec.io.utils import load_dataset, load_run
from hinrec.model import ModelConfig, ModelParams, Recommender, forward, predict, score
from hinrec.train import TrainConfig, fit
