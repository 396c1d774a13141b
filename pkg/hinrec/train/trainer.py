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

"""Mini-batch training with negative sampling, Adam and early stopping."""
import json
import logging
import time
from pathlib import Path
from typing import NamedTuple

import numpy as np
from tqdm import tqdm

from hinrec import numcore as nc
from hinrec.core.sampling import build_computation_tree
from hinrec.data.interactions import TRAIN, VALID
from hinrec.evaluation.protocol import build_eval_lists, evaluate
from hinrec.exceptions import DataError, NonFiniteGradientError
from hinrec.model.network import Recommender, forward, predict, score
from hinrec.model.params import ModelParams
from hinrec.train.negatives import epoch_batches
from hinrec.train.optimizer import TrainState, adam_step
from hinrec.utils import HinRecJSON, derive_seed

L = logging.getLogger(__name__)

PROB_FLOOR = 1e-7
TRAIN_LOG_NAME = 'train_log.jsonl'


class FitResult(NamedTuple):
    """Outcome of :func:`fit`.

    Attributes:
        params (ModelParams): snapshot of the epoch with the best validation metric
        history (list[dict]): one record per epoch
        state (TrainState): optimizer state after the last epoch
    """
    params: ModelParams
    history: list
    state: TrainState


def bce_loss(scores, labels):
    """Mean binary cross-entropy of interaction probabilities ``sigmoid(scores)``.

    Probabilities are clamped to ``[1e-7, 1 - 1e-7]`` so that the loss stays finite.

    Args:
        scores (Tensor): matching scores of a batch of pairs
        labels (np.ndarray): 1 for observed pairs, 0 for sampled negatives

    Returns:
        scalar Tensor
    """
    labels = np.asarray(labels, dtype=np.float64)
    if not np.all((labels == 0.) | (labels == 1.)):
        raise ValueError('labels must be 0 or 1')
    p = nc.clip(predict(scores), PROB_FLOOR, 1. - PROB_FLOOR)
    likelihood = nc.add(nc.mul(nc.log(p), labels), nc.mul(nc.log(1. - p), 1. - labels))
    return nc.neg(nc.mean(likelihood))


def batch_loss(graph, params, tensors, users, items, labels, user_type, item_type, config,
               tree_seed, rng):
    """Loss of one batch of pairs; users and items are rooted in one shared tree."""
    roots = np.concatenate([graph.offset(user_type) + users, graph.offset(item_type) + items])
    tree = build_computation_tree(graph, roots, params.config.n_layers, config.fanouts,
                                  tree_seed)
    z, _ = forward(graph, tree, params, tensors, training=True, rng=rng)
    n = len(users)
    return bce_loss(score(z[:n], z[n:]), labels)


def validation_metrics(graph, log, config):
    """Default validator: top-N metrics on the validation split with fixed negatives."""
    if not len(log.partition(VALID)):
        raise DataError('training needs a non-empty validation split')
    lists = build_eval_lists(log, VALID, config.eval_negatives, config.eval_seed)

    def validate(params):
        recommender = Recommender(graph, params, log.user_type, log.item_type,
                                  config.fanouts, config.seed)
        report = evaluate(recommender, lists, config.topn, n_negatives=config.eval_negatives,
                          seed=config.eval_seed, split=VALID)
        return report.means

    return validate


def _train_epoch(graph, log, config, state, epoch, rng, dropout_rng):
    """Run the batches of one epoch; returns the new state, mean loss and abort flag."""
    tree_seed = derive_seed(config.seed, epoch) if config.resample_trees else config.seed
    n_batches = int(np.ceil(len(log.partition(TRAIN)) / config.positives_per_batch))
    total, count, aborted = 0., 0, False
    batches = epoch_batches(log, config.negative_ratio, config.batch_size, rng)
    progress = tqdm(batches, total=n_batches, desc=f'epoch {epoch}', leave=False,
                    disable=L.getEffectiveLevel() > logging.INFO)
    for users, items, labels in progress:
        tensors = state.params.tensors()
        with nc.GradTape() as tape:
            tape.watch(*tensors.values())
            loss = batch_loss(graph, state.params, tensors, users, items, labels,
                              log.user_type, log.item_type, config, tree_seed, dropout_rng)
        gradients = dict(zip(tensors, tape.gradient(loss, list(tensors.values()))))
        try:
            state = adam_step(state, gradients, config.learning_rate)
        except NonFiniteGradientError as e:
            L.error('epoch %d aborted: %s', epoch, e)
            aborted = True
            break
        total += float(loss.value) * len(labels)
        count += len(labels)
        progress.set_postfix(loss=f'{float(loss.value):.4f}')
    progress.close()
    return state, (total / count if count else float('nan')), aborted


def fit(graph, log, config, validator=None, output=None):
    """Train a model on the training split, early stopping on validation recall.

    Every epoch resamples negatives and shuffles the positives, then validates. Training stops
    after ``config.patience`` epochs without strict improvement of the recall, or after
    ``config.max_epochs`` epochs.

    Args:
        graph (HinGraph): training graph, see :func:`hinrec.data.training_graph`
        log (InteractionLog): split interaction log
        config (TrainConfig): hyper-parameters
        validator (callable): maps parameters to a ``{metric: value}`` mapping holding
            ``recall``; defaults to :func:`validation_metrics`
        output (str|Path): directory receiving the line-delimited training log

    Returns:
        FitResult
    """
    if not len(log.partition(TRAIN)):
        raise DataError('training needs a non-empty training split')
    if validator is None:
        validator = validation_metrics(graph, log, config)
    params = ModelParams.initialize(config.model_config(), graph, config.seed)
    state = TrainState.initial(params)
    best = params.copy()
    rng = np.random.default_rng(config.seed)
    dropout_rng = np.random.default_rng(derive_seed(config.seed, 1))
    log_path = None
    if output is not None:
        log_path = Path(output) / TRAIN_LOG_NAME
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_path.write_text('', encoding='utf-8')
    L.info('training %d parameters on %d interactions', params.size,
           len(log.partition(TRAIN)))

    history = []
    for epoch in range(1, config.max_epochs + 1):
        start = time.perf_counter()
        state, loss, aborted = _train_epoch(graph, log, config, state, epoch, rng, dropout_rng)
        metrics = validator(state.params)
        if state.record_metric(metrics['recall']):
            best = state.params.copy()
        record = {'epoch': epoch, 'loss': loss}
        record.update({name: float(value) for name, value in metrics.items()})
        record.update({'aborted': aborted, 'wall_time': time.perf_counter() - start})
        history.append(record)
        if log_path is not None:
            with open(log_path, 'a', encoding='utf-8') as fd:
                fd.write(json.dumps(record, cls=HinRecJSON) + '\n')
        L.info('epoch %d loss %.4f recall %.4f (best %.4f at epoch %d)', epoch, loss,
               metrics['recall'], state.best_metric, state.best_epoch)
        if state.epochs_since_best >= config.patience:
            L.info('early stopping after epoch %d', epoch)
            break
    return FitResult(best, history, state)
