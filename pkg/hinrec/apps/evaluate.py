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

"""Evaluate a trained run on a held-out split."""
import logging
from copy import deepcopy
from pathlib import Path

from hinrec.evaluation import LatentOracle, RandomScorer, build_eval_lists, evaluate
from hinrec.exceptions import ConfigError
from hinrec.io.utils import CONFIG_NAME, load_run, write_yaml
from hinrec.model.network import Recommender

L = logging.getLogger(__name__)

SCORERS = ('model', 'random', 'oracle')
METRICS_NAME = 'metrics.csv'


def make_scorer(run, scorer='model'):
    """The trained recommender of a run, or a reference scorer.

    Raises:
        ConfigError: for the oracle on a dataset without synthetic ground truth
    """
    if scorer == 'model':
        config = run.train_config
        log = run.dataset.log
        return Recommender(run.dataset.graph, run.params, log.user_type, log.item_type,
                           config.fanouts, config.seed)
    if scorer == 'random':
        return RandomScorer(run.train_config.seed)
    if scorer == 'oracle':
        truth = run.dataset.ground_truth
        if truth is None:
            raise ConfigError('the oracle scorer needs a synthetic dataset with ground truth')
        return LatentOracle(truth['user_latent'], truth['item_latent'])
    raise ConfigError(f'unknown scorer "{scorer}", choose from {SCORERS}')


def write_derived_config(run, output, snapshot=None, **eval_options):
    """Write the resolved config of an output directory derived from a run.

    The written config names the source run and its snapshot, so that :func:`load_run`
    rebuilds the run from the output directory alone. Nothing is written into the run
    directory itself.

    Args:
        run (Run): the source run
        output (str|Path): output directory
        snapshot (str|Path): parameter snapshot used instead of the run's own
        eval_options: effective ``eval`` options

    Returns:
        Path: the written config, None for the run directory
    """
    output = Path(output)
    if output.resolve() == run.directory.resolve():
        return None
    config = deepcopy(run.config)
    config['eval'].update(eval_options)
    config['dataset']['manifest'] = str(Path(config['dataset']['manifest']).resolve())
    config['output'] = str(output.resolve())
    config['run'] = str(Path(config.get('run') or run.directory).resolve())
    snapshot = snapshot or config.get('snapshot')
    config['snapshot'] = str(Path(snapshot).resolve()) if snapshot else None
    path = output / CONFIG_NAME
    write_yaml(path, config)
    return path


def evaluate_run(directory, snapshot=None, topn=None, split=None, negatives=None,
                 scorer='model', output=None):
    """Evaluate a run and write its report.

    Args:
        directory (str|Path): run directory
        snapshot (str|Path): parameter snapshot overriding the run's own
        topn (int): cutoff N overriding the run config
        split (str): evaluated split overriding the run config
        negatives (int): sampled negatives per user overriding the run config
        scorer (str): ``model``, ``random`` or ``oracle``
        output (str|Path): directory of the report files, defaults to the run directory

    Returns:
        MetricReport

    Raises:
        ConfigError: for a non-positive cutoff or a negative number of negatives
    """
    run = load_run(directory, snapshot)
    section = run.config['eval']
    topn = section['topn'] if topn is None else topn
    split = section['split'] if split is None else split
    negatives = section['negatives'] if negatives is None else negatives
    if topn < 1:
        raise ConfigError(f'cutoff must be positive, got {topn}')
    if negatives < 0:
        raise ConfigError(f'negatives must not be negative, got {negatives}')
    lists = build_eval_lists(run.dataset.log, split, negatives, section['seed'])
    report = evaluate(make_scorer(run, scorer), lists, topn, n_negatives=negatives,
                      seed=section['seed'], split=split)
    output = Path(output or directory)
    output.mkdir(parents=True, exist_ok=True)
    write_derived_config(run, output, snapshot, topn=topn, split=split, negatives=negatives)
    suffix = '' if scorer == 'model' else f'_{scorer}'
    (output / f'report_{split}{suffix}.json').write_text(report.to_json(), encoding='utf-8')
    frame = report.to_frame()
    frame.insert(0, 'scorer', scorer)
    frame.to_csv(output / METRICS_NAME, mode='a', header=not (output / METRICS_NAME).exists(),
                 index=False)
    return report
