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

"""Train a model from a run config, optionally sweeping one hyper-parameter."""
import logging
import multiprocessing
import os
import warnings
from copy import deepcopy
from functools import partial
from pathlib import Path

import pandas as pd

from hinrec.apps import (DEFAULT_CONFIG, apply_overrides, get_config, output_directory,
                         sanitize_config)
from hinrec.apps.evaluate import evaluate_run
from hinrec.data import SyntheticSpec, generate_synthetic, prepare_dataset
from hinrec.exceptions import ConfigError
from hinrec.io.utils import (CONFIG_NAME, SNAPSHOT_NAME, load_dataset, load_manifest,
                             read_ground_truth, write_dataset, write_yaml)
from hinrec.train import TrainConfig, fit

L = logging.getLogger(__name__)

SWEEP_NAME = 'sweep.csv'
SWEEP_KEYS = {
    'aspects': ('model.n_aspects', int),
    'iters': ('model.n_iterations', int),
    'layers': ('model.n_layers', int),
    'fanout': ('train.fanouts', int),
    'neg-ratio': ('train.negative_ratio', int),
    'dropout': ('model.dropout', float),
    'train-fraction': ('dataset.train_fraction', float),
}


def parse_sweep(spec):
    """Parse ``key=v1,v2,...`` into the overridden option and its values.

    Raises:
        ConfigError: for an unknown key or a malformed value
    """
    key, _, values = spec.partition('=')
    if key not in SWEEP_KEYS or not values:
        raise ConfigError(f'invalid sweep "{spec}", expected key=v1,v2,... with key in '
                          f'{sorted(SWEEP_KEYS)}')
    option, kind = SWEEP_KEYS[key]
    try:
        return key, option, [kind(v) for v in values.split(',')]
    except ValueError as e:
        raise ConfigError(f'invalid sweep value in "{spec}": {e}') from e


def resolve_dataset(config, output):
    """Materialize the dataset of a run config and point the config at its manifest.

    A synthetic dataset is generated and written under ``output/dataset``, so that the run
    directory alone is enough to rebuild it.

    Returns:
        tuple: (resolved config, Dataset)
    """
    config = deepcopy(config)
    section = config['dataset']
    if 'synthetic' in section:
        synthetic = dict(section['synthetic'])
        seed = synthetic.pop('seed', config['seed'])
        try:
            spec = SyntheticSpec.from_dict(synthetic)
        except TypeError as e:
            raise ConfigError(f'invalid synthetic dataset spec: {e}') from e
        graph, log, ground_truth = generate_synthetic(spec, seed)
        section['manifest'] = write_dataset(Path(output, 'dataset'), graph, log, ground_truth,
                                            section.get('core_filter'))
    manifest = load_manifest(section['manifest'])
    section['manifest'] = str(Path(section['manifest']).resolve())
    section['core_filter'] = section.get('core_filter', manifest.get('core_filter'))
    graph, log = load_dataset(manifest)
    dataset = prepare_dataset(graph, log, section['core_filter'], section['fractions'],
                              section['train_fraction'], read_ground_truth(manifest['root']))
    return config, dataset


def train_run(config, output):
    """Train one model and write its artifacts.

    Writes the resolved config, the line-delimited training log and the best parameter
    snapshot into ``output``.

    Returns:
        Path: the output directory
    """
    output = Path(output)
    output.mkdir(parents=True, exist_ok=True)
    config, dataset = resolve_dataset(config, output)
    config['output'] = str(output.resolve())
    train_config = TrainConfig.from_run_config(config)
    write_yaml(output / CONFIG_NAME, config)
    result = fit(dataset.graph, dataset.log, train_config, output=output)
    result.params.save(output / SNAPSHOT_NAME)
    L.info('best validation recall %.4f at epoch %d', result.state.best_metric,
           result.state.best_epoch)
    return output


def _sweep_point(value, config, key, option, output):
    """Train and evaluate one sweep value; the function called by multiprocessing.Pool."""
    point = apply_overrides(config, {option: value})
    directory = train_run(point, Path(output, f'sweep-{key}-{value}'))
    frame = evaluate_run(directory).to_frame()
    frame.insert(0, 'value', value)
    frame.insert(0, 'sweep', key)
    return frame


def sweep(config, spec, output, n_workers=1):
    """Run train and evaluate for every value of a sweep and append the rows to sweep.csv."""
    key, option, values = parse_sweep(spec)
    func = partial(_sweep_point, config=config, key=key, option=option, output=output)
    if n_workers == 1:
        frames = list(map(func, values))
    else:
        if n_workers > os.cpu_count():
            warnings.warn(f'n_workers ({n_workers}) > os.cpu_count() ({os.cpu_count()}))')
        with multiprocessing.Pool(n_workers) as pool:
            frames = list(pool.imap(func, values))
    path = Path(output, SWEEP_NAME)
    table = pd.concat(frames, ignore_index=True)
    table.to_csv(path, mode='a', header=not path.exists(), index=False)
    L.info('appended %d sweep rows to %s', len(table), path)
    return table


def main(config, output, overrides=None, sweep_spec=None, n_workers=1):
    """Main function that trains a model.

    Args:
        config (str|Path): path to a run config file
        output (str|Path): output directory, overriding the config
        overrides (dict): ``{'section.key': value}`` command-line overrides
        sweep_spec (str): ``key=v1,v2,...`` sweep specification
        n_workers (int): number of processes for sweeps
    """
    config = sanitize_config(get_config(config, DEFAULT_CONFIG))
    config = apply_overrides(config, overrides or {})
    output = output_directory(config, output)
    if sweep_spec:
        return sweep(config, sweep_spec, output, n_workers)
    return train_run(config, output)
