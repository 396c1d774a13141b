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

"""Helper code for hinrec applications."""
import logging
import os
from copy import deepcopy
from pathlib import Path

import pkg_resources
import yaml

from hinrec.data.interactions import DEFAULT_FRACTIONS, TEST
from hinrec.exceptions import ConfigError

L = logging.getLogger(__name__)

CONFIG_DIR = Path(pkg_resources.resource_filename('hinrec.apps', 'config'))
DEFAULT_CONFIG = CONFIG_DIR / 'train.yaml'
OUTPUT_ROOT_ENV = 'HINREC_OUTPUT_ROOT'

DEFAULTS = {
    'seed': 0,
    'output': None,
    'run': None,
    'snapshot': None,
    'dataset': {'fractions': list(DEFAULT_FRACTIONS), 'train_fraction': 1.0},
    'model': {'n_layers': 2, 'd_in': 100, 'd_out': 100, 'n_aspects': 5, 'n_iterations': 5,
              'dropout': 0.0, 'per_relation_weight': False, 'precision': 64},
    'train': {'learning_rate': 0.005, 'batch_size': 1024, 'negative_ratio': 4,
              'max_epochs': 200, 'patience': 20, 'fanouts': 10, 'resample_trees': True},
    'eval': {'negatives': 100, 'topn': 10, 'split': TEST, 'seed': 0},
}
SECTIONS = ('dataset', 'model', 'train', 'eval')
PER_LAYER = ('d_out', 'n_aspects')


def get_config(config, default_config):
    """Load configuration from file if in config, else use default.

    Args:
        config (str|Path): path to a config file
        default_config (str|Path): path to a default config file

    Returns:
        dict: config dictionary
    """
    if not config:
        L.warning('Using default config %s', default_config)
        config = default_config
    try:
        with open(config, 'r', encoding='utf-8') as f:
            return yaml.load(f, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        raise ConfigError(f'Invalid yaml file: \n {e}') from e


def _broadcast(model):
    """Expand scalar per-layer values to one entry per layer."""
    n_layers = model['n_layers']
    for key in PER_LAYER:
        value = model[key]
        if not isinstance(value, (list, tuple)):
            value = [value] * n_layers
        elif len(value) != n_layers:
            raise ConfigError(f'model.{key} has {len(value)} entries for {n_layers} layers')
        model[key] = [int(v) for v in value]
    return model


def sanitize_config(config):
    """Fill defaults into a run config and broadcast per-layer values.

    Raises:
        ConfigError: if a section is not a mapping, a key is unknown or the dataset is missing
    """
    config = deepcopy(config) if config else {}
    if not isinstance(config, dict):
        raise ConfigError('a run config must be a mapping')
    unknown = set(config) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f'unknown config sections: {sorted(unknown)}')
    sanitized = deepcopy(DEFAULTS)
    for key, value in config.items():
        if key in SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f'config section "{key}" must be a mapping')
            if key != 'dataset':
                extra = set(value) - set(DEFAULTS[key])
                if extra:
                    raise ConfigError(f'unknown options in "{key}": {sorted(extra)}')
            sanitized[key].update(value)
        else:
            sanitized[key] = value
    dataset = sanitized['dataset']
    if ('manifest' in dataset) == ('synthetic' in dataset):
        raise ConfigError('the dataset section needs either "manifest" or "synthetic"')
    _broadcast(sanitized['model'])
    return sanitized


def apply_overrides(config, overrides):
    """Apply command-line overrides, given as ``{'section.key': value}``, to a run config.

    A ``model.n_layers`` override replaces per-layer lists by their first entry.
    """
    config = deepcopy(config)
    for dotted, value in overrides.items():
        if value is None:
            continue
        section, _, key = dotted.rpartition('.')
        target = config[section] if section else config
        target[key] = value
        if dotted == 'model.n_layers':
            for name in PER_LAYER:
                if isinstance(config['model'][name], list):
                    config['model'][name] = config['model'][name][0]
    for section in SECTIONS:
        if section in config and config[section] is None:
            config[section] = {}
    if 'model' in config:
        _broadcast(config['model'])
    return config


def output_directory(config, output=None):
    """Output directory of a run: the flag, else the config, else under HINREC_OUTPUT_ROOT."""
    if output:
        return Path(output)
    if config.get('output'):
        return Path(config['output'])
    return Path(os.environ.get(OUTPUT_ROOT_ENV, 'runs')) / f'run-seed{config["seed"]}'
