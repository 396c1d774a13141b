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

"""Training hyper-parameters."""
from dataclasses import asdict, dataclass

from hinrec.exceptions import ConfigError
from hinrec.model.params import ModelConfig


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training run needs besides the data.

    Per-layer tuples are indexed by layer 1..L. ``fanouts`` is anything
    :func:`hinrec.core.sampling.build_computation_tree` accepts.

    Attributes:
        learning_rate (float): Adam step size
        batch_size (int): user item pairs per batch, positives and negatives together
        negative_ratio (int): sampled negatives per positive
        max_epochs (int): upper bound on the number of epochs
        patience (int): epochs without validation improvement before stopping
        seed (int): seed of initialization, shuffling, negatives, sampling and dropout
        fanouts: neighbors sampled per relation
        resample_trees (bool): draw new neighborhoods every epoch
        eval_negatives (int): sampled negatives per validation user
        eval_seed (int): seed of the validation negatives, fixed for the whole run
        topn (int): cutoff N of the validation metric
    """
    learning_rate: float = 0.005
    batch_size: int = 1024
    negative_ratio: int = 4
    max_epochs: int = 200
    patience: int = 20
    seed: int = 0
    fanouts: object = 10
    resample_trees: bool = True
    eval_negatives: int = 100
    eval_seed: int = 0
    topn: int = 10
    d_in: int = 100
    d_out: tuple = (100, 100)
    n_aspects: tuple = (5, 5)
    n_iterations: int = 5
    dropout: float = 0.0
    per_relation_weight: bool = False
    precision: int = 64

    def __post_init__(self):
        """Validate the values."""
        for name in ('batch_size', 'negative_ratio', 'max_epochs', 'patience',
                     'eval_negatives', 'topn'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f'{name} must be a positive integer, got {value!r}')
        if not self.learning_rate > 0.:
            raise ConfigError(f'learning_rate must be positive, got {self.learning_rate}')
        self.model_config()

    def model_config(self):
        """The :class:`ModelConfig` of the run; raises ConfigError on invalid dimensions."""
        return ModelConfig(d_in=self.d_in, d_out=self.d_out, n_aspects=self.n_aspects,
                           n_iterations=self.n_iterations, dropout=self.dropout,
                           per_relation_weight=self.per_relation_weight,
                           precision=self.precision)

    @property
    def positives_per_batch(self):
        """Positives P of a full batch, each followed by its negatives."""
        return max(1, self.batch_size // (1 + self.negative_ratio))

    @classmethod
    def from_dict(cls, values):
        """Build from a mapping; unknown keys raise ConfigError."""
        unknown = set(values) - set(cls.__dataclass_fields__)  # pylint: disable=no-member
        if unknown:
            raise ConfigError(f'unknown training options: {sorted(unknown)}')
        values = dict(values)
        for key in ('d_out', 'n_aspects'):
            if key in values:
                values[key] = tuple(values[key])
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    def to_dict(self):
        """Plain mapping of the fields."""
        d = asdict(self)
        d['d_out'], d['n_aspects'] = list(self.d_out), list(self.n_aspects)
        return d

    @classmethod
    def from_run_config(cls, config):
        """Build from the ``model``, ``train`` and ``eval`` sections of a sanitized run config."""
        values = {k: v for k, v in config['model'].items() if k != 'n_layers'}
        values.update(config['train'])
        values.update({'eval_negatives': config['eval']['negatives'],
                       'topn': config['eval']['topn'],
                       'eval_seed': config['eval']['seed'],
                       'seed': config['seed']})
        return cls.from_dict(values)
