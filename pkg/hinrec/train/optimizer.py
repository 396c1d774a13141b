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

"""Adam optimizer state and update."""
from dataclasses import dataclass, field, replace

import numpy as np

from hinrec.exceptions import NonFiniteGradientError


@dataclass
class TrainState:
    """Parameters with their Adam moments and early-stopping bookkeeping.

    Attributes:
        params (ModelParams): current parameters
        first_moment (dict): name -> running mean of the gradients
        second_moment (dict): name -> running mean of the squared gradients
        step (int): number of applied updates
        epoch (int): completed epochs
        best_metric (float): best validation metric so far
        best_epoch (int): epoch of the best metric, 0 before any validation
        epochs_since_best (int): completed epochs since the best metric
    """
    params: object
    first_moment: dict = field(default_factory=dict)
    second_moment: dict = field(default_factory=dict)
    step: int = 0
    epoch: int = 0
    best_metric: float = -np.inf
    best_epoch: int = 0
    epochs_since_best: int = 0

    @classmethod
    def initial(cls, params):
        """State with zero moments."""
        return cls(params,
                   {k: np.zeros_like(v) for k, v in params.values.items()},
                   {k: np.zeros_like(v) for k, v in params.values.items()})

    def record_metric(self, value):
        """Update the early-stopping bookkeeping after an epoch; True on strict improvement."""
        self.epoch += 1
        if value > self.best_metric:
            self.best_metric = value
            self.best_epoch = self.epoch
            self.epochs_since_best = 0
            return True
        self.epochs_since_best += 1
        return False


def check_gradients(gradients):
    """Raise NonFiniteGradientError for the first gradient holding NaN or Inf."""
    for name, grad in gradients.items():
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradientError(name)


def adam_step(state, gradients, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam update.

    Args:
        state (TrainState): current state, left untouched
        gradients (dict): name -> gradient array of every parameter
        lr (float): step size

    Returns:
        TrainState: the updated state

    Raises:
        NonFiniteGradientError: if a gradient is not finite; nothing is updated
    """
    check_gradients(gradients)
    step = state.step + 1
    values, first, second = {}, {}, {}
    for name, theta in state.params.values.items():
        g = gradients[name]
        first[name] = beta1 * state.first_moment[name] + (1. - beta1) * g
        second[name] = beta2 * state.second_moment[name] + (1. - beta2) * g * g
        m_hat = first[name] / (1. - beta1 ** step)
        v_hat = second[name] / (1. - beta2 ** step)
        values[name] = theta - lr * m_hat / (np.sqrt(v_hat) + eps)
    return replace(state, params=state.params.replace(values), first_moment=first,
                   second_moment=second, step=step)
