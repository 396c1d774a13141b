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

"""Top-N ranking evaluation.

Examples:
    Evaluate a scorer on the test split with 100 sampled negatives per user
    >>> from hinrec import evaluation
    >>> lists = evaluation.build_eval_lists(log, 'test', n_neg=100, seed=0)
    >>> report = evaluation.evaluate(recommender, lists, n=10)
    >>> report.recall
"""
from hinrec.exceptions import HinRecError

_METRICS = {}


def metric(name=None):
    """Metric decorator to register a ``f(ranked_list, n) -> float`` ranking metric.

    Arguments:
        name(string): name of the metric, used to access it via :func:`get`; defaults to the
            function name
    """

    def inner(func):
        key = name or func.__name__
        if key in _METRICS:
            raise HinRecError(f'A metric is already registered under "{key}"')
        _METRICS[key] = func
        return func

    return inner


def get(metric_name, ranked, n):
    """Value of a registered metric for one ranked list.

    Arguments:
        metric_name(string): metric to compute
        ranked (RankedList): scored candidate list
        n (int): cutoff

    Returns:
        float
    """
    try:
        func = _METRICS[metric_name]
    except KeyError as e:
        raise HinRecError(f'Unknown metric "{metric_name}", choose from '
                          f'{sorted(_METRICS)}') from e
    return func(ranked, n)


def metric_names():
    """Names of the registered metrics."""
    return sorted(_METRICS)


# These imports are necessary in order to register the metrics
from hinrec.evaluation import ranking  # noqa, pylint: disable=wrong-import-position
from hinrec.evaluation.protocol import (  # noqa, pylint: disable=wrong-import-position
    LatentOracle, MetricReport, RandomScorer, build_eval_lists, evaluate)
from hinrec.evaluation.ranking import (  # noqa, pylint: disable=wrong-import-position
    RankedList, ndcg_at, precision_at, recall_at)
