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

"""Statistical analysis helper functions.

Nothing fancy. Just commonly used functions using scipy functionality.
"""

from collections import namedtuple

import numpy as np
from scipy import stats as _st
from scipy.optimize import linear_sum_assignment

Stats = namedtuple('Stats', ['dist', 'pvalue'])
AspectMatch = namedtuple('AspectMatch', ['assignment', 'matched', 'fraction'])


def uniformity(counts):
    """Chi-square test of observed counts against a uniform distribution.

    Returns:
        Stats: the chi-square statistic and its p-value; small p-values reject uniformity
    """
    results = _st.chisquare(np.asarray(counts, dtype=np.float64))
    return Stats(float(results.statistic), float(results.pvalue))


def match_aspects(planted, learned):
    """Match learned aspects to planted ones under the best global permutation.

    Arguments:
        planted (dict): relation key -> planted aspect index
        learned (dict): relation key -> learned aspect weights (one entry per learned aspect)

    Returns:
        AspectMatch: ``assignment`` maps planted to learned aspect, ``matched`` maps each
        relation to whether its major learned aspect is the one assigned to its planted aspect,
        ``fraction`` is the share of matched relations
    """
    keys = [k for k in planted if k in learned]
    if not keys:
        return AspectMatch({}, {}, 0.)
    n_true = max(planted[k] for k in keys) + 1
    n_learned = len(next(iter(learned.values())))
    weight = np.zeros((n_true, n_learned))
    for key in keys:
        weight[planted[key]] += np.asarray(learned[key])
    rows, cols = linear_sum_assignment(weight, maximize=True)
    assignment = {int(r): int(c) for r, c in zip(rows, cols)}
    matched = {k: assignment.get(planted[k]) == int(np.argmax(learned[k])) for k in keys}
    return AspectMatch(assignment, matched, float(np.mean(list(matched.values()))))

