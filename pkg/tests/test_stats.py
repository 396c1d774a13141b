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

"""Test hinrec.stats

Since the stats module consists of simple wrappers to scipy functions,
these tests are only sanity checks.
"""
import numpy as np

from hinrec import stats as st


def test_uniformity():
    assert st.uniformity([100, 100, 100]).pvalue == 1.
    assert st.uniformity([100, 100, 100]).dist == 0.
    assert st.uniformity([300, 0, 0]).pvalue < 1e-6


def test_match_aspects_permuted():
    planted = {'brand-brand_of-item': 0, 'category-category_of-item': 1,
               'community-community_of-user': 2}
    learned = {'brand-brand_of-item': [0.1, 0.1, 0.7, 0.1],
               'category-category_of-item': [0.6, 0.2, 0.1, 0.1],
               'community-community_of-user': [0.1, 0.1, 0.1, 0.7],
               'item-has_brand-brand': [0.25, 0.25, 0.25, 0.25]}
    match = st.match_aspects(planted, learned)
    assert match.assignment == {0: 2, 1: 0, 2: 3}
    assert all(match.matched.values())
    assert match.fraction == 1.


def test_match_aspects_conflict():
    planted = {'a-x-b': 0, 'c-y-b': 1}
    learned = {'a-x-b': [0.9, 0.1], 'c-y-b': [0.8, 0.2]}
    match = st.match_aspects(planted, learned)
    assert match.assignment == {0: 0, 1: 1}
    assert match.matched == {'a-x-b': True, 'c-y-b': False}
    assert match.fraction == 0.5


def test_match_aspects_disjoint():
    match = st.match_aspects({'a-x-b': 0}, {'c-y-b': np.ones(2) / 2})
    assert match == st.AspectMatch({}, {}, 0.)
