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

"""Test hinrec.utils."""
import json

import numpy as np
import pytest

from hinrec import utils as hu


def test_HinRecJSON():
    ex = {'zero': 0,
          'one': np.int64(1),
          'two': np.float32(2.0),
          'three': np.array([1, 2, 3]),
          'four': np.bool_(True),
          }
    output = json.dumps(ex, cls=hu.HinRecJSON)
    loaded = json.loads(output)
    assert (loaded ==
            {'zero': 0,
             'one': 1,
             'two': 2.0,
             'three': [1, 2, 3],
             'four': True,
             })

    enc = hu.HinRecJSON()
    assert enc.default(ex['one']) == 1
    assert enc.default(ex['two']) == 2.0

    with pytest.raises(TypeError):
        enc.default(0)


def test_mix64():
    values = hu.mix64(np.arange(1000))
    assert values.dtype == np.uint64
    assert len(np.unique(values)) == 1000
    assert hu.mix64(0) == hu.mix64(np.uint64(0))


def test_derive_seed():
    assert hu.derive_seed(3, 1) == hu.derive_seed(3, 1)
    assert hu.derive_seed(3, 1) != hu.derive_seed(3, 2)
    assert hu.derive_seed(3, 1) != hu.derive_seed(4, 1)
    assert hu.derive_seed(3, 1, 2) != hu.derive_seed(3, 2, 1)
    seed = hu.derive_seed(2**40, 7)
    assert 0 <= seed < 2**63
    np.random.default_rng(seed)
