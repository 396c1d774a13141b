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

"""Invariant checks of trained runs.

A check takes a :class:`hinrec.io.utils.Run` plus optional thresholds and returns a
:class:`CheckResult`; :func:`check_wrapper` titles the result after the check.
"""
from dataclasses import dataclass
from functools import wraps


def check_wrapper(fun):
    """Set the title of the result of ``fun`` from its name, e.g. ``Has finite parameters``."""
    title = fun.__name__.replace('_', ' ').capitalize()

    @wraps(fun)
    def _wrapper(*args, **kwargs):
        result = fun(*args, **kwargs)
        result.title = title
        return result

    return _wrapper


@dataclass
class CheckResult:
    """Outcome of one check.

    Attributes:
        status (bool): whether the run passed
        info (list): offending items, empty or None on success
        title (str): human readable check name
    """
    status: bool
    info: list = None
    title: str = None

    def __post_init__(self):
        """Coerce the status."""
        self.status = bool(self.status)

    def __bool__(self):
        """Status of the check."""
        return self.status
