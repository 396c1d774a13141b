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

"""Module containing hinrec specific exceptions."""


class HinRecError(Exception):
    """Base class for hinrec errors."""


class ConfigError(HinRecError):
    """Exception class for configuration data in apps errors."""


class ShapeError(HinRecError):
    """Operands or parameters with incompatible shapes."""


class EmptyRelationGroupError(HinRecError):
    """A softmax normalization group without any unmasked entry."""


class NumericalError(HinRecError):
    """A non-finite value where a finite one is required."""


class NonFiniteGradientError(NumericalError):
    """A gradient containing NaN or Inf."""

    def __init__(self, name):
        """Initialize with the name of the offending parameter."""
        super().__init__(f'non-finite gradient for parameter "{name}"')
        self.name = name


class GraphError(HinRecError):
    """Invalid heterogeneous graph construction or query."""


class DataError(HinRecError):
    """Invalid or inconsistent dataset content."""


class SnapshotError(HinRecError):
    """Missing or incompatible parameter snapshot."""
