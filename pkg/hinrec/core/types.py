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

"""Type declarations of heterogeneous graphs."""
from typing import NamedTuple

from hinrec.exceptions import GraphError

KEY_SEPARATOR = '-'


class NodeId(NamedTuple):
    """Globally unique node identifier: the node type plus the index within that type."""
    node_type: str
    index: int

    def __str__(self):
        """Return ``type:index``."""
        return f'{self.node_type}:{self.index}'

    @classmethod
    def from_str(cls, text):
        """Parse ``type:index``.

        Raises:
            GraphError: if the text is not of that form
        """
        node_type, _, index = str(text).rpartition(':')
        if not node_type or not index.isdigit():
            raise GraphError(f'malformed node id "{text}", expected type:index')
        return cls(node_type, int(index))


class MetaRelation(NamedTuple):
    """Typed triple ``<source type, edge type, destination type>``.

    Neighbors of a node ``t`` under a relation are the sources ``s`` of edges ``s -> t``, so
    the relation groups neighbors of nodes of ``dst_type``. An inverse relation is a distinct
    MetaRelation with its own edge name.
    """
    src_type: str
    edge_type: str
    dst_type: str

    @property
    def key(self):
        """Stable string key, e.g. ``user-interact-item``."""
        return KEY_SEPARATOR.join(self)

    @classmethod
    def from_key(cls, key):
        """Parse a key produced by :attr:`key`."""
        parts = key.split(KEY_SEPARATOR)
        if len(parts) != 3 or not all(parts):
            raise GraphError(f'invalid meta relation key "{key}"')
        return cls(*parts)

    def inverse(self, edge_type):
        """The reversed relation named ``edge_type``."""
        return MetaRelation(self.dst_type, edge_type, self.src_type)

    def __str__(self):
        """Return the key."""
        return self.key
