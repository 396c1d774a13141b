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

"""Inspect learned aspect weights and export aspect embeddings of a trained run."""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from hinrec.apps.evaluate import make_scorer, write_derived_config
from hinrec.core.types import NodeId
from hinrec.data import SyntheticSpec, generate_synthetic
from hinrec.evaluation import build_eval_lists
from hinrec.io.utils import load_run, write_dataset, write_json
from hinrec.stats import match_aspects

L = logging.getLogger(__name__)

ASPECTS_NAME = 'aspects.csv'
ASPECT_MATCH_NAME = 'aspect_match.json'
EMBEDDINGS_NAME = 'embeddings.csv'


def aspect_table(recommender):
    """Mean final routing weights per layer and relation.

    Returns:
        pandas.DataFrame: one row per (layer, relation) with one column per aspect and the
        major aspect
    """
    rows = []
    for layer, trace in sorted(recommender.aspect_weights().items()):
        for relation, weights in sorted(trace.mean_aspect_weights().items()):
            row = {'layer': layer, 'relation': relation.key,
                   'targets': len(trace.aspect_weights[relation])}
            row.update({f'aspect_{k}': float(w) for k, w in enumerate(weights)})
            row['major_aspect'] = int(np.argmax(weights))
            rows.append(row)
    return pd.DataFrame(rows)


def inspect_aspects(directory, snapshot=None, output=None):
    """Write the aspect table of a run, plus the planted aspect match on synthetic data.

    Weights are averaged over every evaluation target: the users of the evaluated split and
    their candidate items.

    Returns:
        tuple: (aspect table, AspectMatch or None)
    """
    run = load_run(directory, snapshot)
    section = run.config['eval']
    lists = build_eval_lists(run.dataset.log, section['split'], section['negatives'],
                             section['seed'])
    recommender = make_scorer(run)
    recommender.embed_nodes(recommender.user_type, [ranked.user for ranked in lists])
    recommender.embed_nodes(recommender.item_type,
                            np.unique(np.concatenate([ranked.items for ranked in lists])))
    table = aspect_table(recommender)
    output = Path(output or directory)
    output.mkdir(parents=True, exist_ok=True)
    write_derived_config(run, output, snapshot)
    table.to_csv(output / ASPECTS_NAME, index=False)

    match = None
    truth = run.dataset.ground_truth
    if truth is not None:
        first = table[table['layer'] == 1]
        columns = [c for c in table.columns if c.startswith('aspect_')]
        learned = {key: row.to_numpy(dtype=np.float64)
                   for key, row in first.set_index('relation')[columns].iterrows()}
        match = match_aspects(truth['planted'], learned)
        write_json(output / ASPECT_MATCH_NAME, match._asdict())
        L.info('major aspect matches the planted one for %.0f%% of context relations',
               100 * match.fraction)
    return table, match


def export_embeddings(directory, nodes, snapshot=None, output=None):
    """Write the concatenated aspect embeddings of the given nodes as CSV.

    Args:
        directory (str|Path): run directory
        nodes (list[str]): node ids as ``type:index``
        snapshot (str|Path): parameter snapshot overriding the run's own
        output (str|Path): CSV path, defaults to embeddings.csv in the run directory

    Returns:
        pandas.DataFrame: columns node, type and one per embedding dimension

    Raises:
        GraphError: for a malformed or unknown node id
    """
    run = load_run(directory, snapshot)
    graph = run.dataset.graph
    ids = [NodeId.from_str(n) for n in nodes]
    global_ids = np.array([graph.global_id(n) for n in ids], dtype=np.int64)
    z = make_scorer(run).embed(global_ids)
    z = z.reshape(len(ids), -1)
    frame = pd.DataFrame(z, columns=[f'e{i}' for i in range(z.shape[1])])
    frame.insert(0, 'type', [n.node_type for n in ids])
    frame.insert(0, 'node', [str(n) for n in ids])
    path = Path(output) if output else Path(directory) / EMBEDDINGS_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    write_derived_config(run, path.parent, snapshot)
    frame.to_csv(path, index=False, float_format='%.17g')
    L.info('exported %d embeddings to %s', len(frame), path)
    return frame


def generate(output, spec=None, seed=0, core=None):
    """Write a synthetic dataset as manifest plus TSV files.

    Args:
        output (str|Path): dataset directory
        spec (dict): generator parameters, see :class:`SyntheticSpec`
        seed (int): random seed
        core (dict): core filter thresholds recorded in the manifest

    Returns:
        Path: the manifest path
    """
    graph, log, truth = generate_synthetic(SyntheticSpec.from_dict(spec or {}), seed)
    return write_dataset(output, graph, log, truth, core)
