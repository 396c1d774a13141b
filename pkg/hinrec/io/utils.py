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

"""Utility functions for loading and writing datasets and run artifacts."""

import json
import logging
from pathlib import Path
from typing import NamedTuple

import numpy as np
import yaml

from hinrec.core.graph import build_graph
from hinrec.core.types import KEY_SEPARATOR, MetaRelation
from hinrec.data import prepare_dataset
from hinrec.data.interactions import InteractionLog
from hinrec.exceptions import ConfigError, DataError
from hinrec.model.params import ModelParams
from hinrec.train import TRAIN_LOG_NAME, TrainConfig
from hinrec.utils import HinRecJSON

L = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.yaml'
GROUND_TRUTH_NAME = 'ground_truth.json'
CONFIG_NAME = 'config.yaml'
SNAPSHOT_NAME = 'params.npz'


def _check_name(kind, name):
    if not isinstance(name, str) or not name or KEY_SEPARATOR in name or '/' in name:
        raise DataError(f'invalid {kind} name {name!r}: use a non-empty name without '
                        f'"{KEY_SEPARATOR}" or "/"')


def load_manifest(path):
    """Read and validate a dataset manifest.

    The manifest is a yaml mapping::

        node_types: {user: 1000, item: 500, brand: 20}
        relations:
          - {name: interact, src: user, dst: item, file: interact.tsv,
             inverse: interacted_by, timestamped: true}
          - {name: brand_of, src: brand, dst: item, file: brand.tsv, inverse: has_brand}
        interaction_relation: interact
        user_type: user
        item_type: item
        core_filter: {interactions: {user: 10, item: 10}, relations: {friend: 5}}

    Relation files are resolved relative to the manifest. ``user_type`` and ``item_type``
    are optional and default to the source and destination types of the interaction
    relation.

    Returns:
        dict: the manifest with a ``root`` entry holding its directory

    Raises:
        DataError: if the manifest or a referenced file is missing or invalid
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f'manifest not found: {path}')
    try:
        with open(path, 'r', encoding='utf-8') as fd:
            manifest = yaml.load(fd, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        raise DataError(f'invalid manifest {path}: {e}') from e
    if not isinstance(manifest, dict):
        raise DataError(f'manifest {path} is not a mapping')
    for key in ('node_types', 'relations', 'interaction_relation'):
        if key not in manifest:
            raise DataError(f'manifest {path} lacks "{key}"')
    for name, count in manifest['node_types'].items():
        _check_name('node type', name)
        if not isinstance(count, int) or count < 0:
            raise DataError(f'manifest {path}: invalid count {count!r} for "{name}"')
    names = set()
    for relation in manifest['relations']:
        for key in ('name', 'src', 'dst', 'file'):
            if key not in relation:
                raise DataError(f'manifest {path}: relation {relation} lacks "{key}"')
        for key in ('src', 'dst'):
            if relation[key] not in manifest['node_types']:
                raise DataError(f'manifest {path}: relation "{relation["name"]}" uses '
                                f'undeclared node type "{relation[key]}"')
        for name in (relation['name'], relation.get('inverse')):
            if name is None:
                continue
            _check_name('relation', name)
            if name in names:
                raise DataError(f'manifest {path}: relation "{name}" declared twice')
            names.add(name)
        if not (path.parent / relation['file']).is_file():
            raise DataError(f'relation file not found: {path.parent / relation["file"]}')
    interaction = manifest['interaction_relation']
    declared = {r['name']: r for r in manifest['relations']}
    if interaction not in declared:
        raise DataError(f'manifest {path}: interaction relation "{interaction}" is not declared')
    for key, end in (('user_type', 'src'), ('item_type', 'dst')):
        expected = declared[interaction][end]
        if manifest.setdefault(key, expected) != expected:
            raise DataError(f'manifest {path}: {key} "{manifest[key]}" is not the {end} '
                            f'type "{expected}" of "{interaction}"')
    manifest['root'] = path.parent
    return manifest


def read_edges(path, n_src, n_dst, timestamped=False):
    """Parse a ``src<TAB>dst[<TAB>timestamp]`` file.

    Blank lines and lines starting with ``#`` are skipped.

    Returns:
        tuple: src, dst and timestamp arrays; timestamps follow line order when absent

    Raises:
        DataError: naming the file and line of a malformed record or an out-of-range id
    """
    src, dst, stamps = [], [], []
    with open(path, 'r', encoding='utf-8') as fd:
        for lineno, line in enumerate(fd, 1):
            line = line.rstrip('\r\n')
            if not line.strip() or line.startswith('#'):
                continue
            fields = line.split('\t')
            if len(fields) not in (2, 3) or (timestamped and len(fields) != 3):
                raise DataError(f'{path}:{lineno}: expected "src<TAB>dst'
                                f'{"<TAB>timestamp" if timestamped else ""}", got {line!r}')
            try:
                s, d = int(fields[0]), int(fields[1])
                t = float(fields[2]) if len(fields) == 3 else float(len(stamps))
            except ValueError as e:
                raise DataError(f'{path}:{lineno}: malformed record {line!r}') from e
            if not (0 <= s < n_src and 0 <= d < n_dst):
                raise DataError(f'{path}:{lineno}: edge ({s}, {d}) outside '
                                f'[0, {n_src}) x [0, {n_dst})')
            src.append(s)
            dst.append(d)
            stamps.append(t)
    return (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
            np.array(stamps, dtype=np.float64))


def load_dataset(manifest):
    """Load the graph and the interaction log described by a manifest.

    Args:
        manifest (str|Path|dict): path to a manifest or a manifest from :func:`load_manifest`

    Returns:
        tuple: (HinGraph, unsplit InteractionLog); declared inverse relations are added to
        the graph with reversed edges
    """
    if not isinstance(manifest, dict):
        manifest = load_manifest(manifest)
    counts = dict(manifest['node_types'])
    edges, log = {}, None
    for entry in manifest['relations']:
        relation = MetaRelation(entry['src'], entry['name'], entry['dst'])
        src, dst, stamps = read_edges(manifest['root'] / entry['file'], counts[relation.src_type],
                                      counts[relation.dst_type], entry.get('timestamped', False))
        edges[relation] = (src, dst)
        inverse = None
        if entry.get('inverse'):
            inverse = relation.inverse(entry['inverse'])
            edges[inverse] = (dst, src)
        if entry['name'] == manifest['interaction_relation']:
            log = InteractionLog.from_arrays(src, dst, counts[relation.src_type],
                                             counts[relation.dst_type], relation,
                                             timestamps=stamps, inverse=inverse)
        L.info('loaded %d edges of %s', len(src), relation)
    return build_graph(counts, edges), log


def write_dataset(directory, graph, log, ground_truth=None, core_filter=None):
    """Write a dataset as a manifest plus one TSV file per relation.

    A relation whose edges mirror those of another relation is declared as that relation's
    inverse rather than written twice.

    Returns:
        Path: the manifest path
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    inverses = _pair_inverses(graph, log)
    relations = []
    for relation in graph.relations:
        if relation in inverses.values():
            continue
        entry = {'name': relation.edge_type, 'src': relation.src_type,
                 'dst': relation.dst_type, 'file': f'{relation.edge_type}.tsv'}
        if relation in inverses:
            entry['inverse'] = inverses[relation].edge_type
        with open(directory / entry['file'], 'w', encoding='utf-8') as fd:
            if relation == log.relation:
                entry['timestamped'] = True
                for u, i, t in zip(log.users, log.items, log.timestamps):
                    fd.write(f'{u}\t{i}\t{float(t)!r}\n')
            else:
                for s, d in zip(*graph.edges(relation)):
                    fd.write(f'{s}\t{d}\n')
        relations.append(entry)
    manifest = {'node_types': graph.node_counts, 'relations': relations,
                'interaction_relation': log.relation.edge_type,
                'user_type': log.user_type, 'item_type': log.item_type}
    if core_filter:
        manifest['core_filter'] = core_filter
    path = directory / MANIFEST_NAME
    with open(path, 'w', encoding='utf-8') as fd:
        yaml.safe_dump(manifest, fd, sort_keys=False)
    if ground_truth is not None:
        write_json(directory / GROUND_TRUTH_NAME, ground_truth)
    L.info('wrote dataset with %d relations to %s', len(relations), directory)
    return path


def _pair_inverses(graph, log):
    """Relation -> declared inverse for relations whose reversed edge set is also present."""
    pairs = {}
    if log.inverse is not None and log.inverse in graph.relations:
        pairs[log.relation] = log.inverse
    for relation in graph.relations:
        if relation in pairs or relation in pairs.values() or relation == log.inverse:
            continue
        for other in graph.relations:
            if other == relation or other in pairs or other in pairs.values() or \
                    (other.src_type, other.dst_type) != (relation.dst_type, relation.src_type):
                continue
            src, dst = graph.edges(relation)
            o_src, o_dst = graph.edges(other)
            if np.array_equal(np.sort(src * graph.count(relation.dst_type) + dst),
                              np.sort(o_dst * graph.count(relation.dst_type) + o_src)):
                pairs[relation] = other
                break
    return pairs


def write_json(path, data):
    """Write a mapping as indented JSON, numpy values included."""
    with open(path, 'w', encoding='utf-8') as fd:
        json.dump(data, fd, indent=2, cls=HinRecJSON)


def read_json(path):
    """Read a JSON file."""
    with open(path, 'r', encoding='utf-8') as fd:
        return json.load(fd)


def write_yaml(path, data):
    """Write a mapping as yaml."""
    with open(path, 'w', encoding='utf-8') as fd:
        yaml.safe_dump(json.loads(json.dumps(data, cls=HinRecJSON)), fd, sort_keys=False)


def read_ground_truth(directory):
    """Ground truth written next to a synthetic dataset or a run, or None."""
    path = Path(directory) / GROUND_TRUTH_NAME
    return read_json(path) if path.is_file() else None


def read_train_log(path):
    """Records of a line-delimited JSON training log."""
    with open(path, 'r', encoding='utf-8') as fd:
        return [json.loads(line) for line in fd if line.strip()]


class Run(NamedTuple):
    """Artifacts of a training run directory.

    Attributes:
        directory (Path): the run directory
        config (dict): resolved run config
        train_config (TrainConfig): hyper-parameters of the run
        dataset (Dataset): dataset rebuilt from the config
        params (ModelParams): best parameter snapshot
        history (list[dict]): training log records, empty if the log is missing
    """
    directory: Path
    config: dict
    train_config: object
    dataset: object
    params: object
    history: list


def load_run(directory, snapshot=None):
    """Rebuild dataset, hyper-parameters and parameters of a run from its directory alone.

    The directory is either a training run or the output directory of a command applied to
    one, whose config names the source run under ``run`` and its parameters under
    ``snapshot``.

    Args:
        directory (str|Path): directory holding a run config
        snapshot (str|Path): parameter snapshot overriding the run's own

    Raises:
        ConfigError: if the run config is missing
        SnapshotError: if the snapshot is missing or does not fit the config
    """
    directory = Path(directory)
    config_path = directory / CONFIG_NAME
    if not config_path.is_file():
        raise ConfigError(f'run config not found: {config_path}')
    with open(config_path, 'r', encoding='utf-8') as fd:
        config = yaml.load(fd, Loader=yaml.SafeLoader)
    train_config = TrainConfig.from_run_config(config)
    section = config['dataset']
    manifest = load_manifest(section['manifest'])
    graph, log = load_dataset(manifest)
    thresholds = section.get('core_filter', manifest.get('core_filter'))
    dataset = prepare_dataset(graph, log, thresholds, section['fractions'],
                              section['train_fraction'], read_ground_truth(manifest['root']))
    source = Path(config['run']) if config.get('run') else directory
    params = ModelParams.load(snapshot or config.get('snapshot') or source / SNAPSHOT_NAME,
                              train_config.model_config(), dataset.graph.node_counts,
                              dataset.graph.relations)
    log_path = source / TRAIN_LOG_NAME
    history = read_train_log(log_path) if log_path.is_file() else []
    return Run(directory, config, train_config, dataset, params, history)
