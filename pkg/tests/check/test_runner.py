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

import json
import shutil

import pytest

from hinrec.apps import get_config
from hinrec.apps.model_check import EXAMPLE_CONFIG
from hinrec.check.runner import CheckRunner
from hinrec.exceptions import ConfigError

CONFIG = {
    'checks': {
        'run_checks': [
            'has_finite_parameters',
            'has_chronological_split',
            'has_core_thresholds',
            'has_best_snapshot',
        ]
    },
    'options': {},
}


def test_run_passes(trained_run):
    summary = CheckRunner(CONFIG).run(trained_run)
    assert summary['STATUS'] == 'PASS'
    assert summary['runs'] == {str(trained_run): {
        'Has finite parameters': True,
        'Has chronological split': True,
        'Has core thresholds': True,
        'Has best snapshot': True,
        'ALL': True,
    }}


def test_example_config_passes(trained_run):
    summary = CheckRunner(get_config(EXAMPLE_CONFIG, None)).run(trained_run)
    assert summary['STATUS'] == 'PASS'
    run = summary['runs'][str(trained_run)]
    assert run['Has unit norm aspects']
    assert run['Has simplex aspect weights']


def test_folder_of_runs(trained_run, tmp_path):
    for name in ('a', 'b'):
        shutil.copytree(trained_run, tmp_path / name)
    summary = CheckRunner(CONFIG).run(tmp_path)
    assert summary['STATUS'] == 'PASS'
    assert sorted(summary['runs']) == [str(tmp_path / 'a'), str(tmp_path / 'b')]


def test_missing_snapshot_fails(trained_run, tmp_path):
    directory = tmp_path / 'run'
    shutil.copytree(trained_run, directory)
    (directory / 'params.npz').unlink()
    summary = CheckRunner(CONFIG).run(directory)
    assert summary['STATUS'] == 'FAIL'
    assert summary['runs'] == {str(directory): {'ALL': False}}


def test_truncated_log_fails(trained_run, tmp_path):
    directory = tmp_path / 'run'
    shutil.copytree(trained_run, directory)
    (directory / 'train_log.jsonl').unlink()
    summary = CheckRunner(CONFIG).run(directory)
    assert summary['STATUS'] == 'FAIL'
    assert not summary['runs'][str(directory)]['Has best snapshot']
    assert summary['runs'][str(directory)]['Has finite parameters']


def test_no_runs(tmp_path):
    assert CheckRunner(CONFIG).run(tmp_path) == {'runs': {}, 'STATUS': 'FAIL'}


def test_summary_is_json(trained_run):
    summary = CheckRunner(dict(CONFIG, color=True)).run(trained_run)
    assert json.loads(json.dumps(summary)) == summary


def test_sanitize_config():
    with pytest.raises(ConfigError, match='Need to have "checks"'):
        CheckRunner._sanitize_config({})

    new_config = CheckRunner._sanitize_config({'checks': {}})
    assert new_config == {'checks': {}, 'options': {}, 'color': False}

    config = {'checks': {'run_checks': ['has_finite_parameters']}, 'options': None}
    new_config = CheckRunner._sanitize_config(config)
    assert new_config['options'] == {}
    assert config['options'] is None


def test_unknown_check():
    with pytest.raises(ConfigError, match='unknown check "run_checks.has_wings"'):
        CheckRunner({'checks': {'run_checks': ['has_wings']}})
    with pytest.raises(ConfigError, match='unknown check "no_such_module.has_wings"'):
        CheckRunner({'checks': {'no_such_module': ['has_wings']}})


def test_scalar_option(trained_run):
    config = {'checks': {'run_checks': ['has_unit_norm_aspects']},
              'options': {'has_unit_norm_aspects': 3}}
    summary = CheckRunner(config).run(trained_run)
    assert summary['STATUS'] == 'PASS'
