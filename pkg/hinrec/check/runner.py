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

"""Runner for run directory checks."""

import logging
from importlib import import_module
from pathlib import Path

from hinrec.check import check_wrapper
from hinrec.exceptions import ConfigError, HinRecError
from hinrec.io.utils import CONFIG_NAME, load_run

L = logging.getLogger(__name__)

_GREEN, _RED, _RESET = '\033[92m', '\033[91m', '\033[0m'


class CheckRunner:
    """Resolves the configured checks and applies them to run directories.

    The config maps check modules of :mod:`hinrec.check` to lists of check names under
    ``checks``; ``options`` gives extra positional arguments per check name and ``color``
    toggles colored PASS/FAIL lines.
    """

    def __init__(self, config):
        """Initialize a CheckRunner object.

        Raises:
            ConfigError: if the config lacks checks or names an unknown check
        """
        self._config = CheckRunner._sanitize_config(config)
        self._checks = [self._resolve(module, name)
                        for module, names in self._config['checks'].items()
                        for name in names or []]

    def _resolve(self, module, name):
        try:
            func = getattr(import_module(f'hinrec.check.{module}'), name)
        except (ImportError, AttributeError) as e:
            raise ConfigError(f'unknown check "{module}.{name}"') from e
        args = self._config['options'].get(name, [])
        if not isinstance(args, list):
            args = [args]
        return check_wrapper(func), args

    def run(self, path):
        """Check a run directory, or every run directory below ``path``.

        Returns:
            dict: per-run summaries keyed by directory, and an overall PASS/FAIL status
        """
        runs = sorted(p.parent for p in Path(path).rglob(CONFIG_NAME))
        if not runs:
            L.error('no run directory found under %s', path)
        summaries = {str(directory): self._check_run(directory) for directory in runs}
        passed = bool(runs) and all(summary['ALL'] for summary in summaries.values())
        return {'runs': summaries, 'STATUS': 'PASS' if passed else 'FAIL'}

    def _check_run(self, directory):
        """Title -> status of every check on one run, plus the conjunction under ``ALL``."""
        L.info('checking run %s', directory)
        summary = {}
        try:
            run = load_run(directory)
        except HinRecError as e:
            L.error('cannot load run %s: %s', directory, e)
            summary['ALL'] = False
            self._report('ALL', False)
            return summary
        for check, args in self._checks:
            try:
                result = check(run, *args)
            except Exception as e:  # pylint: disable=broad-except
                L.error('%s raised %s: %s', check.__name__, type(e).__name__, e)
                summary[check.__name__] = False
                continue
            if result.info:
                L.debug('%s: %d offending items: %s', result.title, len(result.info),
                        result.info)
            summary[result.title] = result.status
        summary['ALL'] = all(summary.values())
        for title, status in summary.items():
            self._report(title, status)
        return summary

    def _report(self, title, ok):
        if self._config['color']:
            status = f'{_GREEN}PASS{_RESET}' if ok else f'{_RED}FAIL{_RESET}'
        else:
            status = 'PASS' if ok else 'FAIL'
        L.log(logging.INFO if ok else logging.ERROR, '%35s %s', title, status)

    @staticmethod
    def _sanitize_config(config):
        """Validate the config and fill in missing optional keys."""
        if not isinstance(config, dict) or 'checks' not in config:
            raise ConfigError('Need to have "checks" in the config')
        config = dict(config)
        config['checks'] = config['checks'] or {}
        config['options'] = config.get('options') or {}
        config.setdefault('color', False)
        return config
