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

"""The hinrec command line launcher."""
import logging

import click

from hinrec.apps import DEFAULT_CONFIG, evaluate, get_config, inspect, model_check, train
from hinrec.exceptions import HinRecError


def _int_list(ctx, param, value):  # pylint: disable=unused-argument
    """Parse ``5`` or ``5,3`` into an int or a list of ints."""
    if value is None:
        return None
    try:
        values = [int(v) for v in value.split(',')]
    except ValueError as e:
        raise click.BadParameter(f'expected integers separated by commas, got {value}') from e
    return values if len(values) > 1 else values[0]


def _run(func, *args, **kwargs):
    """Call an application function, reporting hinrec errors as click errors."""
    try:
        return func(*args, **kwargs)
    except HinRecError as e:
        raise click.ClickException(str(e)) from e


@click.group()
@click.option('-v', '--verbose', count=True, default=0,
              help='-v for WARNING, -vv for INFO, -vvv for DEBUG')
def cli(verbose):
    """The CLI entry point."""
    level = (logging.ERROR, logging.WARNING, logging.INFO, logging.DEBUG)[min(verbose, 3)]
    logging.basicConfig(level=level)


@cli.command('train', short_help='Train a model')
@click.option('-C', '--config', type=click.Path(exists=True, dir_okay=False),
              default=DEFAULT_CONFIG, show_default=True, help='Run configuration file')
@click.option('-o', '--out', 'output', type=click.Path(file_okay=False),
              help='Output directory, defaults to $HINREC_OUTPUT_ROOT/run-seed<SEED>')
@click.option('--seed', type=int, help='Seed of the whole run')
@click.option('--layers', type=int, help='Number of propagation layers L')
@click.option('--aspects', callback=_int_list, help='Aspect counts K, one or per layer')
@click.option('--iters', type=int, help='Routing iterations I per layer')
@click.option('--fanout', type=int, help='Neighbors sampled per relation')
@click.option('--neg-ratio', type=int, help='Negatives per positive')
@click.option('--dropout', type=float, help='Dropout rate')
@click.option('--lr', type=float, help='Learning rate')
@click.option('--patience', type=int, help='Early stopping patience in epochs')
@click.option('--max-epochs', type=int, help='Maximal number of epochs')
@click.option('--topn', type=int, help='Cutoff N of the validation and test metrics')
@click.option('--train-fraction', type=float, help='Kept share of the training split')
@click.option('--sweep', 'sweep_spec', help='Sweep one option, e.g. aspects=1,2,5,10')
@click.option('--workers', type=int, default=1, show_default=True,
              help='Worker processes for sweeps')
def train_cmd(config, output, seed, layers, aspects, iters, fanout, neg_ratio, dropout, lr,
              patience, max_epochs, topn, train_fraction, sweep_spec, workers):
    """Train a model, or sweep one option with train and evaluate per value."""
    overrides = {'seed': seed, 'model.n_layers': layers, 'model.n_aspects': aspects,
                 'model.n_iterations': iters, 'train.fanouts': fanout,
                 'train.negative_ratio': neg_ratio, 'model.dropout': dropout,
                 'train.learning_rate': lr, 'train.patience': patience,
                 'train.max_epochs': max_epochs, 'eval.topn': topn,
                 'dataset.train_fraction': train_fraction}
    result = _run(train.main, config, output, overrides, sweep_spec, workers)
    if sweep_spec:
        click.echo(result.to_string(index=False))
    else:
        click.echo(f'run written to {result}')


@cli.command('evaluate', short_help='Evaluate a trained run')
@click.argument('run_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--snapshot', type=click.Path(exists=False, dir_okay=False),
              help='Parameter snapshot, defaults to the run snapshot')
@click.option('--topn', type=int, help='Cutoff N')
@click.option('--split', type=click.Choice(['valid', 'test']), help='Evaluated split')
@click.option('--negatives', type=int, help='Sampled negatives per user')
@click.option('--scorer', type=click.Choice(evaluate.SCORERS), default='model',
              show_default=True, help='Trained model or a reference scorer')
@click.option('-o', '--out', 'output', type=click.Path(file_okay=False),
              help='Report directory, defaults to the run directory')
def evaluate_cmd(run_dir, snapshot, topn, split, negatives, scorer, output):
    """Print and write the top-N metrics of a run."""
    report = _run(evaluate.evaluate_run, run_dir, snapshot, topn, split, negatives, scorer,
                  output)
    for name, value in report.means.items():
        click.echo(f'{name}@{report.n}\t{value:.4f}')


@cli.command('inspect-aspects', short_help='Tabulate learned aspect weights per relation')
@click.argument('run_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--snapshot', type=click.Path(exists=False, dir_okay=False),
              help='Parameter snapshot, defaults to the run snapshot')
@click.option('-o', '--out', 'output', type=click.Path(file_okay=False),
              help='Output directory, defaults to the run directory')
def inspect_aspects_cmd(run_dir, snapshot, output):
    """Write the relation by aspect weight table of a run."""
    table, match = _run(inspect.inspect_aspects, run_dir, snapshot, output)
    click.echo(table.to_string(index=False))
    if match is not None:
        click.echo(f'planted aspect match: {match.fraction:.2f}')


@cli.command('export-embeddings', short_help='Export aspect embeddings of nodes')
@click.argument('run_dir', type=click.Path(exists=True, file_okay=False))
@click.argument('nodes', nargs=-1)
@click.option('--nodes-file', type=click.File('r'), help='File with one type:index per line')
@click.option('--snapshot', type=click.Path(exists=False, dir_okay=False),
              help='Parameter snapshot, defaults to the run snapshot')
@click.option('-o', '--out', 'output', type=click.Path(dir_okay=False),
              help='CSV file, defaults to embeddings.csv in the run directory')
def export_embeddings_cmd(run_dir, nodes, nodes_file, snapshot, output):
    """Write the concatenated aspect embeddings of NODES, given as type:index."""
    nodes = list(nodes)
    if nodes_file is not None:
        nodes.extend(line.strip() for line in nodes_file if line.strip())
    if not nodes:
        raise click.UsageError('no nodes given')
    frame = _run(inspect.export_embeddings, run_dir, nodes, snapshot, output)
    click.echo(f'exported {len(frame)} embeddings')


@cli.command('generate', short_help='Write a synthetic dataset')
@click.argument('output', type=click.Path(file_okay=False))
@click.option('-C', '--config', type=click.Path(exists=True, dir_okay=False),
              help='Run configuration whose dataset.synthetic section is used')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--aspects', type=int, help='True aspect count K*')
@click.option('--users', type=int, help='Number of users')
@click.option('--items', type=int, help='Number of items')
def generate_cmd(output, config, seed, aspects, users, items):
    """Write a synthetic dataset as manifest plus TSV files into OUTPUT."""
    spec = {}
    if config:
        spec = dict(((_run(get_config, config, DEFAULT_CONFIG) or {})
                     .get('dataset') or {}).get('synthetic') or {})
    for key, value in (('n_aspects', aspects), ('n_users', users), ('n_items', items)):
        if value is not None:
            spec[key] = value
    seed = spec.pop('seed', seed)
    manifest = _run(inspect.generate, output, spec, seed)
    click.echo(f'dataset written to {manifest}')


@cli.command('check', short_help='Check the invariants of trained runs')
@click.argument('datapath', type=click.Path(exists=True))
@click.option('-C', '--config', type=click.Path(exists=True, dir_okay=False),
              default=model_check.EXAMPLE_CONFIG, show_default=True,
              help='Configuration File')
@click.option('-o', '--output', type=click.Path(exists=False, dir_okay=False),
              help='Path to output json summary file', required=True)
def check_cmd(datapath, config, output):
    """Cli for apps/model_check."""
    summary = _run(model_check.main, datapath, config, output)
    click.echo(summary['STATUS'])
    if summary['STATUS'] != 'PASS':
        raise click.exceptions.Exit(1)
