"""Command-line entry point for lyapid.

Every subcommand prints a JSON report with sorted keys; rationals appear as
"p/q" strings. Exit status 0 means the question was decided (whatever the
answer), 2 means the input could not be used.
"""

import argparse
import json
import logging
import sys

from .exact import SingularMatrixError, format_rational

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def _edges(g):
    return [str(e) for e in g.sorted_edges()]


def _graph_payload(g):
    return {'n': g.n, 'edges': _edges(g)}


def _read_noise(path, config):
    from .exact import read_matrix
    path = path if path is not None else config['noise']
    return read_matrix(path) if path else None


def cmd_equiv(args, config):
    from .equivalence import distinguishing_subset, oracle_witness, transform_sequence
    from .graph import read_graph
    g1, g2 = read_graph(args.g1), read_graph(args.g2)
    report = {'method': args.method}
    if args.method == 'graphical':
        distinction = distinguishing_subset(g1, g2)
        report['equivalent'] = distinction is None
        if distinction is not None:
            report['certificate'] = distinction.as_dict()
    elif args.method == 'flips':
        report.update(transform_sequence(g1, g2).as_dict())
    else:
        samples = args.samples if args.samples is not None else config['oracle_samples']
        seed = args.seed if args.seed is not None else config['seed']
        witness = oracle_witness(g1, g2, samples, seed)
        report.update(samples=samples, seed=seed, equivalent=witness is None)
        if witness is not None:
            report['certificate'] = witness.as_dict()
    return report


def cmd_identifiable(args, config):
    from .equivalence import is_identifiable
    from .graph import read_graph
    g = read_graph(args.graph)
    return {'graph': _graph_payload(g),
            'identifiable': is_identifiable(g),
            'super_covered_edges': [str(e) for e in g.super_covered_edges()]}


def cmd_class(args, config):
    from .equivalence import equivalence_class
    from .graph import read_graph
    members = equivalence_class(read_graph(args.graph))
    return {'size': len(members),
            'representative': _edges(members.representative),
            'members': [_edges(g) for g in members.sorted_members()]}


def cmd_transform(args, config):
    from .equivalence import transform_sequence
    from .graph import read_graph
    return transform_sequence(read_graph(args.g1), read_graph(args.g2)).as_dict()


def cmd_markov(args, config):
    from .equivalence import markov_equiv
    from .graph import read_graph
    g1, g2 = read_graph(args.g1), read_graph(args.g2)
    report = {'markov_equivalent': markov_equiv(g1, g2)}
    if not report['markov_equivalent']:
        report['certificate'] = {
            'skeleton_only_first': ['{}-{}'.format(*p) for p in sorted(g1.skeleton().pairs - g2.skeleton().pairs)],
            'skeleton_only_second': ['{}-{}'.format(*p) for p in sorted(g2.skeleton().pairs - g1.skeleton().pairs)],
            'v_structures_only_first': [list(v) for v in sorted(g1.v_structures() - g2.v_structures())],
            'v_structures_only_second': [list(v) for v in sorted(g2.v_structures() - g1.v_structures())],
        }
    return report


def cmd_ci_defined(args, config):
    from .equivalence import ci_violation
    from .graph import read_graph
    violation = ci_violation(read_graph(args.graph))
    report = {'ci_defined': violation is None}
    if violation is not None:
        report['certificate'] = {'trek_between_non_adjacent': list(violation)}
    return report


def cmd_solve(args, config):
    from .exact import read_matrix
    from .lyapunov import DriftMatrix, solve_for_sigma
    drift = DriftMatrix(read_matrix(args.drift))
    sigma = solve_for_sigma(drift, _read_noise(args.noise, config))
    return {'stable': True, 'sigma': sigma.to_strings()}


def cmd_identify(args, config):
    from .exact import read_matrix
    from .graph import read_graph
    from .lyapunov import identify_M
    g = read_graph(args.graph)
    drift = identify_M(g, read_matrix(args.sigma), _read_noise(args.noise, config))
    return {'graph': _graph_payload(g), 'drift': drift.matrix.to_strings()}


def cmd_member(args, config):
    from .exact import read_matrix
    from .graph import read_graph
    from .lyapunov import check_covariance, missing_edge_values
    g = read_graph(args.graph)
    sigma = check_covariance(read_matrix(args.sigma), g.n)
    values = missing_edge_values(g, sigma, _read_noise(args.noise, config))
    report = {'member': all(v == 0 for v in values.values()),
              'relations': {str(e): format_rational(v) for e, v in values.items()}}
    failing = next(((e, v) for e, v in values.items() if v != 0), None)
    if failing is not None:
        report['certificate'] = {'edge': str(failing[0]), 'det': format_rational(failing[1])}
    return report


def _census_session(config):
    from .database import Session, connect
    if not Session._connected:
        connect(config['database'])
    return Session.scope()


def cmd_census(args, config):
    from .census import CensusReport, run_census
    report = None
    if args.cached:
        from .database import latest_report
        with _census_session(config) as session:
            report = latest_report(session, args.n)
        if report is None:
            log.info('No stored census for n=%d; computing it', args.n)
    if report is None:
        threads = args.threads if args.threads is not None else config['threads']
        report = run_census(args.n, threads=threads, prefix_pairs=config['prefix_pairs'],
                            progress=args.verbose > 0)
        if args.store:
            from .database import store_report
            with _census_session(config) as session:
                store_report(session, report)
    if args.format == 'csv':
        text = CensusReport.csv_header() + '\n' + report.csv_row() + '\n'
        if args.output:
            with open(args.output, 'w') as file_stream:
                file_stream.write(text)
            return {'output': args.output, 'report': report.as_dict()}
        return text
    if args.format == 'xlsx':
        from .excel import write_census_workbook
        if not args.output:
            raise ValueError('--format xlsx needs --output')
        write_census_workbook([report], args.output)
        return {'output': args.output, 'report': report.as_dict()}
    if args.output:
        with open(args.output, 'w') as file_stream:
            json.dump(report.as_dict(), file_stream, sort_keys=True, indent=2)
    return report.as_dict()


def _census_size(text):
    n = int(text)
    if not 1 <= n <= 6:
        raise argparse.ArgumentTypeError('census supports 1 <= n <= 6, got {}'.format(n))
    return n


def build_parser():
    parser = argparse.ArgumentParser(
        prog='lyapid',
        description='Decide equivalence and identifiability of graphical continuous Lyapunov models')
    parser.add_argument('--verbose', '-v',
                        action='count', default=0,
                        help='log more information to stderr (repeat for debug output)')
    parser.add_argument('--config',
                        help='YAML file overriding the default settings')
    commands = parser.add_subparsers(dest='command', required=True)

    equiv = commands.add_parser('equiv', help='decide whether two DAGs have the same model')
    equiv.add_argument('g1', help='first graph file')
    equiv.add_argument('g2', help='second graph file')
    equiv.add_argument('--method', choices=['graphical', 'flips', 'oracle'], default='graphical')
    equiv.add_argument('--samples', type=int, help='sampled points per direction for the oracle')
    equiv.add_argument('--seed', type=int, help='first oracle seed (default: LYAPID_SEED or 0)')
    equiv.set_defaults(handler=cmd_equiv)

    identifiable = commands.add_parser('identifiable', help='decide structural identifiability')
    identifiable.add_argument('graph')
    identifiable.set_defaults(handler=cmd_identifiable)

    members = commands.add_parser('class', help='list the equivalence class of a DAG')
    members.add_argument('graph')
    members.set_defaults(handler=cmd_class)

    transform = commands.add_parser('transform', help='find super-covered flips from g1 to g2')
    transform.add_argument('g1')
    transform.add_argument('g2')
    transform.set_defaults(handler=cmd_transform)

    markov = commands.add_parser('markov', help='decide Markov equivalence')
    markov.add_argument('g1')
    markov.add_argument('g2')
    markov.set_defaults(handler=cmd_markov)

    ci_defined = commands.add_parser('ci-defined', help='decide whether the model is defined by independences')
    ci_defined.add_argument('graph')
    ci_defined.set_defaults(handler=cmd_ci_defined)

    solve = commands.add_parser('solve', help='solve the Lyapunov equation for the covariance')
    solve.add_argument('--drift', required=True, help='CSV drift matrix')
    solve.add_argument('--noise', help='CSV noise matrix (default 2I)')
    solve.set_defaults(handler=cmd_solve)

    for name, handler, text in (('identify', cmd_identify, 'recover the drift matrix of a covariance'),
                                ('member', cmd_member, 'test a covariance against the model of a graph')):
        sub = commands.add_parser(name, help=text)
        sub.add_argument('--sigma', required=True, help='CSV covariance matrix')
        sub.add_argument('--graph', required=True, help='graph file')
        sub.add_argument('--noise', help='CSV noise matrix (default 2I)')
        sub.set_defaults(handler=handler)

    census = commands.add_parser('census', help='count DAGs and equivalence classes')
    census.add_argument('-n', type=_census_size, required=True, help='node count (1 to 6)')
    census.add_argument('--threads', type=int, help='worker processes')
    census.add_argument('--format', choices=['json', 'csv', 'xlsx'], default='json')
    census.add_argument('--output', help='write the table to this file')
    census.add_argument('--store', action='store_true', help='save the run in the database')
    census.add_argument('--cached', action='store_true', help='reuse the latest stored run if there is one')
    census.set_defaults(handler=cmd_census)
    return parser


def _configure_logging(verbose):
    level = LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)]
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('lyapid').setLevel(level)


def main(argv=None):
    """Run one subcommand and print its report."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        from .config import read_config
        config = read_config(args.config)
        payload = args.handler(args, config)
    except (ValueError, SingularMatrixError, OSError) as err:
        print('lyapid {}: error: {}'.format(args.command, err), file=sys.stderr)
        return EXIT_INPUT_ERROR
    if isinstance(payload, str):
        sys.stdout.write(payload)
    else:
        inputs = {key: value for key, value in vars(args).items()
                  if key not in ('handler', 'command', 'verbose', 'config')}
        payload = dict(payload, command=args.command, inputs=inputs)
        print(json.dumps(payload, sort_keys=True, indent=2))
    return EXIT_OK


def dump_db():
    """Show all stored census runs."""
    from .database import Session, all_runs

    with Session.scope() as session:
        for run in all_runs(session):
            print(run)
