"""Command line entry point.

Subcommands
-----------
``fom``
    Write the built-in benchmark system as Matrix Market files.
``reduce``
    Reduce a system at one projection error with one method and write the
    reduced matrices.
``simulate``
    Write the impulse response of a system as CSV.
``sweep``
    Run the projection-error sweep and write the result CSV (optionally a
    log-log SVG plot).
``check``
    Run quick self-checks of the numerical building blocks.

Every subcommand reads an optional JSON config (see
:class:`~wxds.harness.sweep.ExperimentConfig`); flags override its fields.
Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

import argparse
import csv
import logging
import os
import sys

import numpy as np

from wxds.gramian import OracleError
from wxds.harness.mmio import MatrixMarketError, SingularMassError, SystemDimensionError, save_system
from wxds.harness.sweep import ConfigError, ExperimentConfig, SweepContext, emit_csv, read_csv, run_sweep
from wxds.reduce import Method, project
from wxds.sim import IntegrationError, impulse_response

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger('wxds')


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not exit status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f'{self.prog}: error: {message}\n')


def _add_config_args(p):
    p.add_argument('--config', help='JSON experiment config')
    p.add_argument('--matrices', metavar='PREFIX',
                   help='read PREFIX{A,B,C}.mtx (and PREFIXE.mtx if present) instead of the built-in system')
    p.add_argument('--h', type=float, help='time step')
    p.add_argument('--T', type=float, help='time horizon')
    p.add_argument('--seed', type=int, help='seed of the binary training input')
    p.add_argument('--excitation', choices=['impulse', 'binary'], help='training input for the Gramians')
    p.add_argument('--omega', type=float, help='HAPOD root share of the error budget')
    p.add_argument('--partition-width', type=int, help='HAPOD columns per leaf')


def build_parser():
    parser = _Parser(prog='wxds', description='Cross-Gramian dominant subspace model reduction.')
    parser.add_argument('-v', '--verbose', action='count', default=0)
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = sub.add_parser('fom', help='write the benchmark system as Matrix Market files')
    p.add_argument('prefix', help='output prefix, files are PREFIX{E,A,B,C}.mtx')
    p.add_argument('--dense', action='store_true', help='array layout for all matrices')

    p = sub.add_parser('reduce', help='reduce at one projection error with one method')
    _add_config_args(p)
    p.add_argument('--epsilon', type=float, required=True)
    p.add_argument('--method', choices=[m.value for m in Method], default='WXDS')
    p.add_argument('prefix', help='output prefix for the reduced matrices')

    p = sub.add_parser('simulate', help='impulse response as CSV')
    _add_config_args(p)
    p.add_argument('output', help='CSV path')

    p = sub.add_parser('sweep', help='projection error sweep')
    _add_config_args(p)
    p.add_argument('--epsilons', type=float, nargs='+')
    p.add_argument('--methods', nargs='+', choices=[m.value for m in Method])
    p.add_argument('--no-timing', action='store_true', help='leave wall_time_ms empty (byte-reproducible CSV)')
    p.add_argument('--output', help='CSV path (default: stdout)')
    p.add_argument('--plot', metavar='SVG', help='also write a log-log plot (needs matplotlib)')

    sub.add_parser('check', help='run numerical self-checks')
    return parser


def _system_paths(prefix):
    paths = {k: f'{prefix}{k}.mtx' for k in 'ABC'}
    if os.path.exists(f'{prefix}E.mtx'):
        paths['E'] = f'{prefix}E.mtx'
    return paths


def load_config(args):
    """`ExperimentConfig` from ``--config`` with command line overrides applied."""
    over = {}
    if args.matrices:
        over['system'] = _system_paths(args.matrices)
    for key in ('h', 'T'):
        if getattr(args, key, None) is not None:
            over[key] = getattr(args, key)
    if getattr(args, 'epsilons', None):
        over['epsilons'] = args.epsilons
    if getattr(args, 'methods', None):
        over['methods'] = args.methods
    if getattr(args, 'no_timing', False):
        over['record_timing'] = False
    if getattr(args, 'output', None) and args.command == 'sweep':
        over['output'] = args.output
    if args.config:
        cfg = ExperimentConfig.from_json(args.config, **over)
    else:
        try:
            cfg = ExperimentConfig(**over)
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None
    exc = cfg.excitation
    kind = args.excitation or exc.kind
    seed = args.seed if args.seed is not None else exc.seed
    if kind != exc.kind or seed != exc.seed:
        cfg.excitation = {'kind': kind, 'seed': None if kind == 'impulse' else seed, 'amplitude': exc.amplitude}
    hp = cfg.hapod
    if args.omega is not None or args.partition_width is not None:
        cfg.hapod = {'epsilon': hp.epsilon,
                     'omega': hp.omega if args.omega is None else args.omega,
                     'partition_width': hp.partition_width if args.partition_width is None else args.partition_width}
    try:
        cfg.__post_init__()
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None
    return cfg


def cmd_fom(args):
    from wxds.harness.benchmarks import fom_system

    paths = save_system(fom_system(), args.prefix, sparse_layout=not args.dense)
    print('\n'.join(paths[k] for k in 'EABC'))


def cmd_reduce(args):
    cfg = load_config(args)
    if args.epsilon < 0:
        raise ConfigError('epsilon must be non-negative')
    cfg.record_timing = False
    ctx = SweepContext(cfg.load_system(), cfg)
    method = Method(args.method)
    p, _, _, _ = ctx.projector(args.epsilon, method)
    if p.order == 0:
        raise ArithmeticError(f'{method} produced an empty basis at epsilon={args.epsilon!r}')
    rom = project(ctx.sys, p)
    save_system(rom, args.prefix, sparse_layout=False)
    print(f'method={method} epsilon={args.epsilon!r} order={p.order} '
          f'rel_l2_error={ctx.rel_error(rom):.6e}')


def cmd_simulate(args):
    cfg = load_config(args)
    s = cfg.load_system()
    y = impulse_response(s, cfg.h, cfg.T)
    with open(args.output, 'w', newline='') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(['t'] + [f'y{q + 1}' for q in range(s.Q)])
        for t, row in zip(y.times, y.values.T):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def cmd_sweep(args):
    cfg = load_config(args)
    records = run_sweep(cfg)
    emit_csv(records, cfg.output or sys.stdout)
    if args.plot:
        write_plot(records, args.plot)
    failed = [r for r in records if r.failed]
    if failed:
        log.error('%d of %d rows failed', len(failed), len(records))
        return EXIT_NUMERICAL
    return EXIT_OK


def write_plot(records, path):
    """Log-log plot of the relative error (and WXDS indicator) against epsilon."""
    try:
        import matplotlib
        matplotlib.use('svg')
        import matplotlib.pyplot as plt
    except ImportError:
        raise ConfigError('plotting needs matplotlib (pip install "artifact[plot]")') from None
    if isinstance(records, (str, os.PathLike)):
        records = read_csv(records)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for m in Method:
        rows = [r for r in records if r.method is m and not r.failed]
        if not rows:
            continue
        eps = [r.epsilon for r in rows]
        ax1.loglog(eps, [r.rel_l2_error for r in rows], 'o-', label=m.value)
        ax2.semilogx(eps, [r.reduced_order for r in rows], 'o-', label=m.value)
        if m is Method.WXDS:
            ax1.loglog(eps, [r.indicator for r in rows], 'k--', label='WXDS indicator')
    for ax, lab in ((ax1, 'relative L2 error'), (ax2, 'reduced order')):
        ax.set_xlabel('projection error')
        ax.set_ylabel(lab)
        ax.invert_xaxis()
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def run_checks(out=print):
    """Small oracle and invariant checks; returns True if all pass."""
    from wxds.gramian import (dense_controllability_oracle, dense_cross_gramian_oracle,
                              dense_observability_oracle, empirical_cross_gramian, projected_exponential_residual,
                              sylvester_residual)
    from wxds.hapod import HapodConfig, incremental_hapod, partition
    from wxds.harness.benchmarks import diagonal_example
    from wxds.lti import adjoint, random_stable_system

    rng = np.random.default_rng(0)
    d = diagonal_example()
    s = random_stable_system(10, rng=rng, identity_mass=True)

    def hankel():
        WX = dense_cross_gramian_oracle(s).data
        WW = WX @ WX
        return np.linalg.norm(WW - dense_controllability_oracle(s) @ dense_observability_oracle(s)) / np.linalg.norm(WW)

    def adjoint_gap():
        a = empirical_cross_gramian(s, 1e-2, 2.0).data
        b = empirical_cross_gramian(adjoint(s), 1e-2, 2.0).data
        return np.abs(a.T - b).max() / np.abs(a).max()

    def hapod_bound():
        S = rng.standard_normal((40, 120))
        res = incremental_hapod(partition(S, 30), HapodConfig(0.5))
        return np.sum((S - res.modes @ (res.modes.T @ S)) ** 2) / S.shape[1] / 0.25

    U, _ = np.linalg.qr(rng.standard_normal((20, 5)))
    checks = [
        ('sylvester oracle residual', lambda: sylvester_residual(d, dense_cross_gramian_oracle(d)), 1e-10),
        ('empirical cross Gramian residual', lambda: sylvester_residual(d, empirical_cross_gramian(d, 1e-3, 10.0)),
         1e-2),
        ('symmetric Hankel identity', hankel, 1e-8),
        ('projected exponential identity', lambda: projected_exponential_residual(rng.standard_normal((20, 20)), U),
         1e-10),
        ('adjoint transposition', adjoint_gap, 1e-14),
        ('HAPOD mean error / eps^2', hapod_bound, 1.0),
    ]
    ok = True
    for name, fn, tol in checks:
        value = float(fn())
        passed = value <= tol
        ok &= passed
        out(f'{"PASS" if passed else "FAIL"}  {name}: {value:.3e} (tol {tol:.0e})')
    return ok


def cmd_check(args):
    return EXIT_OK if run_checks() else EXIT_NUMERICAL


COMMANDS = {'fom': cmd_fom, 'reduce': cmd_reduce, 'simulate': cmd_simulate, 'sweep': cmd_sweep, 'check': cmd_check}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format='%(levelname)s %(name)s: %(message)s')
    try:
        return COMMANDS[args.command](args) or EXIT_OK
    except ConfigError as e:
        print(f'config error: {e}', file=sys.stderr)
        return EXIT_CONFIG
    except (MatrixMarketError, SystemDimensionError, OSError) as e:
        print(f'I/O error: {e}', file=sys.stderr)
        return EXIT_IO
    except (IntegrationError, OracleError, SingularMassError, ArithmeticError, np.linalg.LinAlgError,
            ValueError) as e:
        print(f'numerical failure: {e}', file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
