"""
Command-line interface ``qcatlab``.

Subcommands: ``decohere``, ``rates``, ``propagator``, ``semiclassics``, ``prepare`` and ``verify``.
Values are resolved in the order built-in defaults < JSON config file (``--config``) < flags. Logs
go to standard error so that CSV and JSON written to standard output stay clean.
"""
import argparse
import logging
import math
import sys
from typing import Optional, Sequence

from QCatLab import __version__
from QCatLab.commands import (DEFAULT_FAULT, cmd_decohere, cmd_prepare, cmd_propagator, cmd_rates,
                              cmd_semiclassics, cmd_verify)
from QCatLab.config import LabUnits, RunConfig, ScanConfig, lab_time_to_tau, load_config_file
from QCatLab.errors import InvalidConfig
from QCatLab.profiles import get_profile


logger = logging.getLogger(__name__)

SECTIONS = ('scan', 'units', 'profile')
"""tuple[str, ...]: Config file sections that do not belong to the run configuration"""


def build_parser() -> argparse.ArgumentParser:
    """
    Create the argument parser with all subcommands.

    Returns
    -------
    argparse.ArgumentParser
        Parser
    """
    parser = argparse.ArgumentParser(
        prog='qcatlab', description='Decoherence of Schroedinger cat states in superradiance')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='more log output (repeat for debug output)')
    parser.add_argument('-q', '--quiet', action='store_true', help='only log errors')
    parser.add_argument('--config', help='JSON config file')
    commands = parser.add_subparsers(dest='command', required=True)

    decohere = commands.add_parser('decohere', help='decoherence curve of a cat as CSV')
    decohere.add_argument('--twice-j', type=int, help='twice the spin quantum number')
    for index in (1, 2):
        decohere.add_argument(f'--theta{index}', type=float, help=f'polar angle {index} (degrees)')
        decohere.add_argument(f'--phi{index}', type=float, help=f'azimuth {index} (degrees)')
        decohere.add_argument(f'--gamma{index}', type=float, help=f'real label {index}')
    decohere.add_argument('--t-max', type=float, help='last sample time (tau)')
    decohere.add_argument('--t-max-seconds', type=float,
                          help='last sample time in seconds (converted with the config units)')
    decohere.add_argument('--samples', type=int, help='number of samples including tau=0')
    decohere.add_argument('--engine', help='oracle, exact or short_time')
    decohere.add_argument('--tol', type=float, help='tolerance of the reference integrator')
    decohere.add_argument('--short-time-form', choices=('printed', 'matched'))
    decohere.add_argument('--window-end', type=float, help='log the initial rate over (0, end]')
    decohere.add_argument('--output', help='CSV file (standard output by default)')

    rates = commands.add_parser('rates', help='fitted and predicted initial rates as JSON')
    rates.add_argument('--twice-j', type=int, nargs='+', help='values of 2j')
    rates.add_argument('--pair', type=float, nargs=2, action='append', metavar=('G1', 'G2'),
                       help='real label pair (repeatable)')
    rates.add_argument('--window', type=float, help='fit window in units of j tau')
    rates.add_argument('--window-samples', type=int, help='samples in the fit window')
    rates.add_argument('--engine', help='oracle, exact or short_time')
    rates.add_argument('--workers', type=int, help='worker threads')
    rates.add_argument('--output', help='JSON file (standard output by default)')

    propagator = commands.add_parser('propagator', help='propagator table as CSV')
    propagator.add_argument('--twice-j', type=int, required=True, help='twice the spin')
    propagator.add_argument('--tau', type=float, nargs='+', required=True, help='times')
    propagator.add_argument('--twice-k', type=int, help='single block m1 - m2 (all by default)')
    propagator.add_argument('--output', help='CSV file (standard output by default)')

    semiclassics = commands.add_parser('semiclassics', help='saddle, coefficients, predictions')
    semiclassics.add_argument('--gamma1', type=float, required=True)
    semiclassics.add_argument('--gamma2', type=float, required=True)
    semiclassics.add_argument('--j', type=float, required=True, help='spin quantum number')
    semiclassics.add_argument('--tau', type=float, nargs='+', default=[0.001, 0.002, 0.005])
    semiclassics.add_argument('--output', help='JSON file (standard output by default)')

    prepare = commands.add_parser('prepare', help='prepare a symmetric cat by twisting')
    prepare.add_argument('--twice-j', type=int, required=True, help='twice the (integer) spin')
    prepare.add_argument('--theta-offset', type=float, default=45.0,
                         help='distance of the components from the equator (degrees)')
    prepare.add_argument('--negative-control', action='store_true',
                         help='turn the final pulse axis by 90 degrees')
    prepare.add_argument('--output', help='JSON file (standard output by default)')

    verify = commands.add_parser('verify', help='run the acceptance suite')
    verify.add_argument('--profile', choices=('quick', 'full'), default='full')
    verify.add_argument('--inject-fault', action='store_true',
                        help='perturb the exact propagator (the suite must fail)')
    verify.add_argument('--output', help='JSON report file')
    return parser


def configure_logging(verbose: int, quiet: bool) -> None:
    """
    Configure the root logger once for the command line.

    Parameters
    ----------
    verbose : int
        Number of ``-v`` flags
    quiet : bool
        Whether only errors are logged
    """
    level = logging.ERROR if quiet else max(logging.WARNING - 10 * verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def _label_state(args: argparse.Namespace, index: int) -> Optional[dict]:
    gamma = getattr(args, f'gamma{index}')
    theta = getattr(args, f'theta{index}')
    phi = getattr(args, f'phi{index}')
    if gamma is not None and theta is not None:
        raise InvalidConfig(f'Give either --gamma{index} or --theta{index}, not both')
    if gamma is not None:
        return {'gamma': gamma}
    if theta is not None:
        return {'theta_deg': theta, 'phi_deg': phi if phi is not None else 0.0}
    if phi is not None:
        raise InvalidConfig(f'--phi{index} needs --theta{index}')
    return None


def run_config(args: argparse.Namespace, file_state: dict) -> RunConfig:
    """Resolve the run configuration of ``decohere``"""
    config = RunConfig()
    config.set_state({key: value for key, value in file_state.items() if key not in SECTIONS})
    flags = {'twice_j': args.twice_j, 't_max': args.t_max, 'samples': args.samples,
             'engine': args.engine, 'tol': args.tol, 'short_time_form': args.short_time_form,
             'window_end': args.window_end, 'output_path': args.output,
             'label1': _label_state(args, 1), 'label2': _label_state(args, 2)}
    config.set_state({key: value for key, value in flags.items() if value is not None})
    if args.t_max_seconds is not None:
        units = LabUnits.from_state(file_state.get('units', {}))
        config.set_state({'t_max': lab_time_to_tau(args.t_max_seconds, units, config.spin)})
    return config


def scan_config(args: argparse.Namespace, file_state: dict) -> ScanConfig:
    """Resolve the scan configuration of ``rates``"""
    config = ScanConfig.from_state(file_state.get('scan', {}))
    flags = {'twice_js': args.twice_j, 'pairs': args.pair, 'window_jtau': args.window,
             'window_samples': args.window_samples, 'engine': args.engine,
             'workers': args.workers, 'output_path': args.output}
    config.set_state({key: value for key, value in flags.items() if value is not None})
    return config


def dispatch(args: argparse.Namespace) -> int:
    """
    Run the selected subcommand.

    Parameters
    ----------
    args : argparse.Namespace
        Parsed arguments

    Returns
    -------
    int
        Exit code
    """
    file_state = load_config_file(args.config) if args.config else {}

    if args.command == 'decohere':
        cmd_decohere(run_config(args, file_state))
    elif args.command == 'rates':
        cmd_rates(scan_config(args, file_state))
    elif args.command == 'propagator':
        cmd_propagator(args.twice_j, args.tau, args.twice_k, args.output or '')
    elif args.command == 'semiclassics':
        cmd_semiclassics(args.gamma1, args.gamma2, args.j, args.tau, args.output or '')
    elif args.command == 'prepare':
        axis_offset = math.pi / 2.0 if args.negative_control else 0.0
        cmd_prepare(args.twice_j, math.radians(args.theta_offset), axis_offset, args.output or '')
    elif args.command == 'verify':
        profile = get_profile(args.profile)
        profile.set_state(file_state.get('profile', {}))
        fault = DEFAULT_FAULT if args.inject_fault else 0.0
        code, _, summary = cmd_verify(profile, fault, args.output or '')
        sys.stdout.write(summary)
        return code
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of ``qcatlab``.

    Parameters
    ----------
    argv : Sequence[str], optional
        Arguments (``sys.argv[1:]`` by default)

    Returns
    -------
    int
        Exit code: 0 on success, 1 if verification failed, 2 on invalid input
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return dispatch(args)
    except (ValueError, OSError) as error:
        sys.stderr.write(f'qcatlab: error: {error}\n')
        return 2
