"""
Commands behind the command-line interface.

Every command takes validated configuration objects, computes its result, writes it with
:py:mod:`~QCatLab.export` and returns it so that it can also be used from Python.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from QCatLab.checks import default_scene
from QCatLab.config import RunConfig, ScanConfig, label_from_gamma
from QCatLab.discrepancies import discrepancy_report
from QCatLab.dissipator import block_propagator, block_twice_m
from QCatLab.export import curve_csv, propagator_csv, report_json, sanitize_floats, write_text
from QCatLab.engines import ExactEngine
from QCatLab.norms import (DecoherenceCurve, decoherence_curve, fit_initial_rate, n1_rate_oracle,
                           n1_rate_printed, window_rate)
from QCatLab.preparation import prepare_symmetric_cat
from QCatLab.profiles import Profile, get_profile
from QCatLab.semiclassics import fast_rate_coefficient, semiclassical_report
from QCatLab.semiclassics.predictions import is_slow, slow_linear_coefficient
from QCatLab.spin import SpinQuantum


logger = logging.getLogger(__name__)

SLOW_RATE_SPREAD = 0.15
"""float: Largest relative change of the initial rate on doubling j for a slowly decaying cat"""

DEFAULT_FAULT = 1e-3
"""float: Relative error injected into the exact propagator by ``verify --inject-fault``"""


def cmd_decohere(config: RunConfig, perturbation: float = 0.0) -> DecoherenceCurve:
    """
    Evolve the configured cat and write its decoherence curve as CSV.

    Parameters
    ----------
    config : :py:class:`~QCatLab.config.RunConfig`
        Run configuration
    perturbation : float, default=0.0
        Fault injection factor of the exact engine

    Returns
    -------
    :py:class:`~QCatLab.norms.DecoherenceCurve`
        Sampled curve
    """
    engine = config.make_engine(perturbation)
    curve = decoherence_curve(engine, config.spin, config.label1, config.label2, config.taus())
    write_text(curve_csv(curve), config.output_path)
    if config.window_end is not None:
        logger.info('Initial decay rate over (0, %g]: %.10g', config.window_end,
                    fit_initial_rate(curve, config.window_end))
    logger.info('Decoherence curve of %s with %d samples (engine %s)', config.spin,
                config.samples, engine.tag())
    return curve


def rate_row(point: tuple[int, float, float], scan: ScanConfig) -> dict:
    """
    Fitted and predicted initial rates of one scan point.

    Parameters
    ----------
    point : tuple[int, float, float]
        (2j, gamma1, gamma2)
    scan : :py:class:`~QCatLab.config.ScanConfig`
        Scan configuration

    Returns
    -------
    dict
        Report row
    """
    twice_j, gamma1, gamma2 = point
    spin = SpinQuantum(twice_j)
    label1, label2 = label_from_gamma(gamma1), label_from_gamma(gamma2)
    slow = is_slow(gamma1, gamma2)
    finite = math.isfinite(gamma1) and math.isfinite(gamma2)
    row = {
        'twice_j': twice_j,
        'gamma1': gamma1,
        'gamma2': gamma2,
        'fitted_rate': window_rate(scan.make_engine(), spin, label1, label2, scan.window_jtau,
                                   scan.window_samples),
        'predict_fast': (-fast_rate_coefficient(gamma1, gamma2) * spin.j
                         if finite and not slow else None),
        'predict_slow_exp_linear': slow_linear_coefficient(gamma1) if slow and finite else None,
        'n1_rate_printed': n1_rate_printed(label1.theta, label2.theta, label2.phi - label1.phi,
                                       spin.j),
        'n1_rate_oracle': n1_rate_oracle(spin, label1, label2)
    }
    logger.info('Scan point 2j=%d (%g, %g): fitted rate %.6g', twice_j, gamma1, gamma2,
                row['fitted_rate'])
    return row


def cmd_rates(scan: ScanConfig) -> dict:
    """
    Fit initial decay rates over a scan and compare them with the closed forms.

    Scan points run concurrently; rows are emitted in sorted scan key order.

    Parameters
    ----------
    scan : :py:class:`~QCatLab.config.ScanConfig`
        Scan configuration

    Returns
    -------
    dict
        Report with ``config``, ``rows`` and ``discrepancies``
    """
    points = scan.points()
    with ThreadPoolExecutor(max_workers=scan.workers) as executor:
        futures = {point: executor.submit(rate_row, point, scan) for point in points}
        rows = {point: future.result() for point, future in futures.items()}
    report = {
        'command': 'rates',
        'config': scan.get_state(),
        'rows': [rows[point] for point in sorted(rows)],
        'discrepancies': discrepancy_report(twice_j=min(scan.twice_js))
    }
    write_text(report_json(sanitize_floats(report)), scan.output_path)
    return report


def propagator_rows(spin: SpinQuantum, taus: Sequence[float],
                    twice_k: Optional[int] = None) -> list[tuple[int, int, int, float, float]]:
    """
    Propagator values D_mn(k, tau) of one spin.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    taus : Sequence[float]
        Times
    twice_k : int, optional
        Single block to tabulate (all blocks by default)

    Returns
    -------
    list[tuple[int, int, int, float, float]]
        Rows (2m, 2n, 2k, tau, value) for every n >= m
    """
    keys = range(-spin.twice_j, spin.twice_j + 1) if twice_k is None else [twice_k]
    rows = []
    for tau in taus:
        for key in keys:
            matrix = block_propagator(spin, key, float(tau))
            twice_m = block_twice_m(spin, key)
            for row in range(len(twice_m)):
                for column in range(row + 1):
                    rows.append((int(twice_m[row]), int(twice_m[column]), key, float(tau),
                                 float(matrix[row, column])))
    return rows


def cmd_propagator(twice_j: int, taus: Sequence[float], twice_k: Optional[int] = None,
                   output_path: str = '') -> str:
    """
    Tabulate propagators as CSV ``m,n,k,tau,value``.

    Parameters
    ----------
    twice_j : int
        Twice the spin quantum number
    taus : Sequence[float]
        Times
    twice_k : int, optional
        Single block to tabulate
    output_path : str, default=''
        Output file (standard output when empty)

    Returns
    -------
    str
        CSV text
    """
    text = propagator_csv(propagator_rows(SpinQuantum(twice_j), taus, twice_k))
    write_text(text, output_path)
    return text


def cmd_semiclassics(gamma1: float, gamma2: float, j: float, taus: Sequence[float],
                     output_path: str = '') -> dict:
    """
    Dump saddle, coefficients and predictions of one label pair as JSON.

    Parameters
    ----------
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label
    j : float
        Spin quantum number
    taus : Sequence[float]
        Prediction times
    output_path : str, default=''
        Output file (standard output when empty)

    Returns
    -------
    dict
        Report
    """
    report = {'command': 'semiclassics', **semiclassical_report(gamma1, gamma2, j, taus)}
    write_text(report_json(sanitize_floats(report)), output_path)
    return report


def cmd_prepare(twice_j: int, theta_offset: float = math.pi / 4.0, axis_offset: float = 0.0,
                output_path: str = '') -> dict:
    """
    Run the preparation pipeline and check that the prepared cat decays slowly.

    The slow rate check prepares the same cat at j and 2j, evolves the fitted components with the
    exact engine over j tau in [0, 0.05] and compares the fitted initial decay rates.

    Parameters
    ----------
    twice_j : int
        Twice the spin quantum number (j integer)
    theta_offset : float, default=pi/4
        Distance of the components from the equator
    axis_offset : float, default=0.0
        Offset of the final pulse axis (nonzero for the negative control)
    output_path : str, default=''
        Output file (standard output when empty)

    Returns
    -------
    dict
        Report
    """
    result = prepare_symmetric_cat(SpinQuantum(twice_j), theta_offset, axis_offset)
    doubled = prepare_symmetric_cat(SpinQuantum(2 * twice_j), theta_offset, axis_offset)
    rates = [window_rate(ExactEngine(), prepared.state.spin, prepared.fit.label1,
                         prepared.fit.label2) for prepared in (result, doubled)]
    spread = abs(rates[1] - rates[0]) / max(abs(rates[0]), abs(rates[1]))
    report = {
        'command': 'prepare',
        'axis_offset': axis_offset,
        'preparation': result.get_state(),
        'slow_rate_check': {
            'twice_js': [twice_j, 2 * twice_j],
            'fitted_rates': rates,
            'spread': spread,
            'passed': spread < SLOW_RATE_SPREAD
        }
    }
    write_text(report_json(report), output_path)
    return report


def verify_summary(results: dict, discrepancies: list[dict], profile: Profile) -> str:
    """
    Human-readable summary of a verification run.

    Parameters
    ----------
    results : dict[str, :py:class:`~QCatLab.checks.CheckResult`]
        Check results
    discrepancies : list[dict]
        Discrepancy entries
    profile : :py:class:`~QCatLab.profiles.Profile`
        Profile of the run

    Returns
    -------
    str
        Text summary
    """
    lines = [f'Acceptance suite ({profile.name} profile)', '']
    for result in results.values():
        status = 'PASS' if result.passed else 'FAIL'
        lines.append(f'{status}  {result.name:<20} {result.elapsed:7.2f} s  {result.message}')
    lines += ['', 'Published formulas (printed vs alternative, closer to measurement wins)']
    for entry in discrepancies:
        if 'error' in entry:
            lines.append(f"  {entry['name']:<22} error: {entry['error']}")
            continue
        lines.append(f"  {entry['name']:<22} printed {entry['printed']:.10g}, alternative "
                     f"{entry['alternative']:.10g}, measured {entry['measured']:.10g} "
                     f"-> {entry['winner']}")
    passed = sum(result.passed for result in results.values())
    lines += ['', f'{passed}/{len(results)} checks passed']
    return '\n'.join(lines) + '\n'


def cmd_verify(profile: Profile = None, fault: float = 0.0,
               output_path: str = '') -> tuple[int, dict, str]:
    """
    Run the acceptance suite.

    Parameters
    ----------
    profile : :py:class:`~QCatLab.profiles.Profile`, optional
        Grids and thresholds (full profile by default)
    fault : float, default=0.0
        Relative error injected into the exact propagator
    output_path : str, default=''
        JSON report file (not written when empty)

    Returns
    -------
    tuple[int, dict, str]
        Exit code (0 if every check passed), JSON report and text summary
    """
    if profile is None:
        profile = get_profile('full')
    results = default_scene(fault).evaluate(profile)
    try:
        discrepancies = discrepancy_report(twice_j=profile.slow_twice_js[0],
                                           slow_labels=profile.slow_labels,
                                           slow_tau=profile.slow_compare_tau,
                                           fast_labels=profile.fast_labels,
                                           fast_jtau=profile.semiclassical_jtau)
    except ValueError as error:
        logger.exception('Discrepancy report failed')
        discrepancies = [{'name': 'discrepancy_report', 'error': f'{type(error).__name__}: {error}'}]

    passed = all(result.passed for result in results.values())
    report = {
        'command': 'verify',
        'profile': profile.get_state(),
        'fault': fault,
        'passed': passed,
        'checks': [result.get_state() for result in results.values()],
        'discrepancies': discrepancies
    }
    if output_path:
        write_text(report_json(sanitize_floats(report)), output_path)
    return (0 if passed else 1), report, verify_summary(results, discrepancies, profile)
