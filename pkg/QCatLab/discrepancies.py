"""
Adjudication of published closed forms that disagree with each other or with the exact dynamics.

Each entry evaluates the printed expression, its alternative and a measured value from an engine,
and names the expression that lies closer to the measurement. The entries are informative; none of
them decides the outcome of the acceptance suite.
"""
import logging
import math
from typing import Optional

import numpy as np

from QCatLab.dissipator import propagator_exact, propagator_short_time
from QCatLab.engines import Engine, ExactEngine
from QCatLab.norms import (decoherence_curve, fit_initial_rate, n1_rate_closed_form, n1_rate_oracle,
                           n1_rate_printed)
from QCatLab.semiclassics import n_ratio_semiclassical, predict_single_coherent, predict_slow_exp
from QCatLab.semiclassics.predictions import predict_slow_poly, slow_linear_coefficient
from QCatLab.spin import CoherentLabel, SpinQuantum


logger = logging.getLogger(__name__)

AGREEMENT_TOLERANCE = 1e-6
"""float: Relative difference below which printed and alternative forms are considered equal"""


def _entry(name: str, description: str, printed: float, alternative: float,
           measured: float) -> dict:
    printed_error = abs(printed - measured)
    alternative_error = abs(alternative - measured)
    scale = max(abs(printed), abs(alternative), 1e-300)
    entry = {
        'name': name,
        'description': description,
        'printed': printed,
        'alternative': alternative,
        'measured': measured,
        'printed_error': printed_error,
        'alternative_error': alternative_error,
        'differs': abs(printed - alternative) > AGREEMENT_TOLERANCE * scale,
        'winner': 'printed' if printed_error <= alternative_error else 'alternative'
    }
    logger.debug('Discrepancy %s: printed %.12g, alternative %.12g, measured %.12g', name, printed,
                 alternative, measured)
    return entry


def polar_rate_entry(spin: SpinQuantum) -> dict:
    """Printed initial N1 rate of the polar cat against the generator"""
    north, south = CoherentLabel(0.0), CoherentLabel(math.pi)
    return _entry('n1_rate_polar',
                  'Initial N1 rate of the polar cat: printed closed form vs closed form derived '
                  'from the generator',
                  n1_rate_printed(0.0, math.pi, 0.0, spin.j),
                  n1_rate_closed_form(0.0, math.pi, 0.0, spin.j),
                  n1_rate_oracle(spin, north, south))


def slow_form_entry(spin: SpinQuantum, gamma1: float, gamma2: float, tau: float,
                    engine: Engine) -> dict:
    """Exponential and polynomial slow decay forms against the evolved coherence"""
    curve = decoherence_curve(engine, spin, CoherentLabel.from_gamma(gamma1),
                              CoherentLabel.from_gamma(gamma2), [0.0, tau])
    return _entry('slow_decay_form',
                  f'Slow decay at tau={tau:g}: exponential form vs polynomial form',
                  predict_slow_exp(gamma1, tau), predict_slow_poly(gamma1, gamma2, tau),
                  float(curve.n_ratio[-1]))


def single_coherent_entry(spin: SpinQuantum, gamma: float, engine: Engine,
                          window: float = 0.05, samples: int = 11) -> dict:
    """Published initial decay rate of a single coherent state with and without the gamma^4 factor"""
    label = CoherentLabel.from_gamma(gamma)
    curve = decoherence_curve(engine, spin, label, label, np.linspace(0.0, window, samples))
    linear = slow_linear_coefficient(gamma)
    return _entry('single_coherent_rate',
                  f'Initial decay rate of the coherent state gamma={gamma:g}: printed rate with '
                  f'the gamma^4 factor vs rate without it',
                  -math.log(predict_single_coherent(gamma, 1.0)), linear,
                  fit_initial_rate(curve, window))


def short_time_entry(spin: SpinQuantum, tau: float) -> dict:
    """Printed and matched exponent of the short time propagator against the exact value"""
    twice_index = 0 if spin.is_integer else 1
    return _entry('short_time_exponent',
                  f'Short time propagator D_nn(0, tau={tau:g}) at n={twice_index}/2: printed '
                  f'exponent vs exponent matched to the exact single pole decay',
                  propagator_short_time(spin, 0, twice_index, twice_index, tau, 'printed').value,
                  propagator_short_time(spin, 0, twice_index, twice_index, tau, 'matched').value,
                  propagator_exact(spin, 0, twice_index, twice_index, tau))


def ratio_completion_entry(spin: SpinQuantum, gamma1: float, gamma2: float, jtau: float,
                           engine: Engine) -> dict:
    """Printed semiclassical n(tau) against the ratio completed at second order"""
    tau = jtau / spin.j
    curve = decoherence_curve(engine, spin, CoherentLabel.from_gamma(gamma1),
                              CoherentLabel.from_gamma(gamma2), [0.0, tau])
    return _entry('ratio_completion',
                  f'Semiclassical n at j tau={jtau:g}: printed second order bracket vs bracket '
                  f'including the second order term of the normalisation',
                  n_ratio_semiclassical(gamma1, gamma2, spin.j, tau),
                  n_ratio_semiclassical(gamma1, gamma2, spin.j, tau, complete_ratio=True),
                  float(curve.n_ratio[-1]))


def discrepancy_report(twice_j: int = 40, slow_labels: tuple[float, float] = (0.5, 2.0),
                       slow_tau: float = 0.5, fast_labels: tuple[float, float] = (0.3, 0.9),
                       fast_jtau: float = 0.1, engine: Optional[Engine] = None) -> list[dict]:
    """
    Evaluate all adjudications.

    Examples
    --------
    .. code-block:: python

        for entry in discrepancy_report(twice_j=60):
            print(entry['name'], entry['winner'])

    Parameters
    ----------
    twice_j : int, default=40
        Twice the spin quantum number used for all measurements
    slow_labels : tuple[float, float], default=(0.5, 2.0)
        Labels of the slow case (gamma1 gamma2 = 1)
    slow_tau : float, default=0.5
        Time of the slow decay comparison
    fast_labels : tuple[float, float], default=(0.3, 0.9)
        Labels of the accelerated case
    fast_jtau : float, default=0.1
        Rescaled time of the semiclassical comparison
    engine : :py:class:`~QCatLab.engines.Engine`, optional
        Engine used for the measurements (defaults to the exact propagator)

    Returns
    -------
    list[dict]
        One JSON-safe entry per adjudication, sorted by name
    """
    if engine is None:
        engine = ExactEngine()
    spin = SpinQuantum(twice_j)
    entries = [
        polar_rate_entry(spin),
        slow_form_entry(spin, *slow_labels, slow_tau, engine),
        single_coherent_entry(spin, slow_labels[0], engine),
        short_time_entry(SpinQuantum(20), 0.01),
        ratio_completion_entry(spin, *fast_labels, fast_jtau, engine)
    ]
    return sorted(entries, key=lambda entry: entry['name'])
