"""
Acceptance checks of the lab.

Every check reads its grids and thresholds from the profile it is evaluated with; measured values
are stored in the check result so that the verification report shows how close each criterion
came to its threshold.
"""
import itertools
import logging
import math

import numpy as np

from QCatLab.checks.check import Check, CheckResult
from QCatLab.dissipator import BlockDensity
from QCatLab.engines import OracleEngine
from QCatLab.errors import BoundarySaddle
from QCatLab.export import curve_csv, report_json
from QCatLab.norms import (decoherence_curve, n1_rate_finite_difference, n1_rate_oracle,
                           window_rate)
from QCatLab.preparation import prepare_symmetric_cat
from QCatLab.profiles import Profile
from QCatLab.semiclassics import (a0_field, fast_rate_coefficient, laplace_expand, maximize_action,
                                  n_ratio_semiclassical, predict_slow_exp, quadrature_oracle,
                                  saddle_point)
from QCatLab.semiclassics.predictions import predict_slow_poly
from QCatLab.spin import CoherentLabel, SpinQuantum, pointer_deviation


logger = logging.getLogger(__name__)



def fitted_rate(check: Check, twice_j: int, gamma1: float, gamma2: float,
                profile: Profile) -> float:
    """Initial decay rate of the cat (gamma1, gamma2) fitted over the profile window"""
    return window_rate(check.scene.exact_engine(), SpinQuantum(twice_j),
                       CoherentLabel.from_gamma(gamma1), CoherentLabel.from_gamma(gamma2),
                       profile.window_jtau, profile.window_samples)


class PolarCatCheck(Check):
    """The coherence of the polar cat decays exactly as exp(-tau) under both engines"""

    code = 1
    name = 'polar_cat'
    title = 'Polar cat decays as exp(-tau)'

    def evaluate(self, profile, inputs):
        taus = np.linspace(0.0, profile.polar_t_max, profile.polar_samples)
        north, south = CoherentLabel(0.0), CoherentLabel(math.pi)
        for engine in (OracleEngine(), self.scene.exact_engine()):
            for twice_j in profile.polar_twice_js:
                curve = decoherence_curve(engine, SpinQuantum(twice_j), north, south, taus)
                error = float(np.max(np.abs(curve.n_ratio - np.exp(-taus))))
                self.measure(f'{engine.name}_{twice_j}', error)
                self.require(error < profile.polar_tolerance,
                             f'{engine.name} engine at 2j={twice_j}: |n - exp(-tau)| = {error:.3g}')


class EngineEquivalenceCheck(Check):
    """Exact propagators and the reference integrator agree on every block"""

    code = 2
    name = 'engine_equivalence'
    title = 'Exact evolution matches the reference integrator'

    def evaluate(self, profile, inputs):
        rng = np.random.default_rng(1234)
        oracle, exact = OracleEngine(1e-13), self.scene.exact_engine()
        worst = 0.0
        for twice_j in range(1, profile.equivalence_max_twice_j + 1):
            spin = SpinQuantum(twice_j)
            matrix = (rng.standard_normal((spin.dim, spin.dim))
                      + 1j * rng.standard_normal((spin.dim, spin.dim)))
            rho0 = BlockDensity.from_matrix(matrix / np.max(np.abs(matrix)), spin)
            references = oracle.evolve_series(rho0, [0.0, *profile.equivalence_taus])[1:]
            for tau, reference in zip(profile.equivalence_taus, references):
                difference = exact.evolve(rho0, tau).max_abs_difference(reference)
                worst = max(worst, difference)
                self.require(difference < profile.equivalence_tolerance,
                             f'2j={twice_j}, tau={tau:g}: difference {difference:.3g}')
        self.measure('max_difference', worst)


class FastDecayCheck(Check):
    """Cats with gamma1 gamma2 != 1 decay at a rate proportional to j"""

    code = 3
    name = 'fast_decay'
    title = 'Accelerated decoherence scales with j'

    def evaluate(self, profile, inputs):
        gamma1, gamma2 = profile.fast_labels
        small, large = profile.fast_twice_js
        rate_small = fitted_rate(self, small, gamma1, gamma2, profile)
        rate_large = fitted_rate(self, large, gamma1, gamma2, profile)
        expected = -fast_rate_coefficient(gamma1, gamma2) * large / 2.0
        ratio = rate_large / rate_small
        self.measure('rates', {str(small): rate_small, str(large): rate_large})
        self.measure('expected_rate', expected)
        self.measure('ratio', ratio)
        relative = abs(rate_large - expected) / expected
        self.require(relative < profile.fast_rate_tolerance,
                     f'rate {rate_large:.6g} differs from {expected:.6g} by {relative:.1%}')
        expected_ratio = large / small
        self.require(abs(ratio - expected_ratio) < profile.scaling_tolerance,
                     f'rate ratio {ratio:.4g} is not {expected_ratio:g}')


class SlowDecayCheck(Check):
    """Cats with gamma1 gamma2 = 1 decay on the classical time scale"""

    code = 4
    name = 'slow_decay'
    title = 'Slow decoherence is independent of j'

    def evaluate(self, profile, inputs):
        gamma1, gamma2 = profile.slow_labels
        small, large = profile.slow_twice_js
        rate_small = fitted_rate(self, small, gamma1, gamma2, profile)
        rate_large = fitted_rate(self, large, gamma1, gamma2, profile)
        spread = abs(rate_large - rate_small) / max(abs(rate_large), abs(rate_small))
        self.measure('rates', {str(small): rate_small, str(large): rate_large})
        self.measure('spread', spread)
        self.require(spread < profile.slow_spread, f'rates differ by {spread:.1%}')
        linear = abs(rate_large - profile.slow_linear_rate) / profile.slow_linear_rate
        self.require(linear < profile.slow_linear_tolerance,
                     f'linear rate {rate_large:.6g} differs from {profile.slow_linear_rate:g} '
                     f'by {linear:.1%}')

        # Report only: which slow form describes n at a finite time
        tau = profile.slow_compare_tau
        curve = decoherence_curve(self.scene.exact_engine(), SpinQuantum(large),
                                  CoherentLabel.from_gamma(gamma1), CoherentLabel.from_gamma(gamma2),
                                  [0.0, tau])
        measured = float(curve.n_ratio[-1])
        exp_form = predict_slow_exp(gamma1, tau)
        poly_form = predict_slow_poly(gamma1, gamma2, tau)
        self.measure('n_at_compare_tau', {'measured': measured, 'exp_form': exp_form,
                                          'poly_form': poly_form,
                                          'closer': 'exp_form' if abs(exp_form - measured)
                                          <= abs(poly_form - measured) else 'poly_form'})


class InitialRateCheck(Check):
    """The generator gives the initial N1 rate; symmetric cats have rates bounded in j"""

    code = 5
    name = 'initial_rate'
    title = 'Initial N1 rate from the generator'

    symmetric_labels: tuple[CoherentLabel, CoherentLabel] = (
        CoherentLabel(math.pi / 4.0), CoherentLabel(3.0 * math.pi / 4.0))
    """tuple[CoherentLabel, CoherentLabel]: Cat whose rate must stay bounded in j"""
    asymmetric_labels: tuple[CoherentLabel, CoherentLabel] = (
        CoherentLabel(math.pi / 2.0), CoherentLabel(math.pi / 2.0, math.pi / 2.0))
    """tuple[CoherentLabel, CoherentLabel]: Cat whose rate must grow linearly in j"""

    def evaluate(self, profile, inputs):
        rng = np.random.default_rng(profile.oracle_seed)
        spin = SpinQuantum(profile.oracle_twice_j)
        worst = 0.0
        for _ in range(profile.oracle_pairs):
            thetas = rng.uniform(0.1, math.pi - 0.1, 2)
            phis = rng.uniform(0.0, 2.0 * math.pi, 2)
            label1, label2 = CoherentLabel(thetas[0], phis[0]), CoherentLabel(thetas[1], phis[1])
            oracle = n1_rate_oracle(spin, label1, label2)
            difference = n1_rate_finite_difference(spin, label1, label2)
            worst = max(worst, abs(oracle - difference) / max(abs(oracle), 1.0))
        self.measure('max_relative_difference', worst)
        self.require(worst < profile.oracle_rtol,
                     f'oracle and finite difference rates differ by {worst:.3g}')

        polar = n1_rate_oracle(spin, CoherentLabel(0.0), CoherentLabel(math.pi))
        self.measure('polar_rate', polar)
        self.require(abs(polar + 2.0) < profile.polar_rate_tolerance,
                     f'polar cat rate {polar:.9g} is not -2')

        symmetric = [n1_rate_oracle(SpinQuantum(twice_j), *self.symmetric_labels)
                     for twice_j in profile.symmetric_twice_js]
        # rates are negative; compare magnitudes
        magnitudes = [abs(rate) for rate in symmetric]
        factor = max(magnitudes) / min(magnitudes)
        self.measure('symmetric_rates', symmetric)
        self.measure('symmetric_factor', factor)
        self.require(factor < profile.symmetric_factor,
                     f'symmetric cat rates vary by a factor {factor:.4g}')

        asymmetric = [n1_rate_oracle(SpinQuantum(twice_j), *self.asymmetric_labels)
                      for twice_j in profile.symmetric_twice_js[-2:]]
        ratio = asymmetric[1] / asymmetric[0]
        self.measure('asymmetric_ratio', ratio)
        self.require(abs(ratio - 2.0) < profile.scaling_tolerance,
                     f'asymmetric cat rate ratio {ratio:.4g} on doubling j is not 2')


class LaplaceCheck(Check):
    """The Laplace expansion converges to quadrature and the saddle matches its closed form"""

    code = 6
    name = 'laplace'
    title = 'Laplace expansion and saddle point'

    def evaluate(self, profile, inputs):
        gamma1, gamma2 = profile.laplace_labels
        expansion = laplace_expand(None, gamma1, gamma2)
        errors = {}
        for j in profile.laplace_js:
            approximation = expansion.evaluate(j, scaled=True, n_orders=2)
            reference = quadrature_oracle(None, gamma1, gamma2, j, scaled=True)
            errors[j] = abs(approximation - reference) / abs(reference)
        self.measure('relative_errors', {f'{j:g}': error for j, error in errors.items()})
        reference_error = errors[profile.laplace_reference_j]
        self.require(reference_error < profile.laplace_rtol,
                     f'two term expansion error {reference_error:.3g} at '
                     f'j={profile.laplace_reference_j:g}')
        ordered = [errors[j] for j in sorted(errors)]
        self.require(all(later < earlier for earlier, later in zip(ordered, ordered[1:])),
                     f'expansion errors {ordered} do not decrease with j')

        saddle = saddle_point(gamma1, gamma2)
        ratio = laplace_expand(a0_field, gamma1, gamma2).orders[0] / expansion.orders[0]
        expected = float(a0_field(saddle.point.nu, saddle.point.eta))
        self.measure('leading_ratio', {'ratio': ratio, 'a0_saddle': expected})
        self.require(abs(ratio - expected) < profile.laplace_ratio_tolerance,
                     f'leading ratio {ratio:.12g} differs from a0 = {expected:.12g}')

        worst, compared = 0.0, 0
        for label1, label2 in itertools.product(profile.saddle_gammas, repeat=2):
            try:
                closed = saddle_point(label1, label2).point
            except BoundarySaddle:
                continue
            numeric = maximize_action(label1, label2)
            worst = max(worst, abs(numeric.nu - closed.nu), abs(numeric.eta - closed.eta))
            compared += 1
        self.measure('saddle_max_difference', worst)
        self.measure('saddle_pairs', compared)
        self.require(compared > 0, 'no interior saddle on the label grid')
        self.require(worst < profile.saddle_tolerance,
                     f'numeric saddle differs from the closed form by {worst:.3g}')


class SemiclassicalCheck(Check):
    """Semiclassical n(tau) follows the reference integrator in the accelerated case"""

    code = 7
    name = 'semiclassical'
    title = 'Semiclassical n(tau) in the accelerated case'
    depends = ('laplace',)

    def evaluate(self, profile, inputs):
        gamma1, gamma2 = profile.fast_labels
        spin = SpinQuantum(profile.semiclassical_twice_j)
        taus = np.linspace(0.0, profile.semiclassical_jtau / spin.j,
                           profile.semiclassical_samples + 1)
        curve = decoherence_curve(OracleEngine(1e-12), spin, CoherentLabel.from_gamma(gamma1),
                                  CoherentLabel.from_gamma(gamma2), taus)
        worst = 0.0
        for tau, measured in zip(taus[1:], curve.n_ratio[1:]):
            predicted = n_ratio_semiclassical(gamma1, gamma2, spin.j, tau)
            worst = max(worst, abs(math.log(predicted) - math.log(measured))
                        / abs(math.log(measured)))
        self.measure('max_relative_log_error', worst)
        self.require(worst < profile.semiclassical_tolerance,
                     f'ln n differs from the reference by {worst:.1%}')


class PreparationCheck(Check):
    """Twisting prepares a symmetric cat that decays slowly; a wrong pulse axis does not"""

    code = 8
    name = 'preparation'
    title = 'Preparation of symmetric cats'

    def _spread(self, profile: Profile, axis_offset: float, key: str) -> float:
        """Relative spread of the fitted decay rates of the prepared cat at the slow-check sizes"""
        rates = []
        for twice_j in profile.slow_twice_js:
            result = prepare_symmetric_cat(SpinQuantum(twice_j), profile.preparation_theta_offset,
                                           axis_offset)
            rates.append(window_rate(self.scene.exact_engine(), result.state.spin,
                                     result.fit.label1, result.fit.label2,
                                     profile.window_jtau, profile.window_samples))
        small, large = rates
        self.measure(key, rates)
        return abs(large - small) / max(abs(large), abs(small))

    def evaluate(self, profile, inputs):
        result = prepare_symmetric_cat(SpinQuantum(profile.preparation_twice_j),
                                       profile.preparation_theta_offset)
        fidelity = result.ideal_fidelity
        self.measure('ideal_fidelity', fidelity)
        self.require(fidelity >= profile.preparation_fidelity,
                     f'fidelity {fidelity:.6f} with the ideal symmetric cat')

        spread = self._spread(profile, 0.0, 'prepared_rates')
        self.measure('prepared_spread', spread)
        self.require(spread < profile.slow_spread, f'prepared cat rates differ by {spread:.1%}')

        control_spread = self._spread(profile, profile.control_axis_offset, 'control_rates')
        self.measure('control_spread', control_spread)
        self.require(control_spread >= profile.slow_spread,
                     f'wrong axis control rates differ by only {control_spread:.1%}')


class PointerCheck(Check):
    """Coherent states on the equator deviate from J- eigenstates by 1/sqrt(2j+1)"""

    code = 9
    name = 'pointer'
    title = 'Coherent states are approximate pointer states'

    def evaluate(self, profile, inputs):
        deviations = []
        for j in profile.pointer_js:
            deviation = pointer_deviation(SpinQuantum.from_j(j), CoherentLabel(math.pi / 2.0))
            expected = 1.0 / math.sqrt(2.0 * j + 1.0)
            deviations.append(deviation)
            self.require(abs(deviation - expected) < profile.pointer_tolerance,
                         f'deviation {deviation:.15g} at j={j:g} is not {expected:.15g}')
        self.measure('deviations', deviations)
        order = np.argsort(profile.pointer_js)
        ordered = [deviations[index] for index in order]
        self.require(all(later < earlier for earlier, later in zip(ordered, ordered[1:])),
                     'deviation does not decrease with j')


class DeterminismCheck(Check):
    """Repeated runs give identical bytes and the suite stays within its time budget"""

    code = 10
    name = 'determinism'
    title = 'Deterministic output and runtime'
    depends = ('polar_cat', 'engine_equivalence', 'fast_decay', 'slow_decay', 'initial_rate',
               'laplace', 'semiclassical', 'preparation', 'pointer')

    def run(self, profile: Profile, inputs: dict[str, CheckResult]) -> CheckResult:
        # Runs regardless of the other outcomes
        return super().run(profile, {})

    def evaluate(self, profile, inputs):
        spin = SpinQuantum(10)
        label1, label2 = CoherentLabel(math.pi / 4.0), CoherentLabel(3.0 * math.pi / 4.0, 0.5)
        taus = np.linspace(0.0, 0.5, 6)

        def _render() -> tuple[str, str]:
            curve = decoherence_curve(self.scene.exact_engine(), spin, label1, label2, taus)
            return curve_csv(curve), report_json({'curve': curve.get_state()})

        first, second = _render(), _render()
        self.measure('identical', first == second)
        self.require(first == second, 'two renderings of the same curve differ')

        elapsed = self.scene.elapsed()
        self.measure('within_budget', elapsed < profile.runtime_budget)
        self.require(elapsed < profile.runtime_budget,
                     f'suite took {elapsed:.1f} s (budget {profile.runtime_budget:g} s)')


ALL_CHECKS: tuple[type, ...] = (PolarCatCheck, EngineEquivalenceCheck, FastDecayCheck,
                                SlowDecayCheck, InitialRateCheck, LaplaceCheck, SemiclassicalCheck,
                                PreparationCheck, PointerCheck, DeterminismCheck)
"""tuple[type, ...]: All acceptance checks in code order"""
