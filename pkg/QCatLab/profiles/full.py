"""Class containing the full acceptance profile"""
from QCatLab.profiles.profile import Profile, QUARTER_TURN


class FullProfile(Profile):
    """Acceptance profile with the complete grids and thresholds"""

    name: str = 'full'

    # Polar cat decay
    polar_twice_js: tuple[int, ...] = (2, 10, 20, 40)
    polar_t_max: float = 3.0
    polar_samples: int = 31
    polar_tolerance: float = 1e-8

    # Engine equivalence
    equivalence_max_twice_j: int = 20
    equivalence_taus: tuple[float, ...] = (0.1, 1.0)
    equivalence_tolerance: float = 1e-8

    # Fit of decay rates
    window_jtau: float = 0.05
    window_samples: int = 10

    # Accelerated decay
    fast_labels: tuple[float, float] = (0.3, 0.9)
    fast_twice_js: tuple[int, int] = (60, 120)
    fast_rate_tolerance: float = 0.1
    scaling_tolerance: float = 0.2

    # Slow decay
    slow_labels: tuple[float, float] = (0.5, 2.0)
    slow_twice_js: tuple[int, int] = (60, 120)
    slow_spread: float = 0.15
    slow_linear_rate: float = 0.36
    slow_linear_tolerance: float = 0.1
    slow_compare_tau: float = 0.5

    # Initial rate
    oracle_pairs: int = 20
    oracle_twice_j: int = 20
    oracle_seed: int = 20240501
    oracle_rtol: float = 1e-6
    polar_rate_tolerance: float = 1e-6
    symmetric_twice_js: tuple[int, ...] = (40, 80, 160)
    symmetric_factor: float = 1.2

    # Laplace expansion
    laplace_labels: tuple[float, float] = (0.5, 2.0)
    laplace_js: tuple[float, ...] = (20.0, 40.0, 80.0)
    laplace_reference_j: float = 40.0
    laplace_rtol: float = 1e-3
    laplace_ratio_tolerance: float = 1e-8
    saddle_gammas: tuple[float, ...] = (0.2, 0.5, 0.9, 1.5, 3.0, 5.0)
    saddle_tolerance: float = 1e-8

    # Semiclassical n(tau)
    semiclassical_twice_j: int = 120
    semiclassical_jtau: float = 0.1
    semiclassical_samples: int = 5
    semiclassical_tolerance: float = 0.05

    # Preparation
    preparation_twice_j: int = 40
    preparation_theta_offset: float = QUARTER_TURN
    preparation_fidelity: float = 0.999
    control_axis_offset: float = 2.0 * QUARTER_TURN

    # Pointer states
    pointer_js: tuple[float, ...] = (5.0, 10.0, 50.0)
    pointer_tolerance: float = 1e-10

    # Suite
    runtime_budget: float = 180.0
