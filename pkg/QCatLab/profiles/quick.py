"""Class containing the quick (smoke test) acceptance profile"""
from QCatLab.profiles.full import FullProfile


class QuickProfile(FullProfile):
    """Full profile with reduced grids for fast smoke runs; thresholds are unchanged"""

    name: str = 'quick'

    polar_twice_js: tuple[int, ...] = (2, 10)
    polar_samples: int = 11
    equivalence_max_twice_j: int = 8
    oracle_pairs: int = 5
    oracle_twice_j: int = 10
    symmetric_twice_js: tuple[int, ...] = (20, 40, 80)
    saddle_gammas: tuple[float, ...] = (0.2, 1.5, 5.0)
    semiclassical_samples: int = 3
    runtime_budget: float = 60.0
