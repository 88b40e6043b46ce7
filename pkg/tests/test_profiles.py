import pytest

from QCatLab.errors import InvalidConfig
from QCatLab.profiles import PROFILES, FullProfile, QuickProfile, get_profile


def test_get_profile():
    assert sorted(PROFILES) == ['full', 'quick']
    assert isinstance(get_profile('quick'), QuickProfile)
    assert get_profile('full').name == 'full'
    with pytest.raises(InvalidConfig):
        get_profile('thorough')


def test_quick_profile_keeps_thresholds():
    full, quick = FullProfile(), QuickProfile()
    assert set(full.get_state()) == set(quick.get_state())
    for key in ('polar_tolerance', 'equivalence_tolerance', 'fast_rate_tolerance', 'slow_spread',
                'oracle_rtol', 'laplace_rtol', 'semiclassical_tolerance', 'pointer_tolerance'):
        assert getattr(quick, key) == getattr(full, key)
    assert len(quick.polar_twice_js) < len(full.polar_twice_js)


def test_state_uses_lists():
    state = FullProfile().get_state()
    assert state['name'] == 'full'
    assert state['polar_twice_js'] == [2, 10, 20, 40]
    assert state['slow_labels'] == [0.5, 2.0]


def test_set_state_converts_values():
    profile = FullProfile()
    profile.set_state({'polar_twice_js': [2, 4], 'polar_tolerance': 1, 'runtime_budget': 30})
    assert profile.polar_twice_js == (2, 4)
    assert profile.polar_tolerance == 1.0 and isinstance(profile.polar_tolerance, float)
    assert profile.runtime_budget == 30.0
    assert FullProfile.polar_twice_js == (2, 10, 20, 40)


def test_from_state():
    profile = QuickProfile.from_state({'polar_samples': 5})
    assert profile.polar_samples == 5
    assert QuickProfile().polar_samples == 11


@pytest.mark.parametrize('state', [
    {'polar_speed': 1.0},
    {'polar_samples': 'many'},
    {'polar_samples': 3.5},
    {'name': 7}
])
def test_invalid_state(state):
    with pytest.raises(InvalidConfig):
        FullProfile().set_state(state)
