"""
Module containing the grids and thresholds of the acceptance suite.

The package comes with two profiles:

- :py:class:`~.full.FullProfile`: complete grids, used by ``qcatlab verify``
- :py:class:`~.quick.QuickProfile`: reduced grids with the same thresholds (``--profile quick``)

Examples
--------
To define your own profile, derive a class from an existing profile and override attributes:

.. code-block:: python

    class WideProfile(FullProfile):
        name = 'wide'
        fast_twice_js = (120, 240)

See the :py:class:`~.profile.Profile` class for all attributes.
"""
from QCatLab.errors import InvalidConfig
from .profile import Profile, ProfileType
from .full import FullProfile
from .quick import QuickProfile


PROFILES: dict[str, ProfileType] = {profile.name: profile for profile in (FullProfile, QuickProfile)}
"""dict[str, ProfileType]: Profiles selectable by name"""


def get_profile(name: str) -> Profile:
    """
    Create a profile instance by name.

    Parameters
    ----------
    name : str
        Profile name ('full' or 'quick')

    Returns
    -------
    :py:class:`~.profile.Profile`
        Profile instance

    Raises
    ------
    InvalidConfig
        If no profile with this name exists
    """
    if name not in PROFILES:
        raise InvalidConfig(f"Unknown profile '{name}', choose from {sorted(PROFILES)}")
    return PROFILES[name]()
