"""
Module containing the base class for objects that are echoed into JSON reports.
"""
from abc import ABCMeta, abstractmethod
from typing import TypeVar, Type


SerializableT = TypeVar('SerializableT', bound='Serializable')


class Serializable(metaclass=ABCMeta):
    """
    Base for serializable objects.

    This class is abstract and cannot be used by itself. Run and scan configurations, laboratory
    units and acceptance profiles inherit from it so that every report header is built the same
    way.

    Examples
    --------
    .. code-block:: python

        config = RunConfig()
        state = config.get_state()      # JSON-safe dictionary
        copy = RunConfig.from_state(state)
    """

    @abstractmethod
    def get_state(self) -> dict:
        """
        Get the state of this object as a (JSON-safe) dictionary

        Returns
        -------
        dict
            JSON-safe dictionary representing object state
        """

    @abstractmethod
    def set_state(self, state: dict) -> bool:
        """
        Set the state of this object from a state dictionary.

        Keys that are missing from ``state`` keep their current value.

        Parameters
        ----------
        state : dict
            Dictionary representation of the desired object state

        Returns
        -------
        bool
            Whether setting the object state succeeded

        Raises
        ------
        InvalidConfig
            If a value in ``state`` is invalid
        """

    @classmethod
    def from_state(cls: Type[SerializableT], state: dict) -> SerializableT:
        """
        Create a default instance and apply a state dictionary to it.

        Parameters
        ----------
        state : dict
            Dictionary representation of the desired object state

        Returns
        -------
        Serializable
            New object
        """
        instance = cls()
        instance.set_state(state)
        return instance
