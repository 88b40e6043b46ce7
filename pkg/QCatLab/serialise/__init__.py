"""
Module containing the (de)serialisation contract of configuration objects
"""
from .serialise import Serializable
