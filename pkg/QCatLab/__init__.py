"""Module containing the decoherence lab for Schroedinger cat states of a superradiating spin"""
__version__ = "1.0.0"
from .spin import SpinQuantum, CoherentLabel, StateVector, DensityMatrix, coherent_state, cat_state
from .dissipator import BlockDensity, propagator_exact, block_propagator, evolve_exact, evolve_oracle
from .engines import Engine, OracleEngine, ExactEngine, ShortTimeEngine, get_engine
from .norms import DecoherenceCurve, decoherence_curve, fit_initial_rate, n1_rate_oracle
from .preparation import prepare_symmetric_cat
from .config import RunConfig, ScanConfig, LabUnits, lab_time_to_tau
