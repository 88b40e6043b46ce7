"""Utility functions shared by the lab modules"""
from typing import Union

import numpy as np
from scipy.special import gammaln


ArrayLike = Union[int, float, np.ndarray]


def log_factorial(x: ArrayLike) -> ArrayLike:
    """
    Natural logarithm of x! computed through the log-gamma function.

    Parameters
    ----------
    x : int or float or numpy.ndarray
        Non-negative argument(s)

    Returns
    -------
    float or numpy.ndarray
        ln(x!)
    """
    return gammaln(np.asarray(x, dtype=float) + 1.0)


def log_binomial(n: ArrayLike, k: ArrayLike) -> ArrayLike:
    """
    Natural logarithm of the binomial coefficient C(n, k).

    Parameters
    ----------
    n : int or float or numpy.ndarray
        Upper argument
    k : int or float or numpy.ndarray
        Lower argument (0 <= k <= n)

    Returns
    -------
    float or numpy.ndarray
        ln C(n, k)
    """
    return log_factorial(n) - log_factorial(k) - log_factorial(np.asarray(n) - np.asarray(k))


def g_twice(twice_j: int, twice_l: ArrayLike) -> ArrayLike:
    """
    Evaluate g_l = j(j+1) - l(l-1), the eigenvalue of J+J- on |j l>, from twice-integer indices.

    With J = 2j and L = 2l this equals (J + L)(J - L + 2) / 4. Integer inputs give exact results
    up to the final division.

    Parameters
    ----------
    twice_j : int
        Twice the spin quantum number
    twice_l : int or numpy.ndarray
        Twice the magnetic index (or indices)

    Returns
    -------
    float or numpy.ndarray
        g_l
    """
    twice_l = np.asarray(twice_l)
    return (twice_j + twice_l) * (twice_j - twice_l + 2) / 4.0


def log_q_factor(twice_j: int, twice_m: int, twice_n: int) -> float:
    """
    Natural logarithm of Q_mn = (j+n)!(j-m)! / ((j+m)!(j-n)!).

    Parameters
    ----------
    twice_j : int
        Twice the spin quantum number
    twice_m : int
        Twice the first index
    twice_n : int
        Twice the second index

    Returns
    -------
    float
        ln Q_mn
    """
    return float(log_factorial((twice_j + twice_n) // 2) + log_factorial((twice_j - twice_m) // 2)
                 - log_factorial((twice_j + twice_m) // 2)
                 - log_factorial((twice_j - twice_n) // 2))


def read_only(array: np.ndarray) -> np.ndarray:
    """
    Return a read-only copy of an array (used for values shared between threads).

    Parameters
    ----------
    array : numpy.ndarray
        Array to copy

    Returns
    -------
    numpy.ndarray
        Read-only copy
    """
    copy = np.array(array, copy=True)
    copy.setflags(write=False)
    return copy


class NoValue:
    """Empty class used as a null value"""
