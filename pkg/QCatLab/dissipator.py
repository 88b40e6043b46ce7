"""
Superradiance master equation in block form.

The generator (1/2j)(2 J- rho J+ - J+J- rho - rho J+J-) conserves the relative quantum number
k = (m1 - m2)/2. Matrix elements with equal k form a block indexed by the mean quantum number
m = (m1 + m2)/2, stored in descending m, and every block obeys the bidiagonal cascade

    d rho_m / d tau = c_m rho_(m+1) - lambda_m rho_m,

with lambda_m = (g_m - k^2)/j and c_m = sqrt(g_(m+k+1) g_(m-k+1))/j. Blocks are keyed by
``twice_k = m1 - m2`` and carry entries with ``twice_m = m1 + m2``.

Three solution paths are provided: a reference integrator (:py:func:`evolve_oracle`), the exact
propagator by residues with extended precision (:py:func:`propagator_exact`) together with its
matrix-exponential counterpart for long blocks (:py:func:`block_propagator`), and the short time
propagator (:py:func:`propagator_short_time`).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence, Union

import mpmath
import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from QCatLab.errors import DimensionMismatch, DomainError, IndexOutOfRange, StepUnderflow
from QCatLab.spin import DensityMatrix, SpinQuantum, ladder_matrices
from QCatLab.util import g_twice, log_factorial, log_q_factor, read_only


logger = logging.getLogger(__name__)

RESIDUE_MAX_LENGTH = 8
"""int: Longest block that ``method='auto'`` evaluates by residues"""


def block_length(spin: SpinQuantum, twice_k: int) -> int:
    """Number of entries in block ``twice_k``"""
    return spin.twice_j - abs(twice_k) + 1


def block_twice_m(spin: SpinQuantum, twice_k: int) -> np.ndarray:
    """Twice the mean quantum numbers of block ``twice_k`` in storage order (descending)"""
    top = spin.twice_j - abs(twice_k)
    return np.arange(top, -top - 1, -2)


@lru_cache(maxsize=1024)
def block_rates(spin: SpinQuantum, twice_k: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Decay rates and feed coefficients of one block.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Block key m1 - m2

    Returns
    -------
    tuple[numpy.ndarray, numpy.ndarray]
        Read-only ``(rates, feeds)``; ``feeds[p]`` multiplies entry ``p - 1`` in the equation of
        entry ``p`` (``feeds[0]`` is zero)
    """
    twice_j = spin.twice_j
    twice_m = block_twice_m(spin, twice_k)
    rates = (g_twice(twice_j, twice_m) - twice_k ** 2 / 4.0) / spin.j
    feeds = np.sqrt(g_twice(twice_j, twice_m + twice_k + 2)
                    * g_twice(twice_j, twice_m - twice_k + 2)) / spin.j
    feeds[0] = 0.0
    return read_only(rates), read_only(feeds)


def block_generator(spin: SpinQuantum, twice_k: int) -> np.ndarray:
    """
    Bidiagonal rate matrix of block ``twice_k``.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Block key m1 - m2

    Returns
    -------
    numpy.ndarray
        Real lower bidiagonal matrix G with d rho/d tau = G rho
    """
    rates, feeds = block_rates(spin, twice_k)
    return np.diag(-rates) + np.diag(feeds[1:], k=-1)


@dataclass(frozen=True, eq=False)
class BlockDensity:
    """
    Density matrix stored as decoupled blocks of constant k.

    Examples
    --------
    .. code-block:: python

        # Create the off-diagonal block of a cat and split it into blocks
        ket = coherent_state(spin, label1)
        bra = coherent_state(spin, label2)
        rho = BlockDensity.from_matrix(DensityMatrix.from_outer(ket, bra))

        # Reassemble the full matrix
        matrix = rho.to_matrix()

    Attributes
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    blocks : dict[int, numpy.ndarray]
        Complex block vectors keyed by ``twice_k`` (all keys from -2j to 2j are present)
    """

    spin: SpinQuantum
    blocks: dict[int, np.ndarray] = field(repr=False)

    def __post_init__(self):
        frozen = {}
        for twice_k in range(-self.spin.twice_j, self.spin.twice_j + 1):
            block = np.asarray(self.blocks.get(twice_k, np.zeros(block_length(self.spin, twice_k))),
                               dtype=complex)
            if block.shape != (block_length(self.spin, twice_k),):
                raise DimensionMismatch(f"Block '{twice_k}' of {self.spin} must have "
                                        f"{block_length(self.spin, twice_k)} entries, "
                                        f"got shape '{block.shape}'")
            frozen[twice_k] = read_only(block)
        unknown = set(self.blocks) - set(frozen)
        if unknown:
            raise DimensionMismatch(f"Unknown block keys {sorted(unknown)} for {self.spin}")
        object.__setattr__(self, 'blocks', frozen)

    @classmethod
    def from_matrix(cls, matrix: Union[DensityMatrix, np.ndarray],
                    spin: SpinQuantum = None) -> 'BlockDensity':
        """
        Split a matrix into its k-blocks.

        Parameters
        ----------
        matrix : :py:class:`~QCatLab.spin.DensityMatrix` or numpy.ndarray
            Matrix indexed by (m1, m2) in storage order
        spin : :py:class:`~QCatLab.spin.SpinQuantum`, optional
            Spin of the matrix (required for plain arrays)

        Returns
        -------
        :py:class:`BlockDensity`
            Block representation
        """
        if isinstance(matrix, DensityMatrix):
            spin, entries = matrix.spin, matrix.entries
        else:
            if spin is None:
                raise TypeError('A spin is needed to split a plain array into blocks')
            entries = DensityMatrix(spin, matrix).entries

        # Block twice_k is the diagonal with i2 - i1 = twice_k, ordered by descending m
        blocks = {twice_k: np.diagonal(entries, offset=twice_k).copy()
                  for twice_k in range(-spin.twice_j, spin.twice_j + 1)}
        return cls(spin, blocks)

    @classmethod
    def zeros(cls, spin: SpinQuantum) -> 'BlockDensity':
        """All-zero block density"""
        return cls(spin, {})

    def to_matrix(self) -> DensityMatrix:
        """
        Reassemble the full matrix.

        Returns
        -------
        :py:class:`~QCatLab.spin.DensityMatrix`
            Matrix indexed by (m1, m2)
        """
        entries = np.zeros((self.spin.dim, self.spin.dim), dtype=complex)
        index = np.arange(self.spin.dim)
        for twice_k, block in self.blocks.items():
            rows = index[max(0, -twice_k):self.spin.dim - max(0, twice_k)]
            entries[rows, rows + twice_k] = block
        return DensityMatrix(self.spin, entries)

    def entries(self) -> Iterator[tuple[int, int, complex]]:
        """
        Iterate over all entries.

        Returns
        -------
        Iterator[tuple[int, int, complex]]
            ``(twice_k, twice_m, value)`` triples
        """
        for twice_k, block in self.blocks.items():
            for twice_m, value in zip(block_twice_m(self.spin, twice_k), block):
                yield twice_k, int(twice_m), complex(value)

    def nonzero_blocks(self) -> list[int]:
        """Keys of blocks with at least one nonzero entry"""
        return [twice_k for twice_k, block in self.blocks.items() if np.any(block != 0)]

    def map_blocks(self, function) -> 'BlockDensity':
        """
        Apply ``function(twice_k, block) -> block`` to every block.

        Parameters
        ----------
        function : Callable[[int, numpy.ndarray], numpy.ndarray]
            Block transformation

        Returns
        -------
        :py:class:`BlockDensity`
            Transformed density
        """
        return BlockDensity(self.spin, {twice_k: function(twice_k, block)
                                        for twice_k, block in self.blocks.items()})

    def max_abs_difference(self, other: 'BlockDensity') -> float:
        """
        Largest absolute entry-wise difference to another block density.

        Parameters
        ----------
        other : :py:class:`BlockDensity`
            Density to compare with

        Returns
        -------
        float
            max |self - other|
        """
        if other.spin != self.spin:
            raise DimensionMismatch(f"Cannot compare densities of {self.spin} and {other.spin}")
        return max(float(np.max(np.abs(self.blocks[key] - other.blocks[key]), initial=0.0))
                   for key in self.blocks)

    def trace(self) -> complex:
        """Trace (sum of block 0)"""
        return complex(np.sum(self.blocks[0]))


def liouvillian_apply(rho: BlockDensity) -> BlockDensity:
    """
    Apply the superradiance generator block by block.

    Parameters
    ----------
    rho : :py:class:`BlockDensity`
        Density to act on

    Returns
    -------
    :py:class:`BlockDensity`
        d rho / d tau
    """
    def _apply(twice_k: int, block: np.ndarray) -> np.ndarray:
        rates, feeds = block_rates(rho.spin, twice_k)
        out = -rates * block
        out[1:] += feeds[1:] * block[:-1]
        return out
    return rho.map_blocks(_apply)


def dense_liouvillian_apply(matrix: DensityMatrix) -> DensityMatrix:
    """
    Apply the generator with dense matrices (reference for the block form).

    Parameters
    ----------
    matrix : :py:class:`~QCatLab.spin.DensityMatrix`
        Operator to act on

    Returns
    -------
    :py:class:`~QCatLab.spin.DensityMatrix`
        (1/2j)(2 J- rho J+ - J+J- rho - rho J+J-)
    """
    j_plus, j_minus, _ = ladder_matrices(matrix.spin)
    rho = matrix.entries
    j_pm = j_plus @ j_minus
    result = (2.0 * j_minus @ rho @ j_plus - j_pm @ rho - rho @ j_pm) / (2.0 * matrix.spin.j)
    return DensityMatrix(matrix.spin, result)


def _check_time(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0.0:
        raise DomainError(f"Time must be finite and non-negative, got '{tau}'")
    return tau


def evolve_oracle_series(rho0: BlockDensity, taus: Sequence[float],
                         tol: float = 1e-12) -> list[BlockDensity]:
    """
    Integrate the master equation block by block and sample it at several times.

    Each nonzero block is integrated with an explicit eighth order Runge-Kutta scheme with
    adaptive step control (``DOP853``) at relative tolerance ``tol``.

    Parameters
    ----------
    rho0 : :py:class:`BlockDensity`
        Initial density
    taus : Sequence[float]
        Non-negative, non-decreasing sample times
    tol : float, default=1e-12
        Relative tolerance of the step control

    Returns
    -------
    list[:py:class:`BlockDensity`]
        Density at each sample time

    Raises
    ------
    StepUnderflow
        If the integrator fails to advance
    """
    if tol <= 0.0:
        raise ValueError(f"Tolerance must be positive, got '{tol}'")
    taus = np.array([_check_time(tau) for tau in taus])
    if np.any(np.diff(taus) < 0.0):
        raise ValueError('Sample times must be non-decreasing')
    if len(taus) == 0:
        return []

    unique_taus, positions = np.unique(taus, return_inverse=True)
    series = [dict() for _ in taus]
    for twice_k, block in rho0.blocks.items():
        scale = float(np.max(np.abs(block), initial=0.0))
        if scale == 0.0 or taus[-1] == 0.0:
            for sample in series:
                sample[twice_k] = block
            continue
        generator = block_generator(rho0.spin, twice_k)
        result = solve_ivp(lambda _, y: generator @ y, (0.0, taus[-1]), block, method='DOP853',
                           t_eval=unique_taus, rtol=tol, atol=tol * 1e-3 * scale)
        if result.status != 0:
            raise StepUnderflow(f"Integration of block '{twice_k}' of {rho0.spin} failed: "
                                f"{result.message}")
        logger.debug('Block %d of %s integrated with %d evaluations', twice_k, rho0.spin,
                     result.nfev)
        for index, sample in enumerate(series):
            sample[twice_k] = result.y[:, positions[index]]
    return [BlockDensity(rho0.spin, sample) for sample in series]


def evolve_oracle(rho0: BlockDensity, tau: float, tol: float = 1e-12) -> BlockDensity:
    """
    Reference solution of the master equation at a single time.

    Parameters
    ----------
    rho0 : :py:class:`BlockDensity`
        Initial density
    tau : float
        Dimensionless time (units of the classical damping time)
    tol : float, default=1e-12
        Relative tolerance of the step control

    Returns
    -------
    :py:class:`BlockDensity`
        Density at time ``tau``
    """
    return evolve_oracle_series(rho0, [tau], tol)[0]


def _check_indices(spin: SpinQuantum, twice_k: int, twice_m: int, twice_n: int) -> None:
    """Raise IndexOutOfRange unless (m, n, k) address entries of one block with n >= m"""
    for name, twice_value in (('m', twice_m), ('n', twice_n)):
        for twice_single in (twice_value + twice_k, twice_value - twice_k):
            if abs(twice_single) > spin.twice_j or (spin.twice_j - twice_single) % 2:
                raise IndexOutOfRange(f"Index {name}={twice_value}/2 with k={twice_k}/2 is not a "
                                      f"valid element of {spin}")
    if twice_n < twice_m:
        raise IndexOutOfRange(f"Propagator needs n >= m, got m={twice_m}/2, n={twice_n}/2")


def _log_prefactor(spin: SpinQuantum, twice_k: int, twice_m: int, twice_n: int) -> float:
    """ln sqrt(Q_(m-k, n-k) Q_(m+k, n+k))"""
    twice_j = spin.twice_j
    return 0.5 * (log_q_factor(twice_j, twice_m - twice_k, twice_n - twice_k)
                  + log_q_factor(twice_j, twice_m + twice_k, twice_n + twice_k))


def propagator_exact(spin: SpinQuantum, twice_k: int, twice_m: int, twice_n: int,
                     tau: float) -> float:
    """
    Exact dissipative propagator D_mn(k, tau) from the residues of its Laplace representation.

    The integrand exp(tau s / j) / prod_l (s + g_l - k^2), l = m..n, has poles at s = k^2 - g_l.
    Since g_l = g_(1-l), two indices of the range can share a pole; such double poles contribute
    confluent residues (a term linear in tau times the exponential). Pole positions are exact
    multiples of 1/4, so multiplicities are found with integer arithmetic. The residue sum
    alternates in sign, so it is evaluated in a private ``mpmath`` context whose precision is set
    from the ratio between the largest residue and a lower bound of the result.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Twice the relative quantum number k
    twice_m : int
        Twice the final mean quantum number m
    twice_n : int
        Twice the initial mean quantum number n (n >= m)
    tau : float
        Dimensionless time

    Returns
    -------
    float
        D_mn(k, tau)

    Raises
    ------
    IndexOutOfRange
        If (m, n, k) do not address a valid block entry
    """
    _check_indices(spin, twice_k, twice_m, twice_n)
    tau = _check_time(tau)
    if tau == 0.0:
        return 1.0 if twice_m == twice_n else 0.0

    twice_j = spin.twice_j
    # Four times the pole positions: 4 (k^2 - g_l) is an integer
    poles = {}
    for twice_l in range(twice_m, twice_n + 1, 2):
        position = twice_k ** 2 - (twice_j + twice_l) * (twice_j - twice_l + 2)
        poles[position] = poles.get(position, 0) + 1
    time = tau / spin.j
    order = sum(poles.values())

    # Magnitudes of the individual residues (float logs, no cancellation involved)
    log_terms = []
    for position in poles:
        log_denominator = sum(multiplicity * math.log(abs(position - other) / 4.0)
                              for other, multiplicity in poles.items() if other != position)
        log_terms.append(position / 4.0 * time - log_denominator)
    log_prefactor = _log_prefactor(spin, twice_k, twice_m, twice_n)

    # Divided differences of exp(s t): result >= t^(N-1)/(N-1)! exp(s_min t)
    log_lower = (order - 1) * math.log(time) - float(log_factorial(order - 1)) \
        + min(poles) / 4.0 * time
    cancellation = max(0.0, (max(log_terms) + math.log(max(order, 2)) + 5.0 - log_lower)
                       / math.log(10.0))
    context = mpmath.MPContext()
    context.dps = int(20 + cancellation)
    logger.debug('Propagator (%d, %d, %d) of %s at tau=%g uses %d digits', twice_k, twice_m,
                 twice_n, spin, tau, context.dps)

    t_mp = context.mpf(tau) / context.mpf(spin.j)
    total = context.mpf(0)
    for position, multiplicity in poles.items():
        s_value = context.mpf(position) / 4
        denominator = context.mpf(1)
        correction = t_mp
        for other, other_multiplicity in poles.items():
            if other == position:
                continue
            difference = context.mpf(position - other) / 4
            denominator *= difference ** other_multiplicity
            correction -= other_multiplicity / difference
        residue = context.exp(s_value * t_mp) / denominator
        total += residue * correction if multiplicity == 2 else residue
    return float(total * context.exp(log_prefactor))


@lru_cache(maxsize=2048)
def _cached_block_propagator(spin: SpinQuantum, twice_k: int, tau: float,
                             method: str) -> np.ndarray:
    length = block_length(spin, twice_k)
    if method == 'auto':
        method = 'residues' if length <= RESIDUE_MAX_LENGTH else 'cascade'
    if method == 'cascade':
        return read_only(expm(tau * block_generator(spin, twice_k)))
    if method == 'residues':
        twice_m = block_twice_m(spin, twice_k)
        propagator = np.zeros((length, length))
        for row in range(length):
            for column in range(row + 1):
                propagator[row, column] = propagator_exact(spin, twice_k, int(twice_m[row]),
                                                           int(twice_m[column]), tau)
        return read_only(propagator)
    raise ValueError(f"Unknown propagator method '{method}'")


def block_propagator(spin: SpinQuantum, twice_k: int, tau: float,
                     method: str = 'auto') -> np.ndarray:
    """
    Full propagator matrix D(k, tau) of one block.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Block key m1 - m2
    tau : float
        Dimensionless time
    method : str, default='auto'
        ``'residues'`` (exact residue sums), ``'cascade'`` (matrix exponential of the
        bidiagonal generator) or ``'auto'`` (residues for blocks of at most
        :py:data:`RESIDUE_MAX_LENGTH` entries, otherwise cascade)

    Returns
    -------
    numpy.ndarray
        Read-only lower triangular matrix with entry (row m, column n) = D_mn(k, tau)
    """
    if abs(twice_k) > spin.twice_j:
        raise IndexOutOfRange(f"Block '{twice_k}' does not exist for {spin}")
    return _cached_block_propagator(spin, int(twice_k), _check_time(tau), method)


def evolve_exact(rho0: BlockDensity, tau: float, method: str = 'auto') -> BlockDensity:
    """
    Evolve a density with the exact propagator: rho_m(k, tau) = sum_n D_mn(k, tau) rho_n(k, 0).

    Parameters
    ----------
    rho0 : :py:class:`BlockDensity`
        Initial density
    tau : float
        Dimensionless time
    method : str, default='auto'
        Propagator evaluation path (see :py:func:`block_propagator`)

    Returns
    -------
    :py:class:`BlockDensity`
        Density at time ``tau``
    """
    tau = _check_time(tau)

    def _evolve(twice_k: int, block: np.ndarray) -> np.ndarray:
        if not np.any(block != 0):
            return block
        return block_propagator(rho0.spin, twice_k, tau, method) @ block
    return rho0.map_blocks(_evolve)


class ShortTimeValue(NamedTuple):
    """Short time propagator value together with its validity flag"""

    value: float
    """float: Approximate D_mn(k, tau)"""
    valid: bool
    """bool: Whether (|m+n-1|/j)(n-m) tau < 0.1"""


SHORT_TIME_FORMS = ('printed', 'matched')
"""tuple[str]: Available exponents of the short time propagator"""


def propagator_short_time(spin: SpinQuantum, twice_k: int, twice_m: int, twice_n: int,
                          tau: float, form: str = 'printed') -> ShortTimeValue:
    """
    Short time approximation of the dissipative propagator.

    D_mn = sqrt(Q_(m-k,n-k) Q_(m+k,n+k)) / (n-m)! (tau/j)^(n-m) exp(-(tau/j) E). The ``'printed'``
    exponent is E = j^2 - ((n+m-1)/2)^2. The ``'matched'`` exponent
    E = (j+1/2)^2 - k^2 - ((n+m-1)/2)^2 reproduces the exact decay of the diagonal entries
    (m = n) for every k.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Twice the relative quantum number k
    twice_m : int
        Twice the final mean quantum number m
    twice_n : int
        Twice the initial mean quantum number n (n >= m)
    tau : float
        Dimensionless time
    form : str, default='printed'
        Exponent variant (``'printed'`` or ``'matched'``)

    Returns
    -------
    :py:class:`ShortTimeValue`
        Value and validity flag

    Raises
    ------
    IndexOutOfRange
        If (m, n, k) do not address a valid block entry
    """
    if form not in SHORT_TIME_FORMS:
        raise ValueError(f"Unknown short time form '{form}'")
    _check_indices(spin, twice_k, twice_m, twice_n)
    tau = _check_time(tau)
    j = spin.j
    steps = (twice_n - twice_m) // 2
    valid = abs(twice_m + twice_n - 2) / 2.0 / j * steps * tau < 0.1
    if tau == 0.0:
        return ShortTimeValue(1.0 if steps == 0 else 0.0, valid)

    half_sum = (twice_n + twice_m - 2) / 4.0
    if form == 'printed':
        exponent = j ** 2 - half_sum ** 2
    else:
        exponent = (j + 0.5) ** 2 - (twice_k / 2.0) ** 2 - half_sum ** 2
    log_value = (_log_prefactor(spin, twice_k, twice_m, twice_n) - float(log_factorial(steps))
                 + steps * math.log(tau / j) - tau / j * exponent)
    return ShortTimeValue(math.exp(log_value), valid)


def short_time_block_propagator(spin: SpinQuantum, twice_k: int, tau: float,
                                form: str = 'printed') -> tuple[np.ndarray, bool]:
    """
    Short time propagator matrix of one block.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Block key m1 - m2
    tau : float
        Dimensionless time
    form : str, default='printed'
        Exponent variant

    Returns
    -------
    tuple[numpy.ndarray, bool]
        Lower triangular matrix and whether every entry is inside the validity region
    """
    twice_m = block_twice_m(spin, twice_k)
    length = len(twice_m)
    propagator = np.zeros((length, length))
    valid = True
    for row in range(length):
        for column in range(row + 1):
            value = propagator_short_time(spin, twice_k, int(twice_m[row]), int(twice_m[column]),
                                          tau, form)
            propagator[row, column] = value.value
            valid = valid and value.valid
    return propagator, valid


def s_sum_exact(spin: SpinQuantum, twice_k: int, twice_n: int, tau: float) -> float:
    """
    Column sum S(n, k, tau) = sum_m D_mn(k, tau) of the exact propagator.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the density matrix
    twice_k : int
        Twice the relative quantum number k
    twice_n : int
        Twice the initial mean quantum number n
    tau : float
        Dimensionless time

    Returns
    -------
    float
        S(n, k, tau)
    """
    twice_m = block_twice_m(spin, twice_k)
    matches = np.nonzero(twice_m == twice_n)[0]
    if len(matches) == 0:
        raise IndexOutOfRange(f"Index n={twice_n}/2 is not part of block '{twice_k}' of {spin}")
    propagator = block_propagator(spin, twice_k, tau, 'cascade')
    return float(np.sum(propagator[:, matches[0]]))
