"""Photon-counting statistics, truncation splits and position densities.

Generic routines act on any :class:`~nsfs.fock.FockVector`. The ``*_nsfs``,
``*_utcs`` and ``*_ltcs`` functions are closed forms in terms of the Poisson
weights and incomplete gamma functions; they serve as independent checks on
the generic sums and stay accurate where the vectors themselves would
underflow.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, ParameterError
from .fock import (
    FockVector,
    annihilate,
    filter_coefficient,
    inner_product,
    make_ltcs,
    make_nsfs,
    make_utcs,
    nsfs_norm_sq,
)
from .special import hermite_functions, poisson_head, poisson_tail

__all__ = [
    "PhotonStats",
    "TruncationSplit",
    "photon_probability",
    "photon_stats",
    "mean_photon",
    "mean_photon_nsfs",
    "mandel_q",
    "mandel_q_nsfs",
    "mandel_q_utcs",
    "mandel_q_ltcs",
    "truncation_split",
    "truncation_split_numeric",
    "phase_sensitivity",
    "subtract_photons",
    "position_density",
    "spacs_overlap_closed_form",
]


@dataclass(frozen=True)
class PhotonStats:
    mean: float
    second_factorial_moment: float
    mandel_q: float


@dataclass(frozen=True)
class TruncationSplit:
    """Weights of a filtered state on its upper and lower truncated parts."""

    c_upper: complex
    c_lower: complex


def photon_probability(s: FockVector, k: int) -> float:
    """Probability of counting exactly ``k`` photons."""
    if not 0 <= k <= s.cutoff:
        raise ParameterError(f"photon number {k} outside 0..{s.cutoff}")
    return float(abs(s.amplitudes[k]) ** 2)


def _moments(s):
    p = s.probabilities()
    p = p / p.sum()
    n = np.arange(p.size)
    return float(n @ p), float((n * (n - 1)) @ p)


def mean_photon(s: FockVector) -> float:
    return _moments(s)[0]


def photon_stats(s: FockVector) -> PhotonStats:
    mean, fact2 = _moments(s)
    if mean <= 0.0:
        raise NormalizationError("Mandel Q is undefined for zero mean photon number")
    return PhotonStats(mean, fact2, (fact2 - mean * mean) / mean)


def mandel_q(s: FockVector) -> float:
    """``Q = (<a^dag^2 a^2> - <n>^2) / <n>``."""
    return photon_stats(s).mandel_q


def mean_photon_nsfs(alpha: complex, m: int) -> float:
    """Closed-form mean photon number of the filtered state."""
    x = abs(alpha) ** 2
    p = abs(filter_coefficient(alpha, m)) ** 2
    return (x - m * p) / nsfs_norm_sq(alpha, m)


def mandel_q_nsfs(alpha: complex, m: int, printed: bool = False) -> float:
    """Closed-form Mandel Q of the filtered state.

    With ``p = e^{-|a|^2} |a|^{2m} / m!`` and ``x = |a|^2``::

        Q = p (2 m x - m (m-1) - x^2 - m p) / (N_m^4 <n>)

    ``printed=True`` evaluates the variant with ``N_m^2`` in place of
    ``N_m^4``; it differs from the exact moments by a factor ``N_m^2`` and is
    kept only for comparison.
    """
    x = abs(alpha) ** 2
    p = abs(filter_coefficient(alpha, m)) ** 2
    norm_sq = nsfs_norm_sq(alpha, m)
    mean = (x - m * p) / norm_sq
    if mean <= 0.0:
        raise NormalizationError("Mandel Q is undefined for zero mean photon number")
    bracket = 2 * m * x - m * (m - 1) - x * x - m * p
    power = 1 if printed else 2
    return p * bracket / (norm_sq**power * mean)


def _truncated_q(mass, first, second):
    if mass <= 0.0 or first <= 0.0:
        raise NormalizationError("truncated state carries no photons")
    mean = first / mass
    return (second / mass - mean * mean) / mean


def mandel_q_utcs(alpha: complex, N: int) -> float:
    """Mandel Q of the upper-truncated coherent state (support ``n <= N``)."""
    x = abs(alpha) ** 2
    if x == 0.0:
        raise NormalizationError("Mandel Q is undefined for the vacuum")
    # sum_{n<=N} n^(k) p_n = x^k * sum_{j<=N-k} p_j
    mass = poisson_head(N, x)
    return _truncated_q(mass, x * poisson_head(N - 1, x), x * x * poisson_head(N - 2, x))


def mandel_q_ltcs(alpha: complex, N: int) -> float:
    """Mandel Q of the lower-truncated coherent state (support ``n > N``)."""
    x = abs(alpha) ** 2
    if x == 0.0:
        raise NormalizationError("LTCS of zero amplitude is the null vector")
    mass = poisson_tail(N + 1, x)
    return _truncated_q(mass, x * poisson_tail(N, x), x * x * poisson_tail(N - 1, x))


def truncation_split(alpha: complex, m: int) -> TruncationSplit:
    """Weights ``C_u``, ``C_l`` of ``psi(alpha, m)`` on ``UTCS(m-1)`` and ``LTCS(m)``.

    Both weights are real and non-negative (the parts share the phases of
    ``|alpha>``), given by the Poisson mass below and above ``m`` divided by
    ``N_m^2``. A part with empty support gets weight zero.
    """
    x = abs(alpha) ** 2
    norm_sq = nsfs_norm_sq(alpha, m)
    if norm_sq <= 1e-14:
        raise NormalizationError(f"psi({alpha}, {m}) is not normalizable")
    below = poisson_head(m - 1, x)
    above = poisson_tail(m + 1, x)
    return TruncationSplit(math.sqrt(below / norm_sq), math.sqrt(above / norm_sq))


def truncation_split_numeric(alpha: complex, m: int, cutoff: int = None):
    """Same weights as :func:`truncation_split`, by explicit inner products.

    Returns ``(split, utcs, ltcs, psi)`` with all vectors at a common cutoff.
    Raises :class:`NormalizationError` when either part is not constructible.
    """
    if m == 0:
        raise NormalizationError("UTCS(alpha, -1) has empty support")
    psi = make_nsfs(alpha, m, cutoff)
    utcs = make_utcs(alpha, m - 1, psi.cutoff)
    ltcs = make_ltcs(alpha, m, psi.cutoff)
    split = TruncationSplit(inner_product(utcs, psi), inner_product(ltcs, psi))
    return split, utcs, ltcs, psi


def phase_sensitivity(s: FockVector, theta: float = math.pi / 2) -> float:
    """Linearized phase uncertainty ``sqrt(1 + Q) / (sqrt(<n>) |sin theta|)``.

    Reduces to ``1 / (|alpha| |sin theta|)`` for a coherent state.
    """
    sin = abs(math.sin(theta))
    if sin < 1e-12:
        raise ParameterError("phase sensitivity is singular at sin(theta) = 0")
    stats = photon_stats(s)
    return math.sqrt(max(1.0 + stats.mandel_q, 0.0)) / (math.sqrt(stats.mean) * sin)


def subtract_photons(s: FockVector, j: int) -> FockVector:
    """Normalized ``a^j |s>``."""
    if j < 0:
        raise ParameterError("number of subtracted photons must be non-negative")
    for _ in range(j):
        s, _norm = annihilate(s)
    return s


def position_density(s: FockVector, x) -> np.ndarray:
    """``|<x|s>|^2`` with ``x = (a + a^dag) / sqrt(2)`` (unit mass and frequency)."""
    phi = hermite_functions(s.cutoff, x)
    psi = np.tensordot(s.amplitudes, phi, axes=1)
    return np.abs(psi) ** 2


def spacs_overlap_closed_form(alpha: complex) -> float:
    """``|<alpha,1|psi(alpha,0)>|^2 = |a|^2 / ((1 - e^{-|a|^2}) (1 + |a|^2))``."""
    x = abs(alpha) ** 2
    if x == 0.0:
        raise ParameterError("overlap undefined at alpha = 0 (vacuum-filtered state is null)")
    return x / (-math.expm1(-x) * (1.0 + x))
