"""Truncated Fock-space states, state factories and ladder operators.

A :class:`FockVector` holds the amplitudes ``<n|psi>`` for ``n = 0..cutoff``.
The cutoff is fixed when the vector is built; binary operations insist on
equal cutoffs and :meth:`FockVector.resize` is the only way to change it.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import NormalizationError, ParameterError, TruncationError
from .special import laguerre, log_factorial, poisson_tail

__all__ = [
    "TAIL_TOL",
    "UNDERFLOW_TOL",
    "FockVector",
    "Coherent",
    "Number",
    "NSFS",
    "LTCS",
    "UTCS",
    "PACS",
    "EvenCat",
    "OddCat",
    "StateSpec",
    "choose_cutoff",
    "make_state",
    "make_number",
    "make_coherent",
    "make_nsfs",
    "make_ltcs",
    "make_utcs",
    "make_pacs",
    "make_even_cat",
    "make_odd_cat",
    "filter_coefficient",
    "nsfs_norm_sq",
    "annihilate",
    "create",
    "inner_product",
    "fidelity",
    "free_evolution",
    "superpose",
]

TAIL_TOL = 1e-12
UNDERFLOW_TOL = 1e-14
_NULL_NORM = 1e-14


@dataclass(frozen=True, eq=False)
class FockVector:
    """Single-mode pure state over photon numbers ``0..cutoff``.

    Amplitudes are stored as a read-only complex array. The vector is not
    required to be normalized (branches of an atom-field state are not), but
    every factory in this module returns a unit vector.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise ParameterError("amplitudes must be a non-empty 1-D sequence")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    def __len__(self):
        return self.amplitudes.size

    def __getitem__(self, n):
        return self.amplitudes[n]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def normalized(self):
        """Return ``(unit vector, original norm)``."""
        norm = self.norm
        if norm <= _NULL_NORM:
            raise NormalizationError(f"cannot normalize a null state (norm {norm:.3e})")
        return FockVector(self.amplitudes / norm), norm

    def resize(self, cutoff: int) -> "FockVector":
        """Zero-pad to a larger cutoff or drop a negligible tail.

        Shrinking is refused when the discarded mass exceeds ``TAIL_TOL``
        (relative to the current norm); the shrunk vector is renormalized to
        the original norm.
        """
        if cutoff < 0:
            raise ParameterError("cutoff must be non-negative")
        if cutoff >= self.cutoff:
            return FockVector(np.pad(self.amplitudes, (0, cutoff - self.cutoff)))
        total = float(np.sum(np.abs(self.amplitudes) ** 2))
        lost = float(np.sum(np.abs(self.amplitudes[cutoff + 1:]) ** 2))
        if total == 0.0 or lost > TAIL_TOL * total:
            raise TruncationError(
                f"resizing to cutoff {cutoff} would discard mass {lost:.3e}")
        kept = self.amplitudes[: cutoff + 1]
        return FockVector(kept * math.sqrt(total / (total - lost)))


# --------------------------------------------------------------------------
# state descriptors


@dataclass(frozen=True)
class Coherent:
    alpha: complex


@dataclass(frozen=True)
class Number:
    m: int


@dataclass(frozen=True)
class NSFS:
    alpha: complex
    m: int


@dataclass(frozen=True)
class LTCS:
    alpha: complex
    N: int


@dataclass(frozen=True)
class UTCS:
    alpha: complex
    N: int


@dataclass(frozen=True)
class PACS:
    alpha: complex
    k: int


@dataclass(frozen=True)
class EvenCat:
    alpha: complex


@dataclass(frozen=True)
class OddCat:
    alpha: complex


StateSpec = Union[Coherent, Number, NSFS, LTCS, UTCS, PACS, EvenCat, OddCat]


_CUTOFF_MARGIN = 10


def _coherent_bound(alpha) -> int:
    x = abs(alpha) ** 2
    return math.ceil(x + 10.0 * math.sqrt(x + 1.0)) + _CUTOFF_MARGIN


def choose_cutoff(spec: StateSpec) -> int:
    """Smallest cutoff that keeps the discarded tail of ``spec`` below 1e-12.

    The rule is ``max(ceil(|a|^2 + 10 sqrt(|a|^2 + 1)) + 10, j + 10)`` with
    ``j`` the integer parameter of the family; photon-added states
    additionally shift the coherent bound by ``k``, and lower-truncated
    states grow it until the tail is small relative to the retained mass. The extra 10 photons push
    the tail mass to ~1e-20 so amplitudes, not just probabilities, are
    accurate to ~1e-10 (Wigner cross terms are linear in amplitudes).
    """
    alpha = getattr(spec, "alpha", 0.0)
    cutoff = _coherent_bound(alpha)
    if isinstance(spec, Number):
        cutoff = max(cutoff, spec.m + 10)
    elif isinstance(spec, NSFS):
        cutoff = max(cutoff, spec.m + 10)
    elif isinstance(spec, UTCS):
        cutoff = max(cutoff, spec.N + 10)
    elif isinstance(spec, LTCS):
        cutoff = max(cutoff, spec.N + 10)
        # renormalizing by the retained mass magnifies the discarded tail
        x = abs(spec.alpha) ** 2
        kept = poisson_tail(spec.N + 1, x)
        while kept > 0 and poisson_tail(cutoff + 1, x) > 1e-2 * TAIL_TOL * kept:
            cutoff += 5
    elif isinstance(spec, PACS):
        cutoff = max(cutoff + spec.k, spec.k + 10)
    return cutoff


def make_state(spec: StateSpec, cutoff: int = None) -> FockVector:
    """Build any supported state from its descriptor."""
    if cutoff is None:
        cutoff = choose_cutoff(spec)
    if isinstance(spec, Coherent):
        return make_coherent(spec.alpha, cutoff)
    if isinstance(spec, Number):
        return make_number(spec.m, cutoff)
    if isinstance(spec, NSFS):
        return make_nsfs(spec.alpha, spec.m, cutoff)
    if isinstance(spec, LTCS):
        return make_ltcs(spec.alpha, spec.N, cutoff)
    if isinstance(spec, UTCS):
        return make_utcs(spec.alpha, spec.N, cutoff)
    if isinstance(spec, PACS):
        return make_pacs(spec.alpha, spec.k, cutoff)
    if isinstance(spec, EvenCat):
        return make_even_cat(spec.alpha, cutoff)
    if isinstance(spec, OddCat):
        return make_odd_cat(spec.alpha, cutoff)
    raise ParameterError(f"unknown state descriptor {spec!r}")


# --------------------------------------------------------------------------
# factories


def _check_int(name, value):
    if int(value) != value or value < 0:
        raise ParameterError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def _log_coherent(alpha, n):
    """log|e^{-|a|^2/2} a^n / sqrt(n!)| and the phase n*arg(a), for array n."""
    r = abs(alpha)
    x = r * r
    if r == 0.0:
        logmag = np.where(n == 0, 0.0, -np.inf)
    else:
        logmag = -0.5 * x + n * math.log(r) - 0.5 * log_factorial(n)
    return logmag, n * (np.angle(alpha) if r else 0.0)


def _coherent_coeffs(alpha, cutoff):
    n = np.arange(cutoff + 1)
    logmag, phase = _log_coherent(complex(alpha), n)
    return np.exp(logmag) * np.exp(1j * phase)


def _check_tail(tail, what):
    if tail > TAIL_TOL:
        raise TruncationError(f"{what}: tail mass {tail:.3e} beyond cutoff exceeds {TAIL_TOL:g}")


def _unit(amps):
    return FockVector(amps / np.linalg.norm(amps))


def make_number(m: int, cutoff: int = None) -> FockVector:
    """Number state ``|m>``."""
    m = _check_int("m", m)
    cutoff = m + 10 if cutoff is None else cutoff
    if cutoff < m:
        raise ParameterError(f"cutoff {cutoff} below photon number {m}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[m] = 1.0
    return FockVector(amps)


def make_coherent(alpha: complex, cutoff: int = None) -> FockVector:
    """Coherent state ``|alpha>`` renormalized on the truncated space."""
    alpha = complex(alpha)
    cutoff = choose_cutoff(Coherent(alpha)) if cutoff is None else _check_int("cutoff", cutoff)
    _check_tail(poisson_tail(cutoff + 1, abs(alpha) ** 2), "coherent state")
    return _unit(_coherent_coeffs(alpha, cutoff))


def filter_coefficient(alpha: complex, m: int) -> complex:
    """``C_m = <m|alpha> = e^{-|a|^2/2} a^m / sqrt(m!)``."""
    m = _check_int("m", m)
    logmag, phase = _log_coherent(complex(alpha), np.array(m))
    return complex(np.exp(logmag) * np.exp(1j * phase))


def nsfs_norm_sq(alpha: complex, m: int) -> float:
    """``N_m^2 = 1 - e^{-|a|^2} |a|^{2m} / m!`` evaluated without cancellation at m = 0."""
    m = _check_int("m", m)
    x = abs(alpha) ** 2
    if m == 0:
        return -math.expm1(-x)
    return 1.0 - abs(filter_coefficient(alpha, m)) ** 2


def make_nsfs(alpha: complex, m: int, cutoff: int = None) -> FockVector:
    """Number-state filtered coherent state: ``|alpha>`` with ``|m>`` removed.

    Raises
    ------
    NormalizationError
        if ``N_m^2 <= 1e-14`` (only reachable for ``m = 0``, ``alpha -> 0``).
    """
    alpha = complex(alpha)
    m = _check_int("m", m)
    cutoff = choose_cutoff(NSFS(alpha, m)) if cutoff is None else _check_int("cutoff", cutoff)
    if m > cutoff:
        raise ParameterError(f"filtered number {m} lies above cutoff {cutoff}")
    norm_sq = nsfs_norm_sq(alpha, m)
    if norm_sq <= UNDERFLOW_TOL:
        raise NormalizationError(
            f"N_m^2 = {norm_sq:.3e} for alpha={alpha}, m={m}: filter removes the whole state")
    _check_tail(poisson_tail(cutoff + 1, abs(alpha) ** 2) / norm_sq, "NSFS")
    amps = _coherent_coeffs(alpha, cutoff)
    amps[m] = 0.0
    return _unit(amps / math.sqrt(norm_sq))


def make_utcs(alpha: complex, N: int, cutoff: int = None) -> FockVector:
    """Upper-truncated coherent state: coherent amplitudes kept for ``n <= N``."""
    alpha = complex(alpha)
    N = _check_int("N", N)
    cutoff = N if cutoff is None else _check_int("cutoff", cutoff)
    if cutoff < N:
        raise ParameterError(f"cutoff {cutoff} below truncation point {N}")
    n = np.arange(N + 1)
    logmag, phase = _log_coherent(alpha, n)
    # log-space renormalization survives heads far below 1e-300 of the Poisson mass
    shift = np.max(logmag)
    mags = np.exp(logmag - shift)
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[: N + 1] = mags * np.exp(1j * phase)
    return _unit(amps)


def make_ltcs(alpha: complex, N: int, cutoff: int = None) -> FockVector:
    """Lower-truncated coherent state: coherent amplitudes kept for ``n > N``.

    Raises
    ------
    NormalizationError
        if the retained Poisson mass ``sum_{n>N} |<n|alpha>|^2`` is below 1e-14.
    """
    alpha = complex(alpha)
    N = _check_int("N", N)
    cutoff = choose_cutoff(LTCS(alpha, N)) if cutoff is None else _check_int("cutoff", cutoff)
    if cutoff <= N:
        raise NormalizationError(f"LTCS support n > {N} is empty below cutoff {cutoff}")
    x = abs(alpha) ** 2
    kept = poisson_tail(N + 1, x)
    if kept <= UNDERFLOW_TOL:
        raise NormalizationError(
            f"LTCS retained mass {kept:.3e} for alpha={alpha}, N={N} underflows")
    _check_tail(poisson_tail(cutoff + 1, x) / kept, "LTCS")
    n = np.arange(N + 1, cutoff + 1)
    logmag, phase = _log_coherent(alpha, n)
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[N + 1:] = np.exp(logmag - 0.5 * math.log(kept)) * np.exp(1j * phase)
    return _unit(amps)


def make_pacs(alpha: complex, k: int, cutoff: int = None) -> FockVector:
    """Photon-added coherent state ``(a^dag)^k |alpha>``, normalized.

    The unnormalized norm squared is ``k! L_k(-|alpha|^2)`` (``1 + |alpha|^2``
    for a single added photon).
    """
    alpha = complex(alpha)
    k = _check_int("k", k)
    cutoff = choose_cutoff(PACS(alpha, k)) if cutoff is None else _check_int("cutoff", cutoff)
    if cutoff < k:
        raise ParameterError(f"cutoff {cutoff} below added photon number {k}")
    n = np.arange(k, cutoff + 1)
    logmag, phase = _log_coherent(alpha, n - k)
    logmag = logmag + 0.5 * (log_factorial(n) - log_factorial(n - k))
    log_norm_sq = log_factorial(k) + math.log(laguerre(k, 0, -abs(alpha) ** 2))
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[k:] = np.exp(logmag - 0.5 * log_norm_sq) * np.exp(1j * phase)
    _check_tail(1.0 - float(np.sum(np.abs(amps) ** 2)), "PACS")
    return _unit(amps)


def _cat(alpha, cutoff, sign):
    alpha = complex(alpha)
    cutoff = choose_cutoff(Coherent(alpha)) if cutoff is None else _check_int("cutoff", cutoff)
    x = abs(alpha) ** 2
    _check_tail(poisson_tail(cutoff + 1, x), "cat state")
    n = np.arange(cutoff + 1)
    keep = (n % 2 == 0) if sign > 0 else (n % 2 == 1)
    # |a> + s|-a> has norm^2 2(1 + s e^{-2|a|^2})
    norm_sq = 2.0 * (1.0 + math.exp(-2 * x)) if sign > 0 else -2.0 * math.expm1(-2 * x)
    logmag, phase = _log_coherent(alpha, n)
    mags = np.where(keep, np.exp(logmag + math.log(2.0) - 0.5 * math.log(norm_sq)), 0.0)
    return _unit(mags * np.exp(1j * phase))


def make_even_cat(alpha: complex, cutoff: int = None) -> FockVector:
    """Even coherent state, normalized ``|alpha> + |-alpha>``."""
    return _cat(alpha, cutoff, +1)


def make_odd_cat(alpha: complex, cutoff: int = None) -> FockVector:
    """Odd coherent state, normalized ``|alpha> - |-alpha>``."""
    if alpha == 0:
        raise NormalizationError("odd cat state of zero amplitude is the null vector")
    return _cat(alpha, cutoff, -1)


# --------------------------------------------------------------------------
# operations


def _same_cutoff(s1: FockVector, s2: FockVector):
    if s1.cutoff != s2.cutoff:
        raise ParameterError(
            f"cutoff mismatch ({s1.cutoff} vs {s2.cutoff}); resize one operand explicitly")


def annihilate(s: FockVector):
    """Apply ``a``; return ``(normalized image, norm of the unnormalized image)``."""
    amps = s.amplitudes
    out = np.zeros_like(amps)
    out[:-1] = np.sqrt(np.arange(1, amps.size)) * amps[1:]
    norm = float(np.linalg.norm(out))
    if norm <= _NULL_NORM:
        raise NormalizationError("annihilation operator maps the state to the null vector")
    return FockVector(out / norm), norm


def create(s: FockVector):
    """Apply ``a^dag``; return ``(normalized image, norm of the unnormalized image)``.

    Raises :class:`TruncationError` if the top amplitude would carry more than
    ``TAIL_TOL`` of the image's mass out of the space.
    """
    amps = s.amplitudes
    full = np.sqrt(np.arange(1, amps.size + 1)) * amps
    norm = float(np.linalg.norm(full))
    if norm <= _NULL_NORM:
        raise NormalizationError("creation operator applied to a null vector")
    lost = abs(full[-1]) ** 2 / norm**2
    _check_tail(lost, "creation operator")
    out = np.zeros_like(amps)
    out[1:] = full[:-1]
    return FockVector(out / np.linalg.norm(out)), norm


def inner_product(s1: FockVector, s2: FockVector) -> complex:
    """``<s1|s2>``, conjugate-linear in the first argument."""
    _same_cutoff(s1, s2)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: FockVector, s2: FockVector) -> float:
    """``|<s1|s2>|^2``; insensitive to global phase."""
    return abs(inner_product(s1, s2)) ** 2


def free_evolution(s: FockVector, phase: float) -> FockVector:
    """Apply ``exp(-i phase a^dag a)``."""
    n = np.arange(s.cutoff + 1)
    return FockVector(s.amplitudes * np.exp(-1j * phase * n))


def superpose(states: Sequence[FockVector], coeffs: Sequence[complex]) -> FockVector:
    """Normalized linear combination ``sum_i c_i |s_i>``."""
    if len(states) != len(coeffs) or not states:
        raise ParameterError("need one coefficient per state and at least one state")
    for s in states[1:]:
        _same_cutoff(states[0], s)
    total = sum(complex(c) * s.amplitudes for s, c in zip(states, coeffs))
    return FockVector(total).normalized()[0]
