"""Two-mode beam splitter, partial traces, linear entropy and QKD arithmetic.

Beam-splitter convention (``theta = pi/4`` is the 50:50 device)::

    a^dag -> cos(theta) a^dag + i sin(theta) b^dag
    b^dag -> i sin(theta) a^dag + cos(theta) b^dag

For the eavesdropping setup the signal enters the second input with vacuum
in the first. Bob sits on output ``"B"`` and receives the ``cos(theta)``
(transmitted) part; Eve sits on output ``"A"`` and receives the
``sin(theta)`` part. ``"E"`` is accepted as an alias for ``"A"``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ParameterError, TruncationError
from .fock import TAIL_TOL, FockVector, make_nsfs, make_number, make_pacs

__all__ = [
    "TwoModeState",
    "DensityMatrix",
    "BeamSplitterParams",
    "beam_split",
    "reduce",
    "linear_entropy",
    "prob_at_least_one",
    "qkd_closed_forms",
    "qkd_numeric",
]


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Bipartite pure state; ``amplitudes[nA, nB] = <nA, nB|psi>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2:
            raise ParameterError("two-mode amplitudes must be a matrix")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoffs(self):
        return self.amplitudes.shape[0] - 1, self.amplitudes.shape[1] - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def mean_photons(self):
        p = np.abs(self.amplitudes) ** 2
        return (float(np.arange(p.shape[0]) @ p.sum(axis=1)),
                float(np.arange(p.shape[1]) @ p.sum(axis=0)))

    @classmethod
    def product(cls, sA: FockVector, sB: FockVector) -> "TwoModeState":
        return cls(np.outer(sA.amplitudes, sB.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Single-mode density operator in the Fock basis."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ParameterError("density matrix must be square")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def purity(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def check(self, herm_tol=1e-12, trace_tol=1e-10, eig_tol=1e-10):
        """Raise :class:`ParameterError` if Hermiticity, trace or positivity fail."""
        rho = self.entries
        if np.abs(rho - rho.conj().T).max() > herm_tol:
            raise ParameterError("density matrix is not Hermitian")
        if abs(self.trace - 1.0) > trace_tol:
            raise ParameterError(f"density matrix trace {self.trace} != 1")
        if np.linalg.eigvalsh(rho).min() < -eig_tol:
            raise ParameterError("density matrix has a negative eigenvalue")
        return self


@dataclass(frozen=True)
class BeamSplitterParams:
    theta: float = math.pi / 4

    def __post_init__(self):
        if not -1e-15 <= self.theta <= math.pi / 2 + 1e-15:
            raise ParameterError("beam-splitter angle must lie in [0, pi/2]")


@lru_cache(maxsize=512)
def _sector_unitary(total: int, theta: float) -> np.ndarray:
    """``exp(i theta (a^dag b + a b^dag))`` on the sector ``nA + nB = total``.

    Basis index is ``nA``. The generator is a real symmetric tridiagonal
    matrix, so the exponential is formed from its exact eigendecomposition
    (the direct binomial-sum formula cancels catastrophically for large
    ``total``).
    """
    if total == 0:
        return np.ones((1, 1), dtype=complex)
    k = np.arange(total)
    off = np.sqrt((k + 1.0) * (total - k))
    w, v = eigh_tridiagonal(np.zeros(total + 1), off)
    return (v * np.exp(1j * theta * w)) @ v.T


def beam_split(sA: FockVector, sB: FockVector, p: BeamSplitterParams = BeamSplitterParams(),
               out_cutoff: int = None) -> TwoModeState:
    """Mix two single-mode states on a beam splitter.

    The output keeps photon numbers up to ``out_cutoff`` in each mode
    (default: larger input cutoff + 5) and raises :class:`TruncationError`
    if the discarded mass exceeds ``TAIL_TOL``.
    """
    cutA, cutB = sA.cutoff, sB.cutoff
    if out_cutoff is None:
        out_cutoff = max(cutA, cutB) + 5
    inp = np.outer(sA.amplitudes, sB.amplitudes)
    out = np.zeros((out_cutoff + 1, out_cutoff + 1), dtype=complex)
    lost = 0.0
    for total in range(cutA + cutB + 1):
        nA = np.arange(max(0, total - cutB), min(cutA, total) + 1)
        vec = inp[nA, total - nA]
        if not np.any(vec):
            continue
        res = _sector_unitary(total, float(p.theta))[:, nA] @ vec
        kA = np.arange(total + 1)
        keep = (kA <= out_cutoff) & (total - kA <= out_cutoff)
        out[kA[keep], total - kA[keep]] = res[keep]
        lost += float(np.sum(np.abs(res[~keep]) ** 2))
    if lost > TAIL_TOL:
        raise TruncationError(
            f"beam-splitter output loses mass {lost:.3e} beyond cutoff {out_cutoff}")
    return TwoModeState(out)


def _port(port):
    port = port.upper()
    if port == "E":
        return "A"
    if port not in ("A", "B"):
        raise ParameterError(f"unknown port {port!r}; use 'A' (alias 'E') or 'B'")
    return port


def reduce(t: TwoModeState, keep: str = "A") -> DensityMatrix:
    """Partial trace keeping output ``keep``."""
    m = t.amplitudes
    if _port(keep) == "A":
        return DensityMatrix(m @ m.conj().T)
    return DensityMatrix(m.T @ m.conj())


def linear_entropy(rho: DensityMatrix) -> float:
    """``1 - Tr(rho^2)``."""
    return 1.0 - rho.purity()


def prob_at_least_one(t: TwoModeState, port: str) -> float:
    """Probability that the detector on ``port`` clicks (one or more photons)."""
    rho = reduce(t, port)
    return 1.0 - rho.entries[0, 0].real / rho.trace


def qkd_closed_forms(alpha: complex, theta: float) -> dict:
    """Detection probabilities of Bob and Eve for SPACS and vacuum-filtered inputs.

    Keys: ``P_B``, ``P_E`` (single-photon-added coherent state), ``Pt_B``,
    ``Pt_E`` (``psi(alpha, 0)``), and the ratios ``R_spacs = P_E / P_B``,
    ``R_nsfs = Pt_E / Pt_B``.
    """
    x = abs(alpha) ** 2
    if x == 0.0:
        raise ParameterError("QKD probabilities need |alpha| > 0")
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    # 1 - e^{-x c^2} s^2 (1 + x s^2) / (1 + x), split so the theta limits are exact
    p_b = -math.expm1(-x * c2) + math.exp(-x * c2) * c2 * (1.0 + x * (1.0 + s2)) / (1.0 + x)
    p_e = -math.expm1(-x * s2) + math.exp(-x * s2) * s2 * (1.0 + x * (1.0 + c2)) / (1.0 + x)
    # no-click probability (e^{-x c^2} - e^{-x}) / (1 - e^{-x}) without cancellation
    denom = -math.expm1(-x)
    pt_b = 1.0 + math.exp(-x * c2) * math.expm1(-x * s2) / denom
    pt_e = 1.0 + math.exp(-x * s2) * math.expm1(-x * c2) / denom
    return {
        "P_B": p_b,
        "P_E": p_e,
        "Pt_B": pt_b,
        "Pt_E": pt_e,
        "R_spacs": p_e / p_b if p_b > 0 else math.nan,
        "R_nsfs": pt_e / pt_b if pt_b > 0 else math.nan,
    }


def qkd_numeric(alpha: complex, theta: float) -> dict:
    """Same quantities as :func:`qkd_closed_forms` from explicit beam splitting."""
    p = BeamSplitterParams(theta)
    spacs = make_pacs(alpha, 1)
    nsfs = make_nsfs(alpha, 0)
    out_s = beam_split(make_number(0, spacs.cutoff), spacs, p)
    out_n = beam_split(make_number(0, nsfs.cutoff), nsfs, p)
    res = {
        "P_B": prob_at_least_one(out_s, "B"),
        "P_E": prob_at_least_one(out_s, "E"),
        "Pt_B": prob_at_least_one(out_n, "B"),
        "Pt_E": prob_at_least_one(out_n, "E"),
    }
    res["R_spacs"] = res["P_E"] / res["P_B"] if res["P_B"] > 0 else math.nan
    res["R_nsfs"] = res["Pt_E"] / res["Pt_B"] if res["Pt_B"] > 0 else math.nan
    return res
