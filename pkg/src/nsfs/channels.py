"""Phenomenological amplitude damping and qubit-state fidelities.

A pure state decays as ``|phi(t)> ~ exp(-gamma t a^dag a / 2) |phi(0)>``.
Two fidelity conventions are computed and kept apart:

``"unrenormalized"``
    ``|<phi(0)| exp(-gamma t n / 2) |phi(0)>|^2``; gives ``e^{-gamma t}`` for
    ``|1>``.
``"renormalized"``
    overlap with the renormalized decayed state; gives 1 for any number
    state and ``exp(-|alpha - alpha_d|^2)`` for ``|alpha>``.

The closed forms in :func:`fidelity_closed_form` follow the first convention
for ``number1`` and the second for ``coherent``, ``nsfs0`` and ``spacs``
(see ``CLOSED_FORM_CONVENTION``); each one is checked against
:func:`fidelity_numeric` in that convention.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, ParameterError
from .fock import (
    FockVector,
    inner_product,
    make_coherent,
    make_nsfs,
    make_number,
    make_pacs,
)

__all__ = [
    "DampingParams",
    "FAMILIES",
    "CLOSED_FORM_CONVENTION",
    "damp",
    "family_state",
    "fidelity_numeric",
    "fidelity_closed_form",
]

FAMILIES = ("number1", "coherent", "nsfs0", "spacs")
CLOSED_FORM_CONVENTION = {
    "number1": "unrenormalized",
    "coherent": "renormalized",
    "nsfs0": "renormalized",
    "spacs": "renormalized",
}


@dataclass(frozen=True)
class DampingParams:
    gamma: float
    t: float

    def __post_init__(self):
        if self.gamma < 0 or self.t < 0:
            raise ParameterError("damping rate and time must be non-negative")
        if not math.isfinite(self.gamma * self.t):
            raise ParameterError("gamma * t must be finite")

    @property
    def decay(self) -> float:
        """Amplitude factor ``e^{-gamma t / 2}`` (so ``alpha_d = alpha * decay``)."""
        return math.exp(-0.5 * self.gamma * self.t)


def _decayed(s, p):
    n = np.arange(s.cutoff + 1)
    return s.amplitudes * np.exp(-0.5 * p.gamma * p.t * n)


def damp(s: FockVector, p: DampingParams) -> FockVector:
    """Decay every ``|n>`` by ``e^{-gamma t n / 2}`` and renormalize."""
    amps = _decayed(s, p)
    norm = float(np.linalg.norm(amps))
    if norm <= 1e-14:
        raise NormalizationError(f"damped state norm {norm:.3e} underflows")
    return FockVector(amps / norm)


def family_state(family: str, alpha: complex, cutoff: int = None) -> FockVector:
    """The non-vacuum qubit state of ``family``."""
    if family == "number1":
        return make_number(1, cutoff)
    if family == "coherent":
        return make_coherent(alpha, cutoff)
    if family == "nsfs0":
        return make_nsfs(alpha, 0, cutoff)
    if family == "spacs":
        return make_pacs(alpha, 1, cutoff)
    raise ParameterError(f"unknown family {family!r}; expected one of {FAMILIES}")


def fidelity_numeric(s0: FockVector, p: DampingParams,
                     convention: str = "renormalized") -> float:
    """Overlap fidelity of ``s0`` with its damped image."""
    if convention == "renormalized":
        return abs(inner_product(s0, damp(s0, p))) ** 2
    if convention == "unrenormalized":
        return abs(complex(np.vdot(s0.amplitudes, _decayed(s0, p)))) ** 2
    raise ParameterError(f"unknown convention {convention!r}")


def fidelity_closed_form(family: str, alpha: complex, p: DampingParams) -> float:
    """Analytic fidelity for one of the four qubit families.

    With ``alpha_d = alpha e^{-gamma t/2}`` and ``alpha_dd = alpha e^{-gamma t}``:

    * ``number1``: ``e^{-gamma t}``
    * ``coherent``: ``exp(-|alpha - alpha_d|^2)``
    * ``nsfs0``: ``|e^{-|alpha - alpha_d|^2/2} - e^{-(|alpha|^2 + |alpha_d|^2)/2}|^2
      / ((1 - e^{-|alpha|^2}) (1 - e^{-|alpha_d|^2}))``
    * ``spacs``: ``e^{|alpha - alpha_dd|^2/2} e^{(|alpha|^2 - |alpha_dd|^2)/2}
      e^{-|alpha - alpha_d|^2} e^{-(|alpha|^2 - |alpha_d|^2)}
      |1 + alpha* alpha_d|^2 / ((1 + |alpha|^2)(1 + alpha* alpha_dd))``
    """
    alpha = complex(alpha)
    gt = p.gamma * p.t
    a_d = alpha * p.decay
    a_dd = alpha * math.exp(-gt)
    x, x_d, x_dd = abs(alpha) ** 2, abs(a_d) ** 2, abs(a_dd) ** 2
    if family == "number1":
        return math.exp(-gt)
    if family == "coherent":
        return math.exp(-abs(alpha - a_d) ** 2)
    if family == "nsfs0":
        if x == 0.0:
            raise ParameterError("vacuum-filtered state needs |alpha| > 0")
        num = abs(math.exp(-0.5 * abs(alpha - a_d) ** 2) - math.exp(-0.5 * (x + x_d))) ** 2
        return num / (math.expm1(-x) * math.expm1(-x_d))
    if family == "spacs":
        expo = (0.5 * abs(alpha - a_dd) ** 2 + 0.5 * (x - x_dd)
                - abs(alpha - a_d) ** 2 - (x - x_d))
        ratio = abs(1 + alpha.conjugate() * a_d) ** 2 / ((1 + x) * (1 + alpha.conjugate() * a_dd))
        return float(math.exp(expo) * ratio.real)
    raise ParameterError(f"unknown family {family!r}; expected one of {FAMILIES}")
