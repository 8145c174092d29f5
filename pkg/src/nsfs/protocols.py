"""Atom-cavity protocols that prepare filtered coherent states and cat states.

The joint state of a three-level atom (levels ``f``, ``e``, ``g``, highest
first) and one cavity mode is an :class:`AtomFieldState`: one unnormalized
field vector per atomic level, all at a common cutoff.

Filtered-state generation runs four analytic stages: an ``m``-photon Rabi
exchange ``f <-> g``, a driven dispersive evolution that displaces the
``f`` branch, a Ramsey pulse mixing ``f`` and ``g``, and post-selection on
``f``. The dense-matrix oracles (:func:`multi_photon_oracle`,
:func:`dispersive_oracle`) evolve the same Hamiltonians numerically.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, NamedTuple

import numpy as np
from scipy.linalg import eigh, expm
from scipy.optimize import brentq

from .errors import NormalizationError, ParameterError
from .fock import (
    Coherent,
    FockVector,
    choose_cutoff,
    filter_coefficient,
    free_evolution,
    make_coherent,
    make_nsfs,
)
from .special import log_factorial

__all__ = [
    "LEVELS",
    "AtomFieldState",
    "GenerationConfig",
    "RAMSEY_FG",
    "RAMSEY_EG",
    "multi_photon_stage",
    "multi_photon_oracle",
    "dispersive_stage",
    "dispersive_oracle",
    "ramsey_pulse",
    "postselect",
    "generate_nsfs",
    "solve_generation_config",
    "CatResult",
    "cat_protocol",
]

LEVELS = ("f", "e", "g")

# rows: new (first, second) level, columns: old (first, second) level
RAMSEY_FG = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)  # f->(f+g)/r2, g->(f-g)/r2
RAMSEY_EG = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2.0)  # e->(e+g)/r2, g->(g-e)/r2


@dataclass(frozen=True, eq=False)
class AtomFieldState:
    """Atom-field pure state as a mapping level -> field amplitudes."""

    branches: Dict[str, np.ndarray]

    def __post_init__(self):
        sizes = {np.asarray(v).size for v in self.branches.values()}
        if len(sizes) != 1:
            raise ParameterError("all branches must share one cutoff")
        if not set(self.branches) <= set(LEVELS):
            raise ParameterError(f"atomic levels must be among {LEVELS}")
        size = sizes.pop()
        full = {}
        for lvl in LEVELS:
            amps = np.array(self.branches.get(lvl, np.zeros(size)), dtype=complex)
            amps.setflags(write=False)
            full[lvl] = amps
        object.__setattr__(self, "branches", full)

    @classmethod
    def product(cls, level: str, field_state: FockVector) -> "AtomFieldState":
        return cls({level: field_state.amplitudes})

    @property
    def cutoff(self) -> int:
        return self.branches["f"].size - 1

    def branch(self, level: str) -> FockVector:
        return FockVector(self.branches[level])

    def branch_norms(self) -> Dict[str, float]:
        return {lvl: float(np.linalg.norm(v)) for lvl, v in self.branches.items()}

    @property
    def norm(self) -> float:
        return math.sqrt(sum(n * n for n in self.branch_norms().values()))


@dataclass(frozen=True)
class GenerationConfig:
    """Parameters of the filtered-state generation protocol.

    ``lam`` is the drive-to-coupling ratio and may be negative (drive phase
    pi); all rates and durations are non-negative.
    """

    m: int
    g: float = 1.0
    phi: float = 0.0
    t1: float = 0.0
    lam: float = 0.0
    chi: float = 1.0
    t2: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError("multi-photon order m must be a positive integer")
        for name in ("g", "t1", "chi", "t2"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")

    @property
    def rabi_angle(self) -> float:
        """``sqrt(m!) g t1``."""
        return math.exp(0.5 * log_factorial(self.m)) * self.g * self.t1

    @property
    def displacement(self) -> complex:
        """Coherent amplitude ``-lam (1 - e^{i chi t2})`` left on the ``f`` branch."""
        return -self.lam * (1.0 - np.exp(1j * self.chi * self.t2))


def _field_cutoff(cfg):
    return max(choose_cutoff(Coherent(2.0 * abs(cfg.lam))), cfg.m + 10)


def multi_photon_stage(cfg: GenerationConfig, cutoff: int = None) -> AtomFieldState:
    """Evolve ``|0, f>`` under the ``m``-photon exchange Hamiltonian for ``t1``.

    Result: ``cos(w)|0,f> - i e^{i phi} sin(w)|m,g>`` with ``w = sqrt(m!) g t1``.
    """
    cutoff = _field_cutoff(cfg) if cutoff is None else cutoff
    if cutoff < cfg.m:
        raise ParameterError("cutoff must accommodate m photons")
    w = cfg.rabi_angle
    f = np.zeros(cutoff + 1, dtype=complex)
    g = np.zeros(cutoff + 1, dtype=complex)
    f[0] = math.cos(w)
    g[cfg.m] = -1j * np.exp(1j * cfg.phi) * math.sin(w)
    return AtomFieldState({"f": f, "g": g})


def _ladder(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)


def multi_photon_oracle(cfg: GenerationConfig, cutoff: int = None) -> AtomFieldState:
    """Dense ``expm`` of ``g (e^{i phi} a^dag^m |g><f| + h.c.)`` applied to ``|0, f>``."""
    cutoff = _field_cutoff(cfg) if cutoff is None else cutoff
    dim = cutoff + 1
    am = np.linalg.matrix_power(_ladder(cutoff), cfg.m)
    # ordering (f block, g block)
    h = np.zeros((2 * dim, 2 * dim), dtype=complex)
    h[dim:, :dim] = cfg.g * np.exp(1j * cfg.phi) * am.conj().T
    h[:dim, dim:] = cfg.g * np.exp(-1j * cfg.phi) * am
    psi0 = np.zeros(2 * dim, dtype=complex)
    psi0[0] = 1.0
    psi = expm(-1j * cfg.t1 * h) @ psi0
    return AtomFieldState({"f": psi[:dim], "g": psi[dim:]})


def dispersive_stage(state: AtomFieldState, cfg: GenerationConfig,
                     convention: str = "printed") -> AtomFieldState:
    """Driven dispersive evolution of the ``f`` branch for ``t2``; ``g`` idles.

    The ``f`` branch must hold the vacuum (as left by the exchange stage).
    ``convention="printed"`` maps ``|0> -> e^{i lam^2 sin^2(chi t2)}
    |-lam (1 - e^{i chi t2})>``. ``convention="exact"`` uses the closed form
    of ``exp(-i t2 H_eff)``: ``e^{-i chi t2} e^{-i lam^2 sin(chi t2)}
    |-lam (1 - e^{-i chi t2})>``, which agrees with :func:`dispersive_oracle`.
    Both coincide up to a branch phase when ``chi t2`` is a multiple of pi.
    """
    f = state.branches["f"]
    if np.any(np.abs(f[1:]) > 1e-14):
        raise ParameterError("dispersive stage expects the f branch in the vacuum")
    theta = cfg.chi * cfg.t2
    lam = cfg.lam
    if convention == "printed":
        amp = -lam * (1.0 - np.exp(1j * theta))
        phase = np.exp(1j * lam * lam * math.sin(theta) ** 2)
    elif convention == "exact":
        amp = -lam * (1.0 - np.exp(-1j * theta))
        phase = np.exp(-1j * theta - 1j * lam * lam * math.sin(theta))
    else:
        raise ParameterError(f"unknown convention {convention!r}")
    coh = make_coherent(amp, state.cutoff).amplitudes
    return AtomFieldState({"f": f[0] * phase * coh, "e": state.branches["e"],
                           "g": state.branches["g"]})


def dispersive_oracle(state: AtomFieldState, cfg: GenerationConfig) -> AtomFieldState:
    """Evolve under ``chi [|f><f| + (n + lam (a + a^dag) + lam^2) sigma_z]`` numerically.

    ``sigma_z = |f><f| - |e><e|``; the field Hamiltonian of each branch is
    diagonalized exactly (Hermitian eigendecomposition).
    """
    cutoff = state.cutoff
    a = _ladder(cutoff)
    num = np.diag(np.arange(cutoff + 1)).astype(complex)
    core = num + cfg.lam * (a + a.conj().T) + cfg.lam**2 * np.eye(cutoff + 1)
    out = {}
    for lvl, h in (("f", np.eye(cutoff + 1) + core), ("e", -core)):
        w, v = eigh(cfg.chi * h)
        out[lvl] = v @ (np.exp(-1j * cfg.t2 * w) * (v.conj().T @ state.branches[lvl]))
    out["g"] = state.branches["g"]
    return AtomFieldState(out)


def ramsey_pulse(state: AtomFieldState, matrix=RAMSEY_FG, levels=("f", "g")) -> AtomFieldState:
    """Mix two atomic levels with a unitary 2x2 ``matrix``.

    ``matrix[i, j]`` is the amplitude of new level ``levels[i]`` arising from
    old level ``levels[j]``.
    """
    u = np.asarray(matrix, dtype=complex)
    if u.shape != (2, 2) or np.abs(u.conj().T @ u - np.eye(2)).max() > 1e-12:
        raise ParameterError("Ramsey mapping must be a unitary 2x2 matrix")
    lo, hi = levels
    x, y = state.branches[lo], state.branches[hi]
    out = dict(state.branches)
    out[lo] = u[0, 0] * x + u[0, 1] * y
    out[hi] = u[1, 0] * x + u[1, 1] * y
    return AtomFieldState(out)


def postselect(state: AtomFieldState, level: str):
    """Project the atom onto ``level``; return ``(field state, probability)``."""
    if level not in LEVELS:
        raise ParameterError(f"unknown level {level!r}")
    amps = state.branches[level]
    norm = float(np.linalg.norm(amps))
    if norm * norm <= 1e-14:
        raise NormalizationError(f"branch {level!r} has negligible weight {norm * norm:.3e}")
    return FockVector(amps / norm), norm * norm / state.norm**2


def generate_nsfs(cfg: GenerationConfig, cutoff: int = None, convention: str = "printed",
                  trace: list = None):
    """Run exchange, dispersive, Ramsey and post-selection on ``f``.

    Returns ``(field state, probability)``. When ``trace`` is a list, the
    ``(stage, level, branch norm)`` of every stage is appended to it.
    """
    stages = []
    state = multi_photon_stage(cfg, cutoff)
    stages.append(("multi_photon", state))
    state = dispersive_stage(state, cfg, convention)
    stages.append(("dispersive", state))
    state = ramsey_pulse(state)
    stages.append(("ramsey", state))
    if trace is not None:
        for name, st in stages:
            for lvl, nrm in st.branch_norms().items():
                trace.append((name, lvl, nrm))
    return postselect(state, "f")


def solve_generation_config(alpha: complex, m: int, g: float = 1.0, chi: float = 1.0,
                            convention: str = "printed") -> GenerationConfig:
    """Pick ``(t1, phi, lam, t2)`` so that ``f``-selection yields ``psi(alpha, m)``.

    ``chi t2`` is fixed to ``pi`` (where both dispersive conventions share
    the displacement ``-2 lam``), ``lam = -alpha / 2`` for real ``alpha``.
    The post-Ramsey ``f`` branch is ``b|alpha> - c|m>`` up to normalization;
    ``t1`` is found by bracketing ``tan(sqrt(m!) g t1) = |C_m|`` and ``phi``
    aligns the phase of ``c/b`` with ``C_m``.
    """
    alpha = complex(alpha)
    if abs(alpha.imag) > 1e-15:
        raise ParameterError("solver supports real alpha (lam is a real drive ratio)")
    if g <= 0 or chi <= 0:
        raise ParameterError("g and chi must be positive")
    c_m = filter_coefficient(alpha, m)
    rabi = math.exp(0.5 * log_factorial(m)) * g
    target = abs(c_m)
    t1 = brentq(lambda t: math.tan(rabi * t) - target, 0.0, (math.pi / 2 - 1e-12) / rabi,
                xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    base = GenerationConfig(m=m, g=g, phi=0.0, t1=t1, lam=-alpha.real / 2, chi=chi,
                            t2=math.pi / chi)
    # phase the dispersive stage imprints on the f branch
    probe = dispersive_stage(multi_photon_stage(replace(base, t1=0.0)), base, convention)
    ref = make_coherent(base.displacement, probe.cutoff).amplitudes
    f_phase = np.angle(np.vdot(ref, probe.branches["f"]))
    # c/b = i e^{i phi} tan(w) e^{-i f_phase} must equal C_m
    phi = (np.angle(c_m) if target else 0.0) + f_phase - math.pi / 2
    return replace(base, phi=float(np.mod(phi, 2 * math.pi)))


class CatResult(NamedTuple):
    state: FockVector
    probability: float
    is_cat: bool


def cat_protocol(alpha: complex, m: int, select: str, cutoff: int = None,
                 chi_t: float = math.pi) -> CatResult:
    """Turn ``psi(alpha, m)`` into an even or odd coherent state.

    ``(|e> + |g>)/sqrt(2) psi(alpha, m)`` evolves under ``-chi n |e><e|`` for
    ``t = chi_t / chi``, then the Ramsey pulse ``e -> (e+g)/sqrt(2)``,
    ``g -> (g-e)/sqrt(2)`` and post-selection on ``select``. At ``chi_t = pi``
    even ``m`` with ``e`` gives the odd cat and odd ``m`` with ``g`` the even
    cat; other pairings return the selected branch with ``is_cat=False``.
    """
    if select not in ("e", "g"):
        raise ParameterError("select must be 'e' or 'g'")
    psi = make_nsfs(alpha, m, cutoff)
    half = psi.amplitudes / math.sqrt(2.0)
    rotated = free_evolution(FockVector(half), -chi_t).amplitudes  # e^{+i chi t n}
    state = AtomFieldState({"e": rotated, "g": half})
    state = ramsey_pulse(state, RAMSEY_EG, ("e", "g"))
    field_state, prob = postselect(state, select)
    is_cat = math.isclose(chi_t % (2 * math.pi), math.pi) and (
        (m % 2 == 0 and select == "e") or (m % 2 == 1 and select == "g"))
    if not is_cat:
        warnings.warn(f"m={m} with selection {select!r} does not project onto a cat state",
                      stacklevel=2)
    return CatResult(field_state, prob, is_cat)
