"""Wigner function via displaced number states, grids and negativity volume.

Convention: ``W(beta) = (2/pi) sum_n (-1)^n |<n|D(-beta)|psi>|^2`` so that
``integral W d^2 beta = 1`` with ``d^2 beta = dRe(beta) dIm(beta)``.

Two independent evaluation routes are provided. :func:`wigner_point` sums
the displaced parity series with an adaptive number of terms, one point at a
time. :func:`wigner_grid` evaluates ``(2/pi) <psi|D(2 beta) P|psi>`` through
Laguerre sums vectorized over the whole grid.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParameterError, TruncationError
from .fock import FockVector, filter_coefficient, nsfs_norm_sq
from .special import laguerre, log_factorial

__all__ = [
    "SERIES_TOL",
    "WignerGrid",
    "NegativityReport",
    "displaced_number_element",
    "displacement_matrix",
    "wigner_point",
    "wigner_point_nsfs",
    "wigner_grid",
    "negativity_volume",
    "default_half_width",
]

SERIES_TOL = 1e-12
_MAX_SERIES_TERMS = 4000


def displaced_number_element(m: int, n: int, beta: complex) -> complex:
    """``<m|D(beta)|n>``.

    For ``m >= n``: ``sqrt(n!/m!) e^{-|b|^2/2} b^{m-n} L_n^{(m-n)}(|b|^2)``; the
    ``m < n`` branch is obtained by swapping indices and replacing ``b`` with
    ``-conj(b)`` so only non-negative Laguerre superscripts are ever needed.
    """
    if m < 0 or n < 0:
        raise ParameterError("photon numbers must be non-negative")
    beta = complex(beta)
    if m < n:
        m, n = n, m
        beta = -beta.conjugate()
    x = abs(beta) ** 2
    d = m - n
    if x == 0.0:
        return complex(d == 0)
    logpref = 0.5 * (log_factorial(n) - log_factorial(m)) - 0.5 * x + d * 0.5 * math.log(x)
    return complex(math.exp(logpref) * np.exp(1j * d * np.angle(beta)) * laguerre(n, d, x))


def _laguerre_columns(n_max, k, x):
    # all degrees 0..n_max of L_n^{(k)}(x) for scalar x
    out = np.empty(n_max + 1)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + k - x
    for j in range(1, n_max):
        out[j + 1] = ((2 * j + 1 + k - x) * out[j] - (j + k) * out[j - 1]) / (j + 1)
    return out


def displacement_matrix(beta: complex, rows: int, cols: int) -> np.ndarray:
    """Matrix of ``<m|D(beta)|n>`` for ``m < rows``, ``n < cols``.

    Exact elements (no truncation of the operator itself), built diagonal by
    diagonal from Laguerre recurrences in ``O(rows * cols)``.
    """
    beta = complex(beta)
    out = np.zeros((rows, cols), dtype=complex)
    x = abs(beta) ** 2
    if x == 0.0:
        k = min(rows, cols)
        out[np.arange(k), np.arange(k)] = 1.0
        return out
    logx = math.log(x)
    for d in range(rows):
        # lower diagonal m = n + d, n < min(cols, rows - d)
        count = min(cols, rows - d)
        if count <= 0:
            break
        n = np.arange(count)
        lag = _laguerre_columns(count - 1, d, x)
        logpref = 0.5 * (log_factorial(n) - log_factorial(n + d)) - 0.5 * x + 0.5 * d * logx
        out[n + d, n] = np.exp(logpref) * lag * np.exp(1j * d * np.angle(beta))
    mbeta = -beta.conjugate()
    for d in range(1, cols):
        # upper diagonal n = m + d, m < min(rows, cols - d)
        count = min(rows, cols - d)
        if count <= 0:
            break
        m = np.arange(count)
        lag = _laguerre_columns(count - 1, d, x)
        logpref = 0.5 * (log_factorial(m) - log_factorial(m + d)) - 0.5 * x + 0.5 * d * logx
        out[m, m + d] = np.exp(logpref) * lag * np.exp(1j * d * np.angle(mbeta))
    return out


def _series_rows(cutoff, beta):
    r = math.sqrt(cutoff) + abs(beta)
    return math.ceil(r * r + 12.0 * (r + 1.0)) + 10


def _parity_sum(vec):
    signs = np.where(np.arange(vec.size) % 2 == 0, 1.0, -1.0)
    return float(signs @ (np.abs(vec) ** 2))


def wigner_point(s: FockVector, beta: complex, tol: float = SERIES_TOL) -> float:
    """Wigner function of ``s`` at one phase-space point.

    Sums the displaced parity series until the neglected part of the
    displaced state's norm is below ``tol``.
    """
    norm_sq = s.norm ** 2
    rows = _series_rows(s.cutoff, beta)
    while True:
        vec = displacement_matrix(-complex(beta), rows, s.cutoff + 1) @ s.amplitudes
        tail = norm_sq - float(np.sum(np.abs(vec) ** 2))
        if tail < tol * norm_sq:
            return 2.0 / math.pi * _parity_sum(vec) / norm_sq
        if rows >= _MAX_SERIES_TERMS:
            raise TruncationError(
                f"displaced parity series not converged at beta={beta}: tail {tail:.3e}")
        rows = min(2 * rows, _MAX_SERIES_TERMS)


def wigner_point_nsfs(alpha: complex, m: int, beta: complex, tol: float = SERIES_TOL) -> float:
    """Wigner function of ``psi(alpha, m)`` from its two-term displaced form.

    ``<n|D(-b)|psi> = [e^{i Im(b a*)} <n|a - b> - C_m conj(<m|D(b)|n>)] / N_m``,
    using ``D(-b)|a> = e^{i Im(b a*)} |a - b>`` up to the sign convention of
    the exponent, which is fixed by ``D(-b) D(a) = e^{(-b a* + b* a)/2} D(a-b)``.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    norm_sq = nsfs_norm_sq(alpha, m)
    c_m = filter_coefficient(alpha, m)
    phase = np.exp(0.5 * (-beta * alpha.conjugate() + beta.conjugate() * alpha))
    shifted = alpha - beta
    rows = _series_rows(m, shifted) + _series_rows(m, beta)
    while True:
        n = np.arange(rows)
        if shifted == 0:
            coh = (n == 0).astype(complex)
        else:
            coh = np.exp(-0.5 * abs(shifted) ** 2 + n * np.log(abs(shifted)) - 0.5 * log_factorial(n))
            coh = coh * np.exp(1j * n * np.angle(shifted))
        dcol = displacement_matrix(beta, m + 1, rows)[m].conj()
        vec = (phase * coh - c_m * dcol) / math.sqrt(norm_sq)
        tail = 1.0 - float(np.sum(np.abs(vec) ** 2))
        if tail < tol:
            return 2.0 / math.pi * _parity_sum(vec)
        if rows >= _MAX_SERIES_TERMS:
            raise TruncationError(f"NSFS parity series not converged at beta={beta}")
        rows = min(2 * rows, _MAX_SERIES_TERMS)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Wigner values at cell centres of a uniform square grid.

    ``values[i, j]`` is ``W(re[j] + 1j * im[i])``. ``state`` is kept so the
    grid can be refined for convergence checks.
    """

    values: np.ndarray
    re: np.ndarray
    im: np.ndarray
    step: float
    state: Optional[FockVector] = field(default=None, repr=False)

    @property
    def re_range(self):
        return (float(self.re[0] - self.step / 2), float(self.re[-1] + self.step / 2))

    @property
    def im_range(self):
        return (float(self.im[0] - self.step / 2), float(self.im[-1] + self.step / 2))

    @property
    def half_width(self) -> float:
        return self.re_range[1]

    def integral(self) -> float:
        return float(self.values.sum() * self.step**2)

    def rows(self):
        """Yield ``(Re beta, Im beta, W)`` triples, real part varying fastest."""
        for i, y in enumerate(self.im):
            for j, x in enumerate(self.re):
                yield float(x), float(y), float(self.values[i, j])


def default_half_width(alpha: complex, m: int) -> float:
    return abs(alpha) + math.sqrt(m) + 4.0


def _axis(half_width, step):
    count = max(1, math.ceil(round(2.0 * half_width / step, 9)))
    return (np.arange(count) - (count - 1) / 2.0) * step


def _wigner_values(amps, beta, chunk=40_000):
    """``(2/pi) <psi|D(2 beta) P|psi>`` at every point of the array ``beta``."""
    nz = np.nonzero(np.abs(amps) > 1e-17)[0]
    lo, hi = (int(nz[0]), int(nz[-1])) if nz.size else (0, 0)
    psi = amps[: hi + 1]
    sign = np.where(np.arange(hi + 1) % 2 == 0, 1.0, -1.0)
    lf = log_factorial(np.arange(hi + 1))
    flat = beta.ravel()
    out = np.empty(flat.size)
    for start in range(0, flat.size, chunk):
        b2 = 2.0 * flat[start:start + chunk]
        y = np.abs(b2) ** 2
        total = np.zeros(b2.size, dtype=complex)
        damp = np.exp(-0.5 * y)
        b2pow = np.ones_like(b2)
        for d in range(0, hi - lo + 1):
            # coefficient of L_n^{(d)} for pairs (n + d, n)
            n = np.arange(lo, hi - d + 1)
            coef = sign[n] * psi[n + d].conj() * psi[n] * np.exp(0.5 * (lf[n] - lf[n + d]))
            if d:
                coef = 2.0 * coef
            acc = np.zeros(b2.size, dtype=complex)
            # damped Laguerre values e^{-y/2} L_j^{(d)}(y) by upward recurrence
            prev = damp
            cur = (1.0 + d - y) * damp
            if lo == 0:
                acc += coef[0] * prev
            for j in range(1, n[-1] + 1):
                if j >= lo:
                    acc += coef[j - lo] * cur
                prev, cur = cur, ((2 * j + 1 + d - y) * cur - (j + d) * prev) / (j + 1)
            total += acc * b2pow
            b2pow = b2pow * b2
        out[start:start + b2.size] = 2.0 / math.pi * total.real
    return out.reshape(beta.shape)


def wigner_grid(s: FockVector, half_width: float = None, step: float = 0.05) -> WignerGrid:
    """Sample the Wigner function of ``s`` on a centred square grid.

    Cells have edge ``step``; values are taken at cell centres so that
    ``values.sum() * step**2`` is the midpoint-rule integral.
    """
    if step <= 0:
        raise ParameterError("grid step must be positive")
    if half_width is None:
        mean = float(np.arange(s.cutoff + 1) @ s.probabilities())
        half_width = math.sqrt(mean) + 5.0
    if half_width <= 0:
        raise ParameterError("half_width must be positive")
    axis = _axis(half_width, step)
    beta = axis[None, :] + 1j * axis[:, None]
    amps = s.amplitudes / s.norm
    return WignerGrid(_wigner_values(amps, beta), axis, axis.copy(), float(step), s)


@dataclass(frozen=True)
class NegativityReport:
    negative_volume: float
    grid_step: float
    converged: bool


def _negative_part(grid):
    return float(np.clip(-grid.values, 0.0, None).sum() * grid.step**2)


def negativity_volume(g: WignerGrid, max_refinements: int = 1,
                      tol: float = 1e-3) -> NegativityReport:
    """Integral of ``max(-W, 0)`` over the grid by the midpoint rule.

    The grid is re-evaluated at half the step (up to ``max_refinements``
    times); ``converged`` is set once successive values differ by less than
    ``tol``. Without a refinement budget, or without a state attached to the
    grid, the flag stays ``False``.
    """
    value = _negative_part(g)
    grid = g
    for _ in range(max_refinements):
        if grid.state is None:
            break
        finer = wigner_grid(grid.state, g.half_width, grid.step / 2)
        finer_value = _negative_part(finer)
        done = abs(finer_value - value) < tol
        value, grid = finer_value, finer
        if done:
            return NegativityReport(value, grid.step, True)
    return NegativityReport(value, grid.step, False)
