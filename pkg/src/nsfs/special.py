"""Special functions used by the Fock-space numerics.

Everything here works in log space where factorials are involved so that
photon numbers well beyond 170 (where ``n!`` overflows a double) stay usable.
"""

import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "log_factorial",
    "gammainc_lower",
    "gammainc_upper",
    "lower_incomplete_gamma",
    "poisson_head",
    "poisson_tail",
    "laguerre",
    "hermite_functions",
]

_GAMMA_EPS = 1e-16
_GAMMA_MAXITER = 10_000
_TINY = 1e-300


class _LogFactorialTable:
    """Grow-only table of ``log(n!)``.

    The table is rebuilt (never mutated in place) when a larger ``n`` is
    requested, so concurrent readers always see a complete array.
    """

    def __init__(self, n_max=256):
        self._values = gammaln(np.arange(n_max + 1) + 1.0)

    def __call__(self, n):
        n = np.asarray(n)
        if np.any(n < 0):
            raise ValueError("log_factorial is defined for n >= 0 only")
        top = int(n.max()) if n.size else 0
        values = self._values
        if top >= values.size:
            values = gammaln(np.arange(max(top + 1, 2 * values.size)) + 1.0)
            self._values = values
        out = values[n]
        return float(out) if out.ndim == 0 else out


log_factorial = _LogFactorialTable()
log_factorial.__doc__ = "Natural log of ``n!`` for integer ``n >= 0`` (scalar or array)."


def _gamma_series(a, x):
    # P(a, x) by the power series, good for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_GAMMA_MAXITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_contfrac(a, x):
    # Q(a, x) by the modified Lentz continued fraction, good for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAXITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma fraction did not converge (a={a}, x={x})")
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def _gamma_pair(a, x):
    if a <= 0:
        raise ValueError("incomplete gamma requires a > 0")
    if x < 0:
        raise ValueError("incomplete gamma requires x >= 0")
    if x == 0:
        return 0.0, 1.0
    if x < a + 1.0:
        p = _gamma_series(a, x)
        return p, 1.0 - p
    q = _gamma_contfrac(a, x)
    return 1.0 - q, q


def gammainc_lower(a, x):
    """Regularized lower incomplete gamma ``P(a, x) = gamma(a, x) / Gamma(a)``.

    Series below ``x = a + 1``, continued fraction above; the small side of
    the ``P + Q = 1`` pair is always the directly computed one.
    """
    return _gamma_pair(float(a), float(x))[0]


def gammainc_upper(a, x):
    """Regularized upper incomplete gamma ``Q(a, x) = 1 - P(a, x)``."""
    return _gamma_pair(float(a), float(x))[1]


def lower_incomplete_gamma(n, x):
    """Unregularized ``gamma(n, x) = (n-1)! [1 - e^{-x} sum_{j<n} x^j / j!]``.

    Only meaningful for moderate ``n``; prefer the regularized forms.
    """
    return gammainc_lower(n, x) * math.gamma(n)


def poisson_head(j, x):
    """``sum_{n=0}^{j} e^{-x} x^n / n!`` (0 for ``j < 0``)."""
    if j < 0:
        return 0.0
    if x == 0:
        return 1.0
    return gammainc_upper(j + 1, x)


def poisson_tail(j, x):
    """``sum_{n>=j} e^{-x} x^n / n!`` (1 for ``j <= 0``)."""
    if j <= 0:
        return 1.0
    if x == 0:
        return 0.0
    return gammainc_lower(j, x)


def laguerre(n, k, x):
    """Associated Laguerre polynomial ``L_n^{(k)}(x)`` for ``k >= 0``.

    Uses the upward three-term recurrence in ``n``, which is stable for
    non-negative superscripts.

    Parameters
    ----------
    n : int
        degree, ``n >= 0``
    k : int or float
        superscript, ``k >= 0``
    x : float or numpy.ndarray
        evaluation points

    Returns
    -------
    float or numpy.ndarray
    """
    if n < 0 or k < 0:
        raise ValueError("laguerre requires n >= 0 and k >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def hermite_functions(n_max, x):
    """Normalized harmonic-oscillator eigenfunctions ``phi_0..phi_{n_max}``.

    Unit mass and frequency, hbar = 1. Built by the normalized recurrence
    ``phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}`` so no raw
    Hermite polynomial is ever formed.

    Returns
    -------
    numpy.ndarray
        shape ``(n_max + 1,) + x.shape``
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out
