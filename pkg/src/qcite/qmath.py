"""q-exponential, q-logarithm and Tsallis entropy.

All functions accept scalars or numpy arrays and return the same shape.
Near q = 1 they switch to the ordinary exp/log, and elsewhere they are
evaluated through ``log1p``/``expm1`` so that precision holds as q -> 1.
"""
import math

import numpy as np

from .errors import DomainError

Q_LIMIT_EPS = 1e-9


def _check_q(q):
    q = float(q)
    if not math.isfinite(q):
        raise DomainError(f"entropic index must be finite, got {q!r}")
    return q


def _as_float_array(x, name):
    arr = np.asarray(x, dtype=float)
    if np.isnan(arr).any():
        raise DomainError(f"{name} contains NaN")
    return arr


def _out(arr, scalar):
    return float(arr) if scalar else arr


def q_exp(x, q):
    """Tsallis q-exponential ``[1 + (1-q) x]^(1/(1-q))``.

    For q < 1 the cutoff convention applies (0 where the base is not
    positive). For q > 1 a non-positive base raises DomainError.
    """
    q = _check_q(q)
    scalar = np.ndim(x) == 0
    x = _as_float_array(x, "x")
    if abs(q - 1.0) < Q_LIMIT_EPS:
        return _out(np.exp(x), scalar)
    a = 1.0 - q
    base = 1.0 + a * x
    if q > 1.0:
        if (base <= 0).any():
            raise DomainError(
                f"q_exp undefined for q={q} where 1 + (1-q)x <= 0 (x >= {1.0 / (q - 1.0)})"
            )
        return _out(np.exp(np.log1p(a * x) / a), scalar)
    ok = base > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp(np.log1p(np.where(ok, a * x, 0.0)) / a)
    return _out(np.where(ok, val, 0.0), scalar)


def q_log(y, q):
    """q-logarithm ``(y^(1-q) - 1) / (1-q)``, the inverse of :func:`q_exp`."""
    q = _check_q(q)
    scalar = np.ndim(y) == 0
    y = _as_float_array(y, "y")
    if (y <= 0).any():
        raise DomainError("q_log requires y > 0")
    if abs(q - 1.0) < Q_LIMIT_EPS:
        return _out(np.log(y), scalar)
    a = 1.0 - q
    return _out(np.expm1(a * np.log(y)) / a, scalar)


def _check_probabilities(p):
    p = _as_float_array(p, "p").ravel()
    if p.size < 1:
        raise DomainError("probability vector must have at least one entry")
    if (p < 0).any():
        raise DomainError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-12:
        raise DomainError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def tsallis_entropy(p, q, k=1.0):
    """Tsallis entropy ``k (1 - sum p_i^q) / (q - 1)`` of a probability vector.

    Zero entries are skipped (0^q = 0 for q > 0); at q = 1 this is the
    Boltzmann-Gibbs-Shannon entropy with 0 ln 0 = 0.
    """
    q = _check_q(q)
    if k <= 0:
        raise DomainError("k must be positive")
    p = _check_probabilities(p)
    nz = p[p > 0]
    if abs(q - 1.0) < Q_LIMIT_EPS:
        return float(-k * np.sum(nz * np.log(nz)))
    if q <= 0 and nz.size < p.size:
        raise DomainError("q <= 0 is undefined for vectors with zero entries")
    return float(k * (1.0 - np.sum(nz**q)) / (q - 1.0))


def entropy_composition(sa, sb, q, k=1.0):
    """Joint entropy of two independent systems with entropies ``sa`` and ``sb``."""
    q = _check_q(q)
    if k <= 0:
        raise DomainError("k must be positive")
    a, b = sa / k, sb / k
    return k * (a + b + (1.0 - q) * a * b)


def max_entropy(W, q, k=1.0):
    """Entropy of the equiprobable distribution over W states (the extremum)."""
    q = _check_q(q)
    if abs(q - 1.0) < Q_LIMIT_EPS:
        return k * math.log(W)
    return k * q_log(float(W), q)
