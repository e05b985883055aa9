"""Synthetic citation histograms drawn from a known q-exponential law.

These are the oracle datasets for the fitter: deterministic ones evaluate
the model and round to integers, sampled ones draw continuous citation
counts from the normalized q-exponential density on [0, inf) by inverse
transform and floor them.
"""
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import qmath
from .errors import DomainError
from .histogram import CitationHistogram

BLOCK = 1 << 16


@dataclass(frozen=True)
class SyntheticSpec:
    q_true: float
    T_true: float
    anchor_value: int
    entity: str = "synthetic"
    anchor_c: int = 2
    c_max: int = 20000
    mode: str = "deterministic"
    n_samples: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 1.0 < self.q_true < 2.0:
            raise DomainError(f"q_true must lie in (1, 2), got {self.q_true}")
        if not self.T_true > 0:
            raise DomainError(f"T_true must be positive, got {self.T_true}")
        if self.anchor_value <= 0 or int(self.anchor_value) != self.anchor_value:
            raise DomainError("anchor_value must be a positive integer")
        if self.anchor_c < 1:
            raise DomainError("anchor_c must be >= 1")
        if self.c_max <= self.anchor_c + 10:
            raise DomainError("c_max must exceed anchor_c + 10")
        if self.mode not in ("deterministic", "sampled"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.n_samples <= 0:
            raise DomainError("sampled mode needs n_samples > 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def model_counts(spec):
    """Unrounded model counts ``{c: N(c)}`` for c = anchor_c..c_max."""
    c = np.arange(spec.anchor_c, spec.c_max + 1)
    n = spec.anchor_value * qmath.q_exp(-(c - spec.anchor_c) / spec.T_true, spec.q_true)
    return dict(zip(c.tolist(), np.atleast_1d(n).tolist()))


def generate_deterministic(spec):
    exact = model_counts(spec)
    # round half up; numpy's round-half-even would make N(c) = k + 0.5 depend on parity
    counts = {c: int(math.floor(n + 0.5)) for c, n in exact.items()}
    counts = {c: n for c, n in counts.items() if n > 0}
    return CitationHistogram(spec.entity, counts, source_note="synthetic " + spec.to_json())


def sample_citation(u, q, T):
    """Quantile function of the normalized q-exponential density on [0, inf).

    Inverts ``F(c) = 1 - [1 + (q-1) c/T]^(-(2-q)/(q-1))``.
    """
    if not 1.0 < q < 2.0:
        raise DomainError(f"sampling needs 1 < q < 2, got {q}")
    if not T > 0:
        raise DomainError("T must be positive")
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if np.isnan(u).any() or (u <= 0).any() or (u >= 1).any():
        raise DomainError("u must lie in the open interval (0, 1)")
    c = T / (q - 1.0) * np.expm1(-(q - 1.0) / (2.0 - q) * np.log1p(-u))
    return float(c) if scalar else c


def cdf(c, q, T):
    """Analytic CDF matching :func:`sample_citation`."""
    c = np.asarray(c, dtype=float)
    return -np.expm1(-(2.0 - q) / (q - 1.0) * np.log1p((q - 1.0) * np.maximum(c, 0.0) / T))


def density(c, q, T):
    """Normalized density ``(2-q)/T * exp_q(-c/T)`` on [0, inf)."""
    return (2.0 - q) / T * qmath.q_exp(-np.asarray(c, dtype=float) / T, q)


def uniforms(seed, n):
    """``n`` uniforms in (0, 1), reproducible from ``seed``.

    Draws come in fixed blocks from a counter-based generator keyed by
    (seed, block index), so any block can be produced independently.
    """
    out = np.empty(n)
    for start in range(0, n, BLOCK):
        stop = min(start + BLOCK, n)
        out[start:stop] = _block(seed, start // BLOCK)[: stop - start]
    return out


def _block(seed, index):
    rng = np.random.Generator(np.random.Philox(key=[seed, index]))
    k = rng.integers(0, 1 << 52, size=BLOCK, dtype=np.uint64)
    return (k.astype(float) + 0.5) / float(1 << 52)


def sample_continuous(spec):
    """Raw continuous draws (before shifting and flooring)."""
    return sample_citation(uniforms(spec.seed, spec.n_samples), spec.q_true, spec.T_true)


def generate_sampled(spec):
    if spec.mode != "sampled":
        raise DomainError("generate_sampled needs mode='sampled'")
    c = np.floor(sample_continuous(spec) + spec.anchor_c).astype(np.int64)
    values, counts = np.unique(c, return_counts=True)
    return CitationHistogram(
        spec.entity, dict(zip(values.tolist(), counts.tolist())), source_note="synthetic " + spec.to_json()
    )


def generate(spec):
    if spec.mode == "sampled":
        return generate_sampled(spec)
    return generate_deterministic(spec)
