"""Two-stage q-exponential fit of citation histograms.

The model is ``N(c) = N(a) * exp_q(-(c - a)/T)`` anchored at the observed
count of the anchor bin ``a`` (two citations by default). Stage 1 scans a
grid of q and, for each, optimizes T on the early decades of c; stage 2
refits T over the full range with the winning q. Residuals are taken on
log counts.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import qmath
from .config import FitConfig
from .errors import ConvergenceError, DomainError, InsufficientDataError
from .histogram import fit_view

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
T_MIN = 1e-6

RESULT_COLUMNS = ["entity", "q", "T", "r2", "anchor_c", "anchor_value", "n_points_q", "n_points_T"]


@dataclass(frozen=True)
class FitResult:
    entity: str
    q: float
    T: float
    r2: float
    anchor_c: int = 2
    anchor_value: int | None = None
    n_points_q: int | None = None
    n_points_T: int | None = None
    sse: float | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"{self.entity}: T must be positive, got {self.T}")
        if not 1.0 < self.q < 2.0:
            raise ValueError(f"{self.entity}: q must lie in (1, 2), got {self.q}")
        if not 0.0 <= self.r2 <= 1.0:
            raise ValueError(f"{self.entity}: r2 must lie in [0, 1], got {self.r2}")

    def to_dict(self):
        return asdict(self)

    def csv_row(self):
        """Row in the results CSV; q and T at reporting precision."""
        def opt(v):
            return "" if v is None else str(v)

        return [
            self.entity,
            f"{self.q:.3f}",
            f"{self.T:.2f}",
            f"{self.r2:.4f}",
            str(self.anchor_c),
            opt(self.anchor_value),
            opt(self.n_points_q),
            opt(self.n_points_T),
        ]


def model_eval(c, q, T, anchor_c, anchor_value):
    """Model count at citation count(s) ``c``."""
    if T <= 0:
        raise DomainError("T must be positive")
    if anchor_value <= 0:
        raise DomainError("anchor_value must be positive")
    x = -(np.asarray(c, dtype=float) - anchor_c) / T
    return anchor_value * qmath.q_exp(x, q)


def _log_model(c, q, T, anchor_c, log_anchor):
    # ln exp_q(-x/T) for q > 1 and x >= 0, vectorized without domain checks
    x = (c - anchor_c) / T
    return log_anchor - np.log1p((q - 1.0) * x) / (q - 1.0)


def _sse(c, logn, q, T, anchor_c, log_anchor):
    r = logn - _log_model(c, q, T, anchor_c, log_anchor)
    return float(np.dot(r, r))


def _golden_min_T(c, logn, q, anchor_c, log_anchor, t_max, rtol):
    """Minimize the log-space SSE over T by golden-section search on ln T.

    Searching ln T makes the stopping rule a relative tolerance on T.
    Raises ConvergenceError if the minimum sits on the bracket boundary.
    """
    lo, hi = math.log(T_MIN), math.log(t_max)
    f = lambda u: _sse(c, logn, q, math.exp(u), anchor_c, log_anchor)  # noqa: E731
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    tol = math.log1p(rtol)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
    u = 0.5 * (lo + hi)
    T = math.exp(u)
    edge = 4 * tol
    if u - math.log(T_MIN) < edge or math.log(t_max) - u < edge:
        raise ConvergenceError(
            f"T search hit the bracket boundary at T={T:.6g} (q={q})",
            diagnostics={"q": q, "T": T, "T_min": T_MIN, "T_max": t_max, "sse": f(u)},
        )
    return T, f(u)


def _points(h, cfg):
    pts = np.asarray(fit_view(h, cfg), dtype=float)
    c, n = pts[:, 0], pts[:, 1]
    anchor_value = h[cfg.anchor_c]
    if anchor_value <= 0:
        raise InsufficientDataError(f"{h.entity}: no papers at anchor c={cfg.anchor_c}")
    return c, np.log(n), int(anchor_value)


def r_squared(h, q, T, cfg=None):
    """Coefficient of determination of ln N(c) against the log model.

    Uses every fit-view point and, if configured, the extrapolated c = 1
    point. Clipped to [0, 1].
    """
    cfg = cfg or FitConfig()
    c, logn, anchor_value = _points(h, cfg)
    c1 = 1
    if cfg.include_c1_in_r2 and c1 < cfg.anchor_c and h[c1] > 0:
        if 1.0 + (q - 1.0) * (c1 - cfg.anchor_c) / T <= 0:
            raise DomainError(f"model undefined at c=1 for q={q}, T={T}")
        c = np.concatenate(([c1], c))
        logn = np.concatenate(([math.log(h[c1])], logn))
    pred = _log_model(c, q, T, cfg.anchor_c, math.log(anchor_value))
    ss_res = float(np.sum((logn - pred) ** 2))
    ss_tot = float(np.sum((logn - logn.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def select_q(h, cfg=None):
    """Stage 1: best q on the early window, with the per-q optimal T.

    Returns ``(q, T, n_points, profile)`` where ``profile`` is an array of
    rows ``(q, T_opt, sse)``; failed grid points carry NaN/inf.
    """
    cfg = cfg or FitConfig()
    c, logn, anchor_value = _points(h, cfg)
    window = c <= cfg.q_window_c_max
    cw, lw = c[window], logn[window]
    if cw.size < 2:
        raise InsufficientDataError(f"{h.entity}: {cw.size} points in the q window")
    log_anchor = math.log(anchor_value)
    grid = cfg.q_grid()
    profile = np.empty((grid.size, 3))
    for i, q in enumerate(grid):
        try:
            T, s = _golden_min_T(cw, lw, q, cfg.anchor_c, log_anchor, cfg.t_max, cfg.t_rtol)
        except ConvergenceError:
            T, s = math.nan, math.inf
        profile[i] = q, T, s
    if not np.isfinite(profile[:, 2]).any():
        raise ConvergenceError(f"{h.entity}: no q in the grid gave an interior T minimum")
    # argmin returns the first minimum, i.e. ties go to the smaller q
    best = int(np.argmin(profile[:, 2]))
    return float(grid[best]), float(profile[best, 1]), int(cw.size), profile


def refit_T_fixed_q(h, q, cfg=None, n_points_q=None):
    """Stage 2 only: fit T over all fit-view points with q held fixed."""
    cfg = cfg or FitConfig()
    if not 1.0 < q < 2.0:
        raise DomainError(f"q must lie in (1, 2), got {q}")
    c, logn, anchor_value = _points(h, cfg)
    T, s = _golden_min_T(c, logn, q, cfg.anchor_c, math.log(anchor_value), cfg.t_max, cfg.t_rtol)
    return FitResult(
        entity=h.entity,
        q=float(q),
        T=T,
        r2=r_squared(h, q, T, cfg),
        anchor_c=cfg.anchor_c,
        anchor_value=anchor_value,
        n_points_q=n_points_q,
        n_points_T=int(c.size),
        sse=s,
    )


def fit(h, cfg=None):
    """Full two-stage fit: q on the early decades, then T on everything."""
    cfg = cfg or FitConfig()
    q, _, n_q, _ = select_q(h, cfg)
    return refit_T_fixed_q(h, q, cfg, n_points_q=n_q)


def linearize(h, q, ref_c=2):
    """Pairs ``(c - ref_c, ln_q(N(c)/N(ref_c)))`` for every c >= ref_c in the support.

    ``h`` is a CitationHistogram or any mapping c -> N(c) (real-valued
    counts allowed). For data following the model exactly the points lie
    on a line through the origin with slope -1/T.
    """
    counts = h.counts if hasattr(h, "counts") else h
    ref = counts.get(ref_c, 0)
    if ref <= 0:
        raise DomainError(f"c={ref_c} is not in the support")
    pts = sorted((c, n) for c, n in counts.items() if c >= ref_c and n > 0)
    cs = np.array([c for c, _ in pts], dtype=float)
    ns = np.array([n for _, n in pts], dtype=float)
    y = qmath.q_log(ns / ref, q)
    return list(zip((cs - ref_c).tolist(), np.atleast_1d(y).tolist()))


def slope_through_origin(points):
    """Least-squares slope of a line constrained through the origin."""
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    return float(np.dot(x, y) / np.dot(x, x))
