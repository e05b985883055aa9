"""Static SVG figures: log-log histogram with fitted curve, and q-log linearization.

The SVG is written by hand so output bytes depend only on the inputs.
Every figure has a companion CSV with the plotted numbers.
"""
import math

import numpy as np

from .fitter import linearize, model_eval, slope_through_origin
from .ranking import _csv

WIDTH, HEIGHT = 640, 480
MARGIN = dict(left=80, right=20, top=40, bottom=60)


def loglog_data(h, result, normalize=False):
    """Rows ``(c, observed, fitted)`` for every c >= 1 in the support.

    ``fitted`` is None where the model is undefined. With ``normalize``
    both columns are divided by the histogram total.
    """
    scale = 1.0 / h.total_papers if normalize else 1.0
    rows = []
    for c, n in h.counts.items():
        if c < 1:
            continue
        fitted = None
        if 1.0 + (result.q - 1.0) * (c - result.anchor_c) / result.T > 0:
            fitted = float(model_eval(c, result.q, result.T, result.anchor_c, h[result.anchor_c])) * scale
        rows.append((c, n * scale, fitted))
    return rows


def model_curve(h, result, normalize=False, n=200):
    c_lo = 1 if h[1] > 0 else result.anchor_c
    c_hi = max(h.counts)
    cs = np.unique(np.round(np.geomspace(c_lo, max(c_hi, c_lo + 1), n), 6))
    scale = 1.0 / h.total_papers if normalize else 1.0
    ys = model_eval(cs, result.q, result.T, result.anchor_c, h[result.anchor_c]) * scale
    return list(zip(cs.tolist(), np.atleast_1d(ys).tolist()))


def qlog_data(h, result, ref_c=2, xlim=None):
    """Rows ``(c, c - ref_c, ln_q(N(c)/N(ref_c)), -(c - ref_c)/T)``."""
    pts = linearize(h, result.q, ref_c)
    rows = []
    for x, y in pts:
        if xlim is not None and x > xlim:
            continue
        rows.append((int(x) + ref_c, x, y, -x / result.T))
    return rows


def loglog_csv(rows):
    return _csv(["c", "observed", "fitted"], [[c, _g(o), "" if f is None else _g(f)] for c, o, f in rows])


def qlog_csv(rows):
    return _csv(["c", "x", "lnq_ratio", "fitted_line"], [[c, _g(x), _g(y), _g(f)] for c, x, y, f in rows])


def _g(v):
    return f"{v:.10g}"


def _f(v):
    return f"{v:.2f}"


class _Axes:
    def __init__(self, xlim, ylim, xlog, ylog):
        self.xlim, self.ylim, self.xlog, self.ylog = xlim, ylim, xlog, ylog
        self.x0, self.x1 = MARGIN["left"], WIDTH - MARGIN["right"]
        self.y0, self.y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def _frac(self, v, lim, log):
        lo, hi = lim
        if log:
            v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
        return (v - lo) / (hi - lo)

    def px(self, x, y):
        return (
            self.x0 + self._frac(x, self.xlim, self.xlog) * (self.x1 - self.x0),
            self.y0 + self._frac(y, self.ylim, self.ylog) * (self.y1 - self.y0),
        )


def _ticks(lo, hi, log):
    if log:
        return [10.0**k for k in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)]
    step = 10 ** math.floor(math.log10((hi - lo) / 2)) if hi > lo else 1
    if (hi - lo) / step > 10:
        step *= 5 if (hi - lo) / step > 25 else 2
    start = math.ceil(lo / step) * step
    n = int(math.floor((hi - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def _tick_label(v, log):
    if log:
        return f"1e{int(round(math.log10(v)))}"
    return f"{v:g}"


def _svg(axes, title, xlabel, ylabel, points, lines, notes=()):
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        f'<rect x="{axes.x0}" y="{axes.y1}" width="{axes.x1 - axes.x0}" height="{axes.y0 - axes.y1}" '
        'fill="none" stroke="black"/>',
    ]
    for v in _ticks(*axes.xlim, axes.xlog):
        if not axes.xlim[0] <= v <= axes.xlim[1]:
            continue
        x, _ = axes.px(v, axes.ylim[0])
        out.append(f'<line x1="{_f(x)}" y1="{axes.y0}" x2="{_f(x)}" y2="{axes.y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{axes.y0 + 18}" text-anchor="middle">{_tick_label(v, axes.xlog)}</text>')
    for v in _ticks(*axes.ylim, axes.ylog):
        if not axes.ylim[0] <= v <= axes.ylim[1]:
            continue
        _, y = axes.px(axes.xlim[0], v)
        out.append(f'<line x1="{axes.x0 - 5}" y1="{_f(y)}" x2="{axes.x0}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{axes.x0 - 8}" y="{_f(y + 4)}" text-anchor="end">{_tick_label(v, axes.ylog)}</text>')
    out.append(
        f'<text x="{(axes.x0 + axes.x1) / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{_esc(xlabel)}</text>'
    )
    out.append(
        f'<text x="18" y="{(axes.y0 + axes.y1) / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(axes.y0 + axes.y1) / 2:.2f})">{_esc(ylabel)}</text>'
    )
    for pts, color in lines:
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in (axes.px(a, b) for a, b in pts))
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    for x, y in (axes.px(a, b) for a, b in points):
        out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2" fill="none" stroke="black"/>')
    for i, note in enumerate(notes):
        out.append(f'<text x="{axes.x1 - 10}" y="{axes.y1 + 18 + 16 * i}" text-anchor="end">{_esc(note)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _pad_log(lo, hi):
    return 10 ** math.floor(math.log10(lo)), 10 ** math.ceil(math.log10(hi))


def loglog_svg(h, result, normalize=False):
    rows = loglog_data(h, result, normalize)
    curve = [(c, y) for c, y in model_curve(h, result, normalize) if y > 0]
    obs = [(c, o) for c, o, _ in rows]
    ys = [o for _, o in obs] + [y for _, y in curve]
    xs = [c for c, _ in obs]
    axes = _Axes(_pad_log(min(xs), max(xs)), _pad_log(min(ys), max(ys)), True, True)
    notes = [f"q = {result.q:.3f}", f"T = {result.T:.2f}", f"R^2 = {result.r2:.3f}"]
    return _svg(
        axes,
        h.entity,
        "citations c",
        "P(c)" if normalize else "N(c)",
        obs,
        [(curve, "red")],
        notes,
    )


def qlog_svg(h, result, ref_c=2, xlim=None):
    rows = qlog_data(h, result, ref_c, xlim)
    pts = [(x, y) for _, x, y, _ in rows]
    x_hi = xlim if xlim is not None else max(x for x, _ in pts)
    x_hi = max(x_hi, 1.0)
    line = [(0.0, 0.0), (x_hi, -x_hi / result.T)]
    ys = [y for _, y in pts] + [line[1][1], 0.0]
    axes = _Axes((0.0, x_hi), (min(ys), max(ys) + 1e-9), False, False)
    data_slope = slope_through_origin(pts) if len(pts) > 1 else float("nan")
    notes = [
        f"q = {result.q:.3f}",
        f"fitted slope -1/T = {-1.0 / result.T:.4f}",
        f"data slope = {data_slope:.4f}",
    ]
    return _svg(
        axes,
        f"{h.entity}: ln_q[N(c)/N({ref_c})]",
        f"c - {ref_c}",
        f"ln_q[N(c)/N({ref_c})]",
        pts,
        [(line, "red")],
        notes,
    )
