"""Fitting configuration."""
import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

CONFIG_ENV = "QCITE_CONFIG"


@dataclass(frozen=True)
class FitConfig:
    """Tunable knobs of the two-stage fit.

    ``q_window_decades`` bounds the q-selection window to
    ``anchor_c <= c <= anchor_c * 10**q_window_decades``.

    ``tail_min_count`` ends the fit range at the first c >= anchor_c whose
    count falls below it; the log of counts that small is dominated by
    integer quantization. Values <= 1 keep every non-empty bin.
    """

    anchor_c: int = 2
    q_min: float = 1.20
    q_max: float = 1.50
    q_step: float = 0.001
    q_window_decades: float = 2.0
    min_fit_points: int = 10
    tail_min_count: int = 5
    include_c1_in_r2: bool = True
    t_max: float = 1e3
    t_rtol: float = 1e-6

    def __post_init__(self):
        if not 1.0 < self.q_min <= self.q_max < 2.0:
            raise ValueError(f"need 1 < q_min <= q_max < 2, got [{self.q_min}, {self.q_max}]")
        if self.q_step <= 0:
            raise ValueError("q_step must be positive")
        if self.q_window_decades <= 0:
            raise ValueError("q_window_decades must be positive")
        if self.anchor_c < 1:
            raise ValueError("anchor_c must be >= 1")
        if self.tail_min_count < 0:
            raise ValueError("tail_min_count must be >= 0")
        if self.min_fit_points < 2:
            raise ValueError("min_fit_points must be >= 2")
        if self.t_max <= 0 or self.t_rtol <= 0:
            raise ValueError("t_max and t_rtol must be positive")

    def q_grid(self):
        n = int(round((self.q_max - self.q_min) / self.q_step)) + 1
        # rounding keeps grid values exactly on printed decimals
        return np.round(self.q_min + self.q_step * np.arange(n), 12)

    @property
    def q_window_c_max(self):
        return self.anchor_c * 10.0**self.q_window_decades

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


def load_config(path=None, **overrides):
    """Build a FitConfig from an optional JSON file (or $QCITE_CONFIG) plus overrides.

    Overrides whose value is None are ignored, so unset CLI flags fall
    through to the file.
    """
    path = path or os.environ.get(CONFIG_ENV)
    base = {}
    if path:
        with open(path, encoding="utf-8") as f:
            base = json.load(f)
    cfg = FitConfig.from_dict(base)
    return cfg.replace(**overrides)
