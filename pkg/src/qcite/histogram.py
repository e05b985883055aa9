"""Citation-count histograms: loading, validation, Table-1 style summaries."""
import csv
import io
import os
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

from .config import FitConfig
from .errors import HistogramFormatError, InsufficientDataError

HEADER = "citations,count"
_ROW = re.compile(r"^(\d+),(\d+)$")


@dataclass(frozen=True)
class CitationHistogram:
    """Number of papers N(c) with exactly c citations, for one entity."""

    entity: str
    counts: MappingProxyType
    source_note: str = ""

    def __init__(self, entity, counts, source_note=""):
        clean = {}
        for c, n in counts.items():
            c, n = int(c), int(n)
            if c < 0:
                raise HistogramFormatError(f"negative citation count c={c}")
            if n < 0:
                raise HistogramFormatError(f"negative N(c)={n} at c={c}")
            if n:
                clean[c] = n
        if not clean:
            raise HistogramFormatError(f"histogram {entity!r} has no papers")
        object.__setattr__(self, "entity", str(entity))
        object.__setattr__(self, "counts", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "source_note", source_note)

    def __reduce__(self):
        return (CitationHistogram, (self.entity, dict(self.counts), self.source_note))

    def __getitem__(self, c):
        return self.counts.get(c, 0)

    def __eq__(self, other):
        if not isinstance(other, CitationHistogram):
            return NotImplemented
        return self.entity == other.entity and dict(self.counts) == dict(other.counts)

    def __hash__(self):
        return hash((self.entity, tuple(self.counts.items())))

    @property
    def total_papers(self):
        return sum(self.counts.values())

    @property
    def support(self):
        return list(self.counts)

    def scaled(self, factor, entity=None):
        """Copy with every N(c) multiplied by a positive integer."""
        if int(factor) != factor or factor <= 0:
            raise ValueError("factor must be a positive integer")
        return CitationHistogram(
            entity or self.entity, {c: n * int(factor) for c, n in self.counts.items()}, self.source_note
        )

    def to_csv(self):
        lines = [HEADER] + [f"{c},{n}" for c, n in self.counts.items()]
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        write_text_atomic(path, self.to_csv())


def write_text_atomic(path, text):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def parse_histogram(text, entity, source=None):
    """Parse the ``citations,count`` CSV format from a string."""
    if text.startswith("﻿"):
        text = text[1:]
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in lines]
    if not lines:
        raise HistogramFormatError("empty file", source=source)
    if lines[0] != HEADER:
        raise HistogramFormatError(f"expected header {HEADER!r}, got {lines[0]!r}", line=1, source=source)
    counts = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        m = _ROW.match(ln)
        if not m:
            if re.match(r"^\d+,-\d+$", ln):
                raise HistogramFormatError(f"negative count {ln!r}", line=lineno, source=source)
            raise HistogramFormatError(f"malformed row {ln!r}", line=lineno, source=source)
        c, n = int(m.group(1)), int(m.group(2))
        if c in counts:
            raise HistogramFormatError(f"duplicate row for c={c}", line=lineno, source=source)
        counts[c] = n
    if not counts:
        raise HistogramFormatError("no data rows", source=source)
    if not any(counts.values()):
        raise HistogramFormatError("all counts are zero", source=source)
    return CitationHistogram(entity, counts, source_note=str(source or ""))


def load_histogram(src, entity=None):
    """Load a histogram CSV from a path or a text/binary stream.

    The entity defaults to the file stem for paths.
    """
    if isinstance(src, (str, os.PathLike)):
        path = Path(src)
        with open(path, "rb") as f:
            raw = f.read()
        source = str(path)
        entity = entity or path.stem
    else:
        raw = src.read()
        source = getattr(src, "name", "<stream>")
        if entity is None:
            raise ValueError("entity is required when loading from a stream")
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise HistogramFormatError(f"not UTF-8: {e}", source=source) from None
    return parse_histogram(raw, entity, source=source)


def dataset_files(directory):
    """Histogram CSV files of a dataset directory, in sorted order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix == ".csv" and p.is_file())


@dataclass(frozen=True)
class SummaryStats:
    entity: str
    total_papers: int
    n0: int
    n1: int
    n2: int

    def __post_init__(self):
        if self.total_papers <= 0:
            raise ValueError(f"{self.entity}: total_papers must be positive")
        if min(self.n0, self.n1, self.n2) < 0 or self.n0 + self.n1 + self.n2 > self.total_papers:
            raise ValueError(f"{self.entity}: inconsistent zero/one/two counts")

    @property
    def pct0(self):
        return 100.0 * self.n0 / self.total_papers

    @property
    def pct1(self):
        return 100.0 * self.n1 / self.total_papers

    @property
    def pct2(self):
        return 100.0 * self.n2 / self.total_papers

    def display(self):
        """Percentages rounded to one decimal, as printed in reports."""
        return round(self.pct0, 1), round(self.pct1, 1), round(self.pct2, 1)


def summarize(h):
    return SummaryStats(h.entity, h.total_papers, h[0], h[1], h[2])


def aggregate(hs, name):
    """Pointwise sum of several histograms."""
    hs = list(hs)
    if not hs:
        raise ValueError("aggregate needs at least one histogram")
    total = {}
    for h in hs:
        for c, n in h.counts.items():
            total[c] = total.get(c, 0) + n
    return CitationHistogram(name, total, source_note="aggregate of " + ", ".join(h.entity for h in hs))


def aggregate_summaries(stats, name):
    """Sum of SummaryStats; used when only Table-1 style counts are known."""
    stats = list(stats)
    if not stats:
        raise ValueError("aggregate needs at least one entry")
    return SummaryStats(
        name,
        sum(s.total_papers for s in stats),
        sum(s.n0 for s in stats),
        sum(s.n1 for s in stats),
        sum(s.n2 for s in stats),
    )


def load_counts_table(path):
    """Read a ``entity,total,n0,n1,n2`` CSV into SummaryStats rows."""
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    reader = csv.DictReader(io.StringIO(text))
    expected = ["entity", "total", "n0", "n1", "n2"]
    if reader.fieldnames != expected:
        raise HistogramFormatError(f"expected columns {expected}, got {reader.fieldnames}", source=path)
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            out.append(
                SummaryStats(row["entity"], int(row["total"]), int(row["n0"]), int(row["n1"]), int(row["n2"]))
            )
        except (TypeError, ValueError) as e:
            raise HistogramFormatError(str(e), line=lineno, source=path) from None
    return out


def fit_view(h, cfg=None):
    """Points eligible for fitting, ascending in c.

    Keeps c >= anchor_c with N(c) > 0. When ``cfg.tail_min_count`` > 1 the
    view also stops at the first c (including empty bins) whose count is
    below that threshold.
    """
    cfg = cfg or FitConfig()
    pts = []
    cutoff = cfg.tail_min_count
    last = max(h.counts)
    if cutoff > 1:
        for c in range(cfg.anchor_c, last + 1):
            n = h[c]
            if n < cutoff:
                break
            pts.append((c, n))
    else:
        pts = [(c, n) for c, n in h.counts.items() if c >= cfg.anchor_c and n > 0]
    if len(pts) < cfg.min_fit_points:
        raise InsufficientDataError(
            f"{h.entity}: {len(pts)} usable points with c >= {cfg.anchor_c}, need {cfg.min_fit_points}"
        )
    return pts
