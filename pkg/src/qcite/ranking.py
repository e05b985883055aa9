"""Impact ranking by effective temperature, plus Table 1/Table 2 style reports."""
import csv
import io
import json
from dataclasses import dataclass

from .errors import QCiteError
from .fitter import RESULT_COLUMNS, FitResult

RANKING_COLUMNS = ["rank", "entity", "q", "r2", "T"]


@dataclass(frozen=True)
class RankRow:
    rank: int
    entity: str
    q: float
    r2: float
    T: float


@dataclass(frozen=True)
class RankingTable:
    rows: tuple
    ordering_key: str = "T descending"

    def __len__(self):
        return len(self.rows)

    def entities(self):
        return [r.entity for r in self.rows]

    def rank_of(self, entity):
        for r in self.rows:
            if r.entity == entity:
                return r.rank
        raise KeyError(entity)


def _check_unique(names):
    seen = set()
    for n in names:
        if n in seen:
            raise QCiteError(f"duplicate entity {n!r}")
        seen.add(n)


def rank_by_temperature(results):
    """Sort fit results by T descending; equal T falls back to entity name."""
    results = list(results)
    if not results:
        raise QCiteError("nothing to rank")
    _check_unique(r.entity for r in results)
    ordered = sorted(results, key=lambda r: (-r.T, r.entity))
    return RankingTable(tuple(RankRow(i, r.entity, r.q, r.r2, r.T) for i, r in enumerate(ordered, start=1)))


@dataclass(frozen=True)
class QuantityImpactRow:
    entity: str
    total_papers: int
    quantity_rank: int
    T: float
    impact_rank: int

    @property
    def shift(self):
        """Positive when the entity ranks better by impact than by volume."""
        return self.quantity_rank - self.impact_rank


def quantity_vs_impact(summaries, results):
    summaries, results = list(summaries), list(results)
    _check_unique(s.entity for s in summaries)
    _check_unique(r.entity for r in results)
    a, b = {s.entity for s in summaries}, {r.entity for r in results}
    if a != b:
        raise QCiteError(f"entity sets differ: only in summaries {sorted(a - b)}, only in results {sorted(b - a)}")
    by_volume = sorted(summaries, key=lambda s: (-s.total_papers, s.entity))
    qrank = {s.entity: i for i, s in enumerate(by_volume, start=1)}
    table = rank_by_temperature(results)
    temps = {r.entity: r.T for r in results}
    totals = {s.entity: s.total_papers for s in summaries}
    return [
        QuantityImpactRow(row.entity, totals[row.entity], qrank[row.entity], temps[row.entity], row.rank)
        for row in sorted(table.rows, key=lambda r: qrank[r.entity])
    ]


# -- reading results --------------------------------------------------------


def _opt_int(v):
    return None if v in (None, "") else int(v)


def result_from_mapping(d):
    return FitResult(
        entity=d["entity"],
        q=float(d["q"]),
        T=float(d["T"]),
        r2=float(d["r2"]),
        anchor_c=int(d.get("anchor_c") or 2),
        anchor_value=_opt_int(d.get("anchor_value")),
        n_points_q=_opt_int(d.get("n_points_q")),
        n_points_T=_opt_int(d.get("n_points_T")),
        sse=None if d.get("sse") in (None, "") else float(d["sse"]),
    )


def load_results(path):
    """Read fit results from a results CSV/JSON or a Table-2 style CSV.

    CSV needs at least the columns entity, q, T and r2 (any order).
    """
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    try:
        if str(path).endswith(".json"):
            data = json.loads(text)
            rows = data["results"] if isinstance(data, dict) else data
            return [result_from_mapping(d) for d in rows]
        reader = csv.DictReader(io.StringIO(text))
        missing = {"entity", "q", "T", "r2"} - set(reader.fieldnames or [])
        if missing:
            raise QCiteError(f"{path}: missing columns {sorted(missing)}")
        return [result_from_mapping(d) for d in reader]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise QCiteError(f"{path}: malformed results file ({e})") from None


# -- rendering --------------------------------------------------------------


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def results_csv(results):
    results = sorted(results, key=lambda r: r.entity)
    return _csv(RESULT_COLUMNS, [r.csv_row() for r in results])


def results_json(results):
    results = sorted(results, key=lambda r: r.entity)
    return json.dumps({"results": [r.to_dict() for r in results]}, indent=2, sort_keys=True) + "\n"


def ranking_csv(table):
    return _csv(RANKING_COLUMNS, [[r.rank, r.entity, f"{r.q:.3f}", f"{r.r2:.2f}", f"{r.T:.2f}"] for r in table.rows])


def ranking_text(table):
    w = max(12, *(len(r.entity) for r in table.rows))
    lines = [f"{'Rank':>4}  {'Country':<{w}}  {'q':>6}  {'R^2':>5}  {'T':>6}"]
    lines.append("-" * len(lines[0]))
    for r in table.rows:
        lines.append(f"{r.rank:>4}  {r.entity:<{w}}  {r.q:>6.3f}  {r.r2:>5.2f}  {r.T:>6.2f}")
    return "\n".join(lines) + "\n"


SUMMARY_COLUMNS = ["entity", "total", "n0", "pct0", "n1", "pct1", "n2", "pct2"]


def summary_csv(stats):
    rows = []
    for s in stats:
        p0, p1, p2 = s.display()
        rows.append([s.entity, s.total_papers, s.n0, f"{p0:.1f}", s.n1, f"{p1:.1f}", s.n2, f"{p2:.1f}"])
    return _csv(SUMMARY_COLUMNS, rows)


def summary_text(stats):
    stats = list(stats)
    w = max(14, *(len(s.entity) for s in stats))
    head = f"{'Country':<{w}}  {'Total':>10}  {'N(0)':>10} {'(%)':>6}  {'N(1)':>9} {'(%)':>6}  {'N(2)':>9} {'(%)':>6}"
    lines = [head, "-" * len(head)]
    for s in stats:
        p0, p1, p2 = s.display()
        lines.append(
            f"{s.entity:<{w}}  {s.total_papers:>10}  {s.n0:>10} {p0:>6.1f}  {s.n1:>9} {p1:>6.1f}  {s.n2:>9} {p2:>6.1f}"
        )
    return "\n".join(lines) + "\n"


QVI_COLUMNS = ["entity", "total", "quantity_rank", "T", "impact_rank", "shift"]


def quantity_impact_csv(rows):
    return _csv(
        QVI_COLUMNS,
        [[r.entity, r.total_papers, r.quantity_rank, f"{r.T:.2f}", r.impact_rank, r.shift] for r in rows],
    )


def quantity_impact_text(rows):
    w = max(12, *(len(r.entity) for r in rows))
    head = f"{'Country':<{w}}  {'Total':>10}  {'Qty rank':>8}  {'T':>6}  {'Impact rank':>11}  {'Shift':>5}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.entity:<{w}}  {r.total_papers:>10}  {r.quantity_rank:>8}  {r.T:>6.2f}  {r.impact_rank:>11}  {r.shift:>+5d}"
        )
    return "\n".join(lines) + "\n"
