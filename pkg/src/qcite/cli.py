"""Command-line interface: ``qcite fit|rank|summary|synth|plot``."""
import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import QCiteError
from .fitter import fit
from .histogram import (
    aggregate,
    aggregate_summaries,
    dataset_files,
    load_counts_table,
    load_histogram,
    summarize,
    write_text_atomic,
)
from .plot import loglog_csv, loglog_data, loglog_svg, qlog_csv, qlog_data, qlog_svg
from .ranking import (
    load_results,
    quantity_impact_csv,
    quantity_impact_text,
    quantity_vs_impact,
    rank_by_temperature,
    ranking_csv,
    ranking_text,
    results_csv,
    results_json,
    summary_csv,
    summary_text,
)
from .synth import SyntheticSpec, generate

log = logging.getLogger("qcite")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_FIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_text_atomic(path, text)
    return path


def _write_manifest(out_dir, command, inputs, config, outputs):
    manifest = {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "config": config,
        "outputs": sorted(str(p) for p in outputs),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    _write(Path(out_dir) / f"manifest_{command}.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_dataset(directory):
    """Load every histogram in a directory; returns (histograms, diagnostics)."""
    try:
        files = dataset_files(directory)
    except FileNotFoundError as e:
        raise DataError(str(e)) from None
    if not files:
        raise DataError(f"no datasets in {directory}")
    hs, diags = [], []
    for p in files:
        try:
            hs.append(load_histogram(p))
        except (QCiteError, OSError) as e:
            diags.append(f"{p.stem}: load failed: {e}")
    return hs, diags


def _load_groups(path):
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            groups = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: {e}") from None
    if not isinstance(groups, dict) or not all(isinstance(v, list) for v in groups.values()):
        raise DataError(f"{path}: groups must map a name to a list of entities")
    return groups


def _group_members(groups, available, name):
    members = groups[name]
    missing = sorted(set(members) - set(available))
    if missing:
        raise DataError(f"group {name!r}: unknown entities {missing}")
    return [available[m] for m in members]


def _config_from_args(args):
    return load_config(
        args.config,
        q_min=args.q_min,
        q_max=args.q_max,
        q_step=args.q_step,
        anchor_c=args.anchor_c,
        q_window_decades=args.decades,
        include_c1_in_r2=args.c1_r2,
        tail_min_count=args.tail_min_count,
        min_fit_points=args.min_fit_points,
    )


def _fit_one(h, cfg):
    try:
        return h.entity, fit(h, cfg), None
    except QCiteError as e:
        return h.entity, None, str(e)


def cmd_fit(args):
    try:
        cfg = _config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as e:
        raise UsageError(f"invalid configuration: {e}") from None
    hs, diags = _load_dataset(args.dataset_dir)
    groups = _load_groups(args.groups)
    by_name = {h.entity: h for h in hs}
    for name in sorted(groups):
        hs.append(aggregate(_group_members(groups, by_name, name), name))
    if not hs:
        for d in diags:
            log.error(d)
        raise DataError("no dataset could be loaded")
    hs.sort(key=lambda h: h.entity)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_fit_one, hs, [cfg] * len(hs)))
    else:
        outcomes = [_fit_one(h, cfg) for h in hs]
    results = []
    for entity, res, err in outcomes:
        if res is None:
            diags.append(f"{entity}: fit failed: {err}")
            continue
        results.append(res)
        print(f"{entity}: q={res.q:.3f} T={res.T:.2f} R2={res.r2:.4f} points={res.n_points_T}")
    diags.sort()
    for d in diags:
        log.warning(d)
    out = Path(args.out)
    written = [
        _write(out / "results.csv", results_csv(results)),
        _write(out / "results.json", results_json(results)),
        _write(out / "diagnostics.txt", "".join(d + "\n" for d in diags)),
    ]
    _write_manifest(out, "fit", {"dataset_dir": str(args.dataset_dir)}, cfg.to_dict(), written)
    if not results:
        log.error("all entities failed to fit")
        return EXIT_FIT
    return EXIT_OK


def _summaries_from(path):
    path = Path(path)
    if path.is_dir():
        hs, diags = _load_dataset(path)
        for d in diags:
            log.warning(d)
        return [summarize(h) for h in hs]
    try:
        return load_counts_table(path)
    except (QCiteError, ValueError) as e:
        raise DataError(str(e)) from None


def cmd_rank(args):
    try:
        results = load_results(args.results)
    except OSError as e:
        raise DataError(str(e)) from None
    except QCiteError as e:
        raise DataError(str(e)) from None
    if not results:
        raise DataError(f"{args.results}: no results")
    out = Path(args.out)
    try:
        table = rank_by_temperature(results)
    except QCiteError as e:
        raise DataError(str(e)) from None
    text = ranking_text(table)
    sys.stdout.write(text)
    written = [_write(out / "ranking.txt", text), _write(out / "ranking.csv", ranking_csv(table))]
    if args.summary:
        stats = _summaries_from(args.summary)
        common = {r.entity for r in results} & {s.entity for s in stats}
        skipped = sorted({r.entity for r in results} - common)
        if skipped:
            log.warning("no counts for %s; left out of the quantity-vs-impact report", skipped)
        try:
            rows = quantity_vs_impact(
                [s for s in stats if s.entity in common], [r for r in results if r.entity in common]
            )
        except QCiteError as e:
            raise DataError(str(e)) from None
        written.append(_write(out / "quantity_vs_impact.txt", quantity_impact_text(rows)))
        written.append(_write(out / "quantity_vs_impact.csv", quantity_impact_csv(rows)))
    _write_manifest(out, "rank", {"results": str(args.results), "summary": args.summary}, None, written)
    return EXIT_OK


def cmd_summary(args):
    if bool(args.dataset_dir) == bool(args.counts):
        raise UsageError("give exactly one of DATASET_DIR or --counts")
    if args.counts:
        stats = _summaries_from(args.counts)
    else:
        stats = _summaries_from(args.dataset_dir)
    if not stats:
        raise DataError("no valid histograms")
    stats.sort(key=lambda s: (-s.total_papers, s.entity))
    groups = _load_groups(args.groups)
    by_name = {s.entity: s for s in stats}
    rows = list(stats)
    for name in groups:
        rows.append(aggregate_summaries(_group_members(groups, by_name, name), name))
    rows.append(aggregate_summaries(stats, args.all_name))
    text = summary_text(rows)
    sys.stdout.write(text)
    out = Path(args.out)
    written = [_write(out / "summary.txt", text), _write(out / "summary.csv", summary_csv(rows))]
    _write_manifest(out, "summary", {"source": str(args.counts or args.dataset_dir)}, None, written)
    return EXIT_OK


def _read_specs(path):
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: {e}") from None
    items = data if isinstance(data, list) else [data]
    specs = []
    for i, d in enumerate(items):
        try:
            specs.append(SyntheticSpec.from_dict(d))
        except (TypeError, ValueError) as e:
            raise DataError(f"{path}: spec #{i}: {e}") from None
    names = [s.entity for s in specs]
    if len(set(names)) != len(names):
        raise DataError(f"{path}: duplicate entity names")
    return specs


def cmd_synth(args):
    specs = _read_specs(args.spec_file)
    out = Path(args.out_dir)
    written = []
    for spec in specs:
        h = generate(spec)
        written.append(_write(out / f"{spec.entity}.csv", h.to_csv()))
        print(f"{spec.entity}: {len(h.counts)} bins, {h.total_papers} papers")
    prov = json.dumps([s.to_dict() for s in specs], indent=2, sort_keys=True) + "\n"
    written.append(_write(out / "synth_specs.json", prov))
    return EXIT_OK


def _safe_name(entity):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in entity)


def cmd_plot(args):
    hs, diags = _load_dataset(args.dataset_dir)
    for d in diags:
        log.warning(d)
    try:
        results = load_results(args.results)
    except (OSError, QCiteError) as e:
        raise DataError(str(e)) from None
    by_name = {h.entity: h for h in hs}
    missing = sorted(r.entity for r in results if r.entity not in by_name)
    if missing:
        raise DataError(f"no dataset for results entities {missing}")
    out = Path(args.out)
    written = []
    for r in sorted(results, key=lambda r: r.entity):
        h = by_name[r.entity]
        stem = f"{_safe_name(r.entity)}.{args.style}"
        try:
            if args.style == "loglog":
                svg = loglog_svg(h, r, args.normalize)
                data = loglog_csv(loglog_data(h, r, args.normalize))
            else:
                svg = qlog_svg(h, r, args.ref_c, args.xlim)
                data = qlog_csv(qlog_data(h, r, args.ref_c, args.xlim))
        except QCiteError as e:
            raise DataError(f"{r.entity}: {e}") from None
        written.append(_write(out / f"{stem}.svg", svg))
        written.append(_write(out / f"{stem}.csv", data))
    for p in written:
        print(p)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="qcite", description="Fit q-exponential laws to citation histograms and rank by T.")
    p.add_argument("--version", action="version", version=f"qcite {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit every histogram in a dataset directory")
    f.add_argument("dataset_dir")
    f.add_argument("-o", "--out", default="qcite-out")
    f.add_argument("--config", help="JSON config file (default: $QCITE_CONFIG)")
    f.add_argument("--q-min", type=float)
    f.add_argument("--q-max", type=float)
    f.add_argument("--q-step", type=float)
    f.add_argument("--anchor-c", type=int)
    f.add_argument("--decades", type=float)
    f.add_argument("--tail-min-count", type=int)
    f.add_argument("--min-fit-points", type=int)
    f.add_argument("--no-c1-r2", dest="c1_r2", action="store_const", const=False, default=None)
    f.add_argument("--groups", help="JSON mapping of aggregate name to member entities")
    f.add_argument("-j", "--jobs", type=int, default=1)
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("rank", help="rank fit results by effective temperature")
    r.add_argument("results", help="results CSV/JSON from `fit`, or a Table-2 style CSV")
    r.add_argument("--summary", help="counts table CSV or dataset directory for the quantity-vs-impact report")
    r.add_argument("-o", "--out", default="qcite-out")
    r.set_defaults(func=cmd_rank)

    s = sub.add_parser("summary", help="Table-1 style counts of zero/one/two-cited papers")
    s.add_argument("dataset_dir", nargs="?")
    s.add_argument("--counts", help="entity,total,n0,n1,n2 CSV instead of histograms")
    s.add_argument("--groups", help="JSON mapping of aggregate name to member entities")
    s.add_argument("--all-name", default="All")
    s.add_argument("-o", "--out", default="qcite-out")
    s.set_defaults(func=cmd_summary)

    y = sub.add_parser("synth", help="write synthetic histograms from a JSON spec (or list of specs)")
    y.add_argument("spec_file")
    y.add_argument("out_dir")
    y.set_defaults(func=cmd_synth)

    g = sub.add_parser("plot", help="SVG figures with companion CSV")
    g.add_argument("dataset_dir")
    g.add_argument("results")
    g.add_argument("--style", choices=["loglog", "qlog"], default="loglog")
    g.add_argument("--xlim", type=float, help="qlog: largest c - ref_c shown")
    g.add_argument("--ref-c", type=int, default=2)
    g.add_argument("--normalize", action="store_true", help="loglog: plot N(c)/total")
    g.add_argument("-o", "--out", default="qcite-out")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s: %(message)s", force=True
    )
    try:
        return args.func(args)
    except UsageError as e:
        log.error(str(e))
        return EXIT_USAGE
    except DataError as e:
        log.error(str(e))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
