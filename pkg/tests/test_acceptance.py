"""Exit criteria. Each test carries ``acceptance(number, title)``; conftest prints
one PASS/FAIL line per criterion at the end of the run."""
import csv
import json
import math
import time

import numpy as np
import pytest
from scipy import integrate, optimize

from qcite.cli import main
from qcite.fitter import fit, linearize, refit_T_fixed_q
from qcite.qmath import entropy_composition, max_entropy, q_exp, q_log, tsallis_entropy
from qcite.ranking import load_results, rank_by_temperature
from qcite.synth import SyntheticSpec, cdf, generate_deterministic, generate_sampled, model_counts
from qcite.synth import sample_citation, sample_continuous

# Table 1 as printed: (total, % zero, % one, % two)
PRINTED_TABLE1 = {
    "Italy": (935769, 29.8, 9.5, 6.7),
    "Spain": (577996, 29.7, 10.5, 7.3),
    "Switzerland": (479642, 30.3, 8.70, 5.8),
    "Brazil": (285570, 38.2, 11.7, 7.9),
    "Austria": (237032, 35.3, 10.3, 6.8),
    "South Africa": (157397, 35.5, 11.3, 7.7),
    "Hungary": (152385, 37.5, 11.2, 7.4),
    "Greece": (144443, 34.8, 10.9, 7.7),
    "Argentina": (120430, 35.8, 10.7, 7.5),
    "Mexico": (92907, 47.7, 11.8, 7.5),
    "Portugal": (79988, 32.5, 10.5, 7.3),
    "Romania": (70126, 52.1, 12.4, 7.4),
    "Chile": (65886, 38.5, 10.9, 7.0),
    "Latin American": (564794, 39.3, 11.4, 7.6),
    "European": (2677381, 31.7, 9.90, 6.8),
    "All Countries": (3399572, 33.2, 10.2, 7.0),
}

PUBLISHED_ORDER = [
    "Switzerland", "Italy", "Spain", "Austria", "Portugal", "Argentina", "Greece",
    "Hungary", "Chile", "South Africa", "Brazil", "Mexico", "Romania",
]  # fmt: skip


@pytest.fixture(scope="module")
def twin_fits(twin_params):
    start = time.perf_counter()
    fits = {}
    for entity, q, T, n2 in twin_params:
        h = generate_deterministic(SyntheticSpec(q, T, n2, entity=entity, c_max=20000))
        fits[entity] = (q, T, fit(h))
    return fits, time.perf_counter() - start


@pytest.mark.acceptance(1, "Table 1 reproduction (+-0.1 points, aggregates included)")
def test_table1_reproduction(fixtures_dir, tmp_path, record_property):
    start = time.perf_counter()
    code = main(
        [
            "summary",
            "--counts", str(fixtures_dir / "table1.csv"),
            "--groups", str(fixtures_dir / "groups.json"),
            "--all-name", "All Countries",
            "-o", str(tmp_path),
        ]
    )  # fmt: skip
    elapsed = time.perf_counter() - start
    assert code == 0
    with open(tmp_path / "summary.csv", newline="") as f:
        rows = {r["entity"]: r for r in csv.DictReader(f)}
    assert set(rows) == set(PRINTED_TABLE1)
    worst = 0.0
    for entity, (_, p0, p1, p2) in PRINTED_TABLE1.items():
        r = rows[entity]
        total = int(r["total"])
        for key, printed in (("n0", p0), ("n1", p1), ("n2", p2)):
            pct = 100.0 * int(r[key]) / total
            worst = max(worst, abs(pct - printed))
            assert abs(pct - printed) <= 0.1 + 1e-12, (entity, key, pct, printed)
            assert float(r["pct" + key[1]]) == pytest.approx(printed, abs=0.1 + 1e-12)
    record_property("max_dev_points", f"{worst:.3f}")
    record_property("seconds", f"{elapsed:.2f}")
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "Table 2 ranking reproduction")
def test_table2_ranking(fixtures_dir, record_property):
    start = time.perf_counter()
    table = rank_by_temperature(load_results(fixtures_dir / "table2.csv"))
    elapsed = time.perf_counter() - start
    assert table.entities() == PUBLISHED_ORDER
    assert table.rows[0].T == 7.14 and table.rows[-1].T == 2.94
    record_property("seconds", f"{elapsed:.3f}")
    assert elapsed < 1.0


@pytest.mark.acceptance(3, "Oracle fit recovery, noise-free twins")
def test_noise_free_recovery(twin_fits, record_property):
    fits, elapsed = twin_fits
    assert len(fits) == 13
    dq = max(abs(r.q - q) for q, _, r in fits.values())
    dT = max(abs(r.T - T) for _, T, r in fits.values())
    r2 = min(r.r2 for _, _, r in fits.values())
    record_property("max|dq|", f"{dq:.4f}")
    record_property("max|dT|", f"{dT:.4f}")
    record_property("min R2", f"{r2:.5f}")
    record_property("seconds", f"{elapsed:.1f}")
    for entity, (q, T, r) in fits.items():
        assert abs(r.q - q) <= 0.005 + 1e-12, entity
        assert abs(r.T - T) <= 0.05, entity
        assert r.r2 >= 0.999, entity
    assert elapsed < 30.0


@pytest.mark.acceptance(4, "Oracle fit recovery, sampled n=1e6, 5 seeds")
def test_sampled_recovery(record_property):
    start = time.perf_counter()
    got = []
    for seed in range(5):
        h = generate_sampled(SyntheticSpec(4 / 3, 5.0, 1, mode="sampled", n_samples=10**6, seed=seed))
        r = fit(h)
        got.append((r.q, r.T))
    elapsed = time.perf_counter() - start
    record_property("(q,T)", ", ".join(f"({q:.3f},{T:.3f})" for q, T in got))
    record_property("seconds", f"{elapsed:.1f}")
    for q, T in got:
        assert 1.30 <= q <= 1.37
        assert abs(T - 5.0) <= 0.05 * 5.0
    assert elapsed < 60.0


@pytest.mark.acceptance(5, "q band 1.34 +- 0.10 on all twins")
def test_q_band(twin_fits, record_property):
    fits, _ = twin_fits
    qs = [r.q for _, _, r in fits.values()]
    record_property("q range", f"[{min(qs):.3f}, {max(qs):.3f}]")
    assert all(abs(q - 1.34) <= 0.10 for q in qs)


@pytest.mark.acceptance(6, "q-sensitivity on the Italy twin (q=1.330, 1.40)")
@pytest.mark.parametrize("q_alt", [1.330, 1.40])
def test_q_sensitivity(twin_params, q_alt, record_property):
    entity, q, T, n2 = next(p for p in twin_params if p[0] == "Italy")
    h = generate_deterministic(SyntheticSpec(q, T, n2, entity=entity, c_max=20000))
    base = fit(h)
    alt = refit_T_fixed_q(h, q_alt)
    rel = abs(alt.T - base.T) / base.T
    record_property(f"q={q_alt}", f"T={alt.T:.3f} ({(alt.T - base.T) / base.T:+.1%} vs {base.T:.3f}) R2={alt.r2:.4f}")
    assert alt.r2 >= 0.98
    assert rel <= 0.15


@pytest.mark.acceptance(7, "Linearization exactness (slope -1/T, zero intercept, 1e-9)")
def test_linearization_exact(twin_params, record_property):
    worst_slope = worst_icpt = 0.0
    for entity, q, T, n2 in twin_params:
        exact = model_counts(SyntheticSpec(q, T, n2, entity=entity, c_max=20000))
        pts = np.array(linearize(exact, q, ref_c=2))
        x, y = pts[:, 0], pts[:, 1]
        A = np.column_stack([x, np.ones_like(x)])
        (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
        worst_slope = max(worst_slope, abs(slope * T + 1.0))
        worst_icpt = max(worst_icpt, abs(icpt) / np.abs(y).max())
    record_property("max rel slope err", f"{worst_slope:.1e}")
    record_property("max rel intercept", f"{worst_icpt:.1e}")
    assert worst_slope < 1e-9
    assert worst_icpt < 1e-9


@pytest.mark.acceptance(8, "qmath property suite")
def test_qmath_suite(record_property):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    # round trip
    for q in np.linspace(0.5, 1.9, 15):
        x = rng.uniform(-50, 50, 2000)
        x = x[1.0 + (1.0 - q) * x > 1e-9]
        y = q_exp(x, q)
        keep = y > 0
        assert np.max(np.abs(q_log(y[keep], q) - x[keep])) < 1e-10
    # q -> 1 limits
    x = np.linspace(-5, 5, 1001)
    assert np.max(np.abs(q_exp(x, 1 + 1e-6) - np.exp(x)) / np.exp(x)) < 1e-4
    assert np.max(np.abs(q_log(np.exp(x), 1 + 1e-6) - x) / np.maximum(np.abs(x), 1e-300)) < 1e-4
    # nonadditivity on product distributions
    for q in (0.5, 1.0, 4 / 3, 2.0):
        for _ in range(200):
            a = rng.random(rng.integers(1, 9))
            b = rng.random(rng.integers(1, 9))
            a, b = a / a.sum(), b / b.sum()
            joint = np.outer(a, b).ravel()
            joint /= joint.sum()
            lhs = tsallis_entropy(joint, q)
            rhs = entropy_composition(tsallis_entropy(a, q), tsallis_entropy(b, q), q)
            assert abs(lhs - rhs) < 1e-12
    # equiprobable extremum
    for q in (0.5, 1.0, 4 / 3, 2.0):
        for W in (1, 2, 5, 30):
            for _ in range(50):
                p = rng.random(W)
                assert tsallis_entropy(p / p.sum(), q) <= max_entropy(W, q) + 1e-12
    # tail exponent 1/(q-1) = 3 at q = 4/3
    r1, r2 = (q_exp(-s, 4 / 3) * s**3 for s in (1e3, 1e4))
    assert abs(r2 / r1 - 1) < 0.01
    elapsed = time.perf_counter() - start
    record_property("seconds", f"{elapsed:.2f}")
    assert elapsed < 5.0


@pytest.mark.acceptance(9, "Sampler validation (KS < 2/sqrt(n), median vs quadrature)")
def test_sampler_validation(record_property):
    n = 10**6
    ds = []
    for seed in range(5):
        c = np.sort(sample_continuous(SyntheticSpec(4 / 3, 5.0, 1, mode="sampled", n_samples=n, seed=seed)))
        F = cdf(c, 4 / 3, 5.0)
        i = np.arange(1, n + 1)
        ds.append(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
    record_property("KS*sqrt(n)", ", ".join(f"{d * math.sqrt(n):.2f}" for d in ds))
    assert all(d < 2 / math.sqrt(n) for d in ds)

    def quad_cdf(x):
        return integrate.quad(lambda t: (2 - 4 / 3) / 3 * (1 + t / 9) ** -3, 0, x, epsabs=1e-13)[0]

    median = optimize.brentq(lambda x: quad_cdf(x) - 0.5, 0, 100, xtol=1e-12)
    assert abs(median - 9 * (math.sqrt(2) - 1)) < 1e-6
    assert abs(sample_citation(0.5, 4 / 3, 3.0) - median) < 1e-6


@pytest.mark.acceptance(10, "Determinism of synth -> fit -> rank -> plot")
def test_pipeline_determinism(tmp_path, twin_params, record_property):
    specs = [
        {"entity": e, "q_true": q, "T_true": T, "anchor_value": n2, "c_max": 20000} for e, q, T, n2 in twin_params
    ]
    specs.append(
        {"entity": "Sampled", "q_true": 4 / 3, "T_true": 5.0, "anchor_value": 1, "mode": "sampled",
         "n_samples": 200000, "seed": 42}
    )  # fmt: skip
    spec_file = tmp_path / "specs.json"
    spec_file.write_text(json.dumps(specs))

    def run(root):
        assert main(["synth", str(spec_file), str(root / "data")]) == 0
        assert main(["fit", str(root / "data"), "-o", str(root / "out")]) == 0
        assert main(["rank", str(root / "out" / "results.csv"), "--summary", str(root / "data"), "-o", str(root / "out")]) == 0
        for style in ("loglog", "qlog"):
            assert main(["plot", str(root / "data"), str(root / "out" / "results.json"), "--style", style,
                         "--xlim", "300", "-o", str(root / "plots")]) == 0  # fmt: skip
        files = sorted(p for p in root.rglob("*") if p.is_file() and not p.name.startswith("manifest_"))
        return {str(p.relative_to(root)): p.read_bytes() for p in files}

    a, b = run(tmp_path / "a"), run(tmp_path / "b")
    record_property("files compared", len(a))
    assert a.keys() == b.keys()
    assert len(a) > 40
    for name in a:
        assert a[name] == b[name], name
