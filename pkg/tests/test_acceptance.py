"""Acceptance suite: one test per criterion, each recording a pass/fail line.

Experiment reports are cached so the upper-bound criterion can aggregate the
``violation`` flags of every cover built by the other criteria.
"""

import functools
import json
import math
import time

import numpy as np
import pytest
from scipy import optimize

from hullcover.distributions import RandomFamily
from hullcover.experiments import ExperimentConfig, run
from hullcover.functionals import big_m, little_m, tilde_m

pytestmark = pytest.mark.slow

_ELAPSED = {}


@functools.lru_cache(maxsize=None)
def report(name: str, family: str = "", **kw):
    cfg = ExperimentConfig(name, family=family, **kw)
    t0 = time.perf_counter()
    rep = run(cfg)
    _ELAPSED[(name, family, tuple(sorted(kw.items())))] = time.perf_counter() - t0
    return rep


def elapsed(name, family="", **kw):
    return _ELAPSED[(name, family, tuple(sorted(kw.items())))]


def assertion(rep, name):
    (a,) = [a for a in rep.assertions if a.name == name]
    return a


SANDWICH_FAMILIES = ["gaussian", "rademacher", "uniform", "student df=9", "weibull shape=0.5"]
B1_FAMILIES = ["gaussian", "rademacher", "weibull shape=0.5", "student df=9"]
B2_FAMILIES = ["gaussian", "student df=9"]
STABLE_FAMILIES = ["stable p=1.2", "stable p=1.5"]
SANDWICH_MC = 100_000


def test_criterion_01_sandwich(acceptance):
    total = ok = 0
    secs = 0.0
    for fam in SANDWICH_FAMILIES:
        rep = report("sandwich", fam, instances=40, mc=SANDWICH_MC)
        secs += elapsed("sandwich", fam, instances=40, mc=SANDWICH_MC)
        total += len(rep.rows)
        ok += sum(r["sandwich_ok"] for r in rep.rows)
    passed = total >= 200 and ok == total and secs < 120
    acceptance(1, passed, f"sandwich M~ <= M <= 2 M~ on {ok}/{total} instances "
                          f"({len(SANDWICH_FAMILIES)} laws), {secs:.1f} s (limit 120 s)")
    assert passed


def test_criterion_03_b1_constant(acceptance):
    worst, secs, bad = 0.0, 0.0, []
    for fam in B1_FAMILIES:
        rep = report("b1", fam)
        secs += elapsed("b1", fam)
        worst = max(worst, rep.summary["max_ratio"])
        bad += [f"{fam}:{a.name}" for a in rep.failed()]
    passed = worst <= 4 * 1.05 and not bad and secs < 120
    acceptance(3, passed, f"B1 max M/b = {worst:.4f} (limit 4.2), n in 2..128, "
                          f"{secs:.1f} s (limit 120 s){' failed: ' + ', '.join(bad) if bad else ''}")
    assert passed


def test_criterion_04_b2(acceptance):
    parts, secs, bad = [], 0.0, []
    for fam in B2_FAMILIES:
        rep = report("b2", fam)
        secs += elapsed("b2", fam)
        parts.append(f"{fam}: growth {rep.summary['growth']:.3f}, "
                     f"worst probe {max(r['worst_ratio'] for r in rep.rows):.3f}")
        sizes_ok = all(r["size"] <= 10 * r["n"] ** 2 for r in rep.rows)
        probes_ok = all(r["worst_ratio"] <= 1 + 1e-2 for r in rep.rows)
        if not (sizes_ok and probes_ok and rep.summary["growth"] <= 3):
            bad.append(fam)
    passed = not bad and secs < 300
    acceptance(4, passed, "; ".join(parts) + f"; {secs:.1f} s (limit 300 s)")
    assert passed


def test_criterion_05_ellipsoid(acceptance):
    parts, secs, bad = [], 0.0, []
    for fam in B2_FAMILIES:
        rep = report("ellipsoid", fam)
        secs += elapsed("ellipsoid", fam)
        decomposition = all(r["decomposition_ok"] for r in rep.rows)
        band = rep.summary["band"]
        parts.append(f"{fam}: band {band:.3f} over {len(rep.rows)} ellipsoids")
        if not (decomposition and band <= 3 and len(rep.rows) == 30):
            bad.append(fam)
    passed = not bad and secs < 300
    acceptance(5, passed, "; ".join(parts) + f"; {secs:.1f} s (limit 300 s)")
    assert passed


def test_criterion_06_lq(acceptance):
    rep = report("bq")
    secs = elapsed("bq")
    band = rep.summary["band"]
    probes = all(r["probe_ok"] and r["image_probe_ok"] for r in rep.rows)
    qs = sorted({str(r["q"]) for r in rep.rows})
    passed = band <= 2 and probes and secs < 180
    acceptance(6, passed, f"b/n^(1/q') band {band:.3f} (limit 2) for q in {qs}, probes "
                          f"{'ok' if probes else 'FAILED'}, {secs:.1f} s (limit 180 s)")
    assert passed


def test_criterion_07_stable(acceptance):
    parts, secs, bad = [], 0.0, []
    for fam in STABLE_FAMILIES:
        rep = report("stable-counterexample", fam)
        secs += elapsed("stable-counterexample", fam)
        p = rep.summary["p"]
        sb, sr = rep.summary["slope_b_sup"], rep.summary["slope_ratio"]
        parts.append(f"p={p}: slope b {sb:.3f} (1/p {1 / p:.3f}), slope M/b {sr:.3f} "
                     f"(>= {1 / p - 0.5 - 0.1:.3f})")
        if not (abs(sb - 1 / p) <= 0.08 and sr >= 1 / p - 0.5 - 0.1):
            bad.append(fam)
    passed = not bad and secs < 300
    acceptance(7, passed, "; ".join(parts) + f"; {secs:.1f} s (limit 300 s)")
    assert passed


def test_criterion_08_gamma(acceptance):
    rep = report("gamma")
    secs = elapsed("gamma")
    s = rep.summary
    checks = {a.name: a.passed for a in rep.assertions}
    passed = (len(rep.rows) == 50 and max(r["points"] for r in rep.rows) <= 32
              and max(r["n"] for r in rep.rows) <= 8 and s["measured_C"] <= 50
              and checks["extracted-hull"] and s["little_over_gamma_max"] <= 10
              and checks["brute-force"] and secs < 180)
    acceptance(8, passed, f"C = {s['measured_C']:.3f} (limit 50), m/gamma <= "
                          f"{s['little_over_gamma_max']:.3f} (limit 10), hull "
                          f"{'ok' if checks['extracted-hull'] else 'FAILED'}, brute force "
                          f"{s['brute_checked']} sets {'match' if checks['brute-force'] else 'DIFFER'}, "
                          f"{secs:.1f} s (limit 180 s)")
    assert passed


def test_criterion_09_oracles(acceptance):
    g = RandomFamily.gaussian()
    root = optimize.brentq(lambda m: math.sqrt(2 / math.pi) * math.exp(-m * m / 2) - m, 0, 2)
    mt = tilde_m([[1.0]], g).value
    mb = big_m([[1.0]], g).value
    rng = np.random.default_rng(2024)
    agree = 0
    fams = [g, RandomFamily.rademacher(), RandomFamily.uniform(), RandomFamily.student(9)]
    for i in range(100):
        S = rng.standard_normal((int(rng.integers(1, 7)), int(rng.integers(1, 6))))
        fam = fams[i % len(fams)]
        h = little_m(S, fam, count=20_000, seed=i).estimate.value
        e = little_m(S, fam, mode="exact-small", count=20_000, seed=i).estimate.value
        agree += math.isclose(h, e, rel_tol=1e-12)
    ok_t = abs(mt - 0.647) <= 0.01 and abs(mt - root) <= 1e-6
    ok_b = abs(mb - math.sqrt(2 / math.pi)) <= 0.01
    passed = ok_t and ok_b and agree == 100
    acceptance(9, passed, f"M~ = {mt:.5f} (root {root:.5f}), M = {mb:.5f} "
                          f"(sqrt(2/pi) {math.sqrt(2 / math.pi):.5f}), little_m heuristic = exact "
                          f"on {agree}/100")
    assert passed


DETERMINISM = [
    ("b1", dict(dims=[2, 8], mc=20_000, directions=2000)),
    ("b2", dict(dims=[8, 16], mc=20_000, directions=2000, trials=8, family="student df=9")),
    ("ellipsoid", dict(dims=[8], instances=3, mc=20_000, directions=2000, trials=8)),
    ("bq", dict(dims=[8], mc=20_000, directions=2000, trials=8, family="uniform")),
    ("stable-counterexample", dict(dims=[8, 16], mc=20_000, directions=2000, trials=8)),
    ("gamma", dict(instances=12, mc=20_000)),
    ("sandwich", dict(instances=20, mc=20_000, family="weibull shape=0.5", workers=3)),
]


def test_criterion_10_determinism(acceptance, tmp_path):
    same = []
    for name, kw in DETERMINISM:
        a = run(ExperimentConfig(name, **kw), out=tmp_path / f"{name}-a")
        cfg = ExperimentConfig.from_dict(json.loads(a.to_json())["config"])
        run(cfg, out=tmp_path / f"{name}-b")
        same.append(all((tmp_path / f"{name}-a{ext}").read_bytes()
                        == (tmp_path / f"{name}-b{ext}").read_bytes() for ext in (".json", ".csv")))
    passed = all(same)
    acceptance(10, passed, f"byte-identical JSON and CSV on replay for {sum(same)}/{len(same)} "
                           "experiments")
    assert passed


def test_criterion_02_upper_bound(acceptance):
    # every cover built above: b1, b2, ellipsoid, bq, stable and gamma extractions
    reps = ([report("b1", f) for f in B1_FAMILIES] + [report("b2", f) for f in B2_FAMILIES]
            + [report("ellipsoid", f) for f in B2_FAMILIES] + [report("bq")]
            + [report("stable-counterexample", f) for f in STABLE_FAMILIES] + [report("gamma")])
    rows = [r for rep in reps for r in rep.rows]
    bad = sum(bool(r["violation"]) for r in rows)
    passed = bad == 0 and len(rows) > 0
    acceptance(2, passed, f"b_X(T) <= M_X(S) + 4 sigma on {len(rows) - bad}/{len(rows)} covers")
    assert passed
