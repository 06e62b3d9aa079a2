"""Named experiments over a grid of dimensions and seeds.

Each experiment produces rows of measured functionals, a summary (slopes,
measured constants) and a list of named assertions. Reports are plain JSON
and CSV; the content depends only on the configuration, so replaying a
configuration reproduces the files byte for byte. Wall-clock timings are
kept out of the report and written to a separate ``.timing.json`` file.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .constructions import (
    ellipsoid_blocks, ellipsoid_cover, extract_cover_from_partition, gamma_bruteforce,
    gamma_partition, lq_cover, rotation_cover_b2,
)
from .distributions import RandomFamily
from .functionals import (
    b_sup, compare, little_m, sandwich_holds, solve, stable_ball_mean, truncation_curve,
)
from .geometry import (
    Ellipsoid, FinitePointSet, L1Ball, L2Ball, LinearImageLq, LqBall, canonical_cover,
    containment_probe, haar_orthogonal, holder_dual, member_abs_hull,
)
from .rng import derive_seed, ordered_map, stream

EXPERIMENTS = ("b1", "b2", "ellipsoid", "bq", "stable-counterexample", "gamma", "sandwich")

DEFAULT_DIMS = {
    "b1": [2, 8, 32, 128],
    "b2": [8, 16, 32, 64],
    "ellipsoid": [8, 16, 32],
    "bq": [8, 32],
    "stable-counterexample": [8, 16, 32, 64, 128],
    "gamma": [8],
    "sandwich": [8],
}
DEFAULT_FAMILY = {"stable-counterexample": "stable p=1.5"}
DEFAULT_INSTANCES = {"ellipsoid": 10, "gamma": 50, "sandwich": 50}

# tolerances of the asserted invariants
PROBE_TOL = 1e-2
B1_CONSTANT = 4.0 * 1.05
B2_GROWTH = 3.0
ELLIPSOID_BAND = 3.0
BQ_BAND = 2.0
SLOPE_TOL = 0.08
GAP_SLACK = 0.1
GAMMA_C = 50.0
GAMMA_BAND = (0.05, 200.0)
LITTLE_GAMMA = 10.0
LITTLE_BAND = (1 / 150, 150.0)


@dataclass
class ExperimentConfig:
    experiment: str
    family: str = ""
    dims: list = field(default_factory=list)
    seeds: list = field(default_factory=lambda: [0])
    mc: int = 200_000
    directions: int = 10_000
    trials: int = 64
    instances: int = 0
    q_values: list = field(default_factory=lambda: [3.0, 4.0, "inf"])
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if not self.dims:
            self.dims = list(DEFAULT_DIMS[self.experiment])
        if not self.family:
            self.family = DEFAULT_FAMILY.get(self.experiment, "gaussian")
        if not self.instances:
            self.instances = DEFAULT_INSTANCES.get(self.experiment, 1)
        self.dims = [int(n) for n in self.dims]
        self.seeds = [int(s) for s in self.seeds]
        if not self.dims or min(self.dims) < 1:
            raise ValueError("dims must be a nonempty list of positive integers")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        for name in ("mc", "directions", "trials", "instances", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        fam = RandomFamily.parse(self.family)
        if self.experiment == "stable-counterexample":
            if fam.kind != "stable":
                raise ValueError("stable-counterexample needs a stable family")
            if len(set(self.dims)) < 2:
                raise ValueError("a slope fit needs at least two distinct dims")

    @property
    def random_family(self) -> RandomFamily:
        return RandomFamily.parse(self.family)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)


@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list
    summary: dict
    assertions: list
    timings: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def failed(self) -> list:
        return [a for a in self.assertions if not a.passed]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": self.rows,
            "summary": self.summary,
            "assertions": [asdict(a) for a in self.assertions],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        cols = []
        for r in self.rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: _csv_cell(r.get(k)) for k in cols})
        return buf.getvalue()

    def write(self, out: str | Path) -> list[Path]:
        base = Path(out)
        if base.suffix in (".json", ".csv"):
            base = base.with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        paths = [base.with_suffix(".json"), base.with_suffix(".csv")]
        paths[0].write_text(self.to_json())
        paths[1].write_text(self.to_csv())
        timing = base.parent / (base.name + ".timing.json")
        timing.write_text(json.dumps({"rows": self.timings, "total": sum(self.timings)}, indent=2) + "\n")
        return paths + [timing]


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(_clean(v), sort_keys=True)
    return v


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# ---------------------------------------------------------------------------
# shared row helpers
# ---------------------------------------------------------------------------

def _functional_fields(rep) -> dict:
    d = {
        "m_tilde": rep.m_tilde.value, "m_tilde_stderr": rep.m_tilde.stderr,
        "m_big": rep.m_big.value, "m_big_stderr": rep.m_big.stderr,
        "sandwich_ok": rep.sandwich_ok, "violation": rep.violation,
    }
    if rep.b_sup is not None:
        d.update({"b_sup": rep.b_sup.value, "b_sup_stderr": rep.b_sup.stderr,
                  "ratio": rep.ratio})
    if rep.m_little is not None:
        d["m_little"] = rep.m_little.value
    return d


def _probe_fields(T, cover, cfg, seed) -> dict:
    pr = containment_probe(T, cover, cfg.directions, seed)
    return {"size": cover.size, "worst_ratio": pr.worst_ratio, "exact_ok": pr.exact_ok,
            "probe_ok": pr.consistent(PROBE_TOL)}


def _common_assertions(rows, sizes_cap=None) -> list:
    out = [
        Assertion("containment", all(r["probe_ok"] for r in rows),
                  f"max worst_ratio {max(r['worst_ratio'] for r in rows):.4g}"),
        Assertion("upper-bound", not any(r["violation"] for r in rows),
                  f"{sum(r['violation'] for r in rows)} rows with b_sup > m_big + 4 sigma"),
    ]
    if sizes_cap:
        out.append(Assertion("cover-size", all(r["size"] <= sizes_cap(r["n"]) for r in rows),
                             "|S| <= 10 n^2"))
    return out


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _b1_row(cfg, fam, n, seed, _):
    T = L1Ball(n)
    cover = canonical_cover(n)
    row = {"n": n, "seed": seed, **_probe_fields(T, cover, cfg, seed)}
    row.update(_functional_fields(compare(T, cover, fam, count=cfg.mc, seed=seed)))
    return row


def _b1_check(cfg, rows):
    worst = max(r["ratio"] for r in rows)
    summary = {"max_ratio": worst}
    return summary, _common_assertions(rows) + [
        Assertion("b1-constant", worst <= B1_CONSTANT, f"max M/b = {worst:.4f} vs {B1_CONSTANT}")]


def _b2_row(cfg, fam, n, seed, _):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cover, diag = rotation_cover_b2(n, fam, cfg.trials, seed=seed, workers=cfg.workers)
    T = L2Ball(n)
    row = {"n": n, "seed": seed, **_probe_fields(T, cover, cfg, seed)}
    row.update(_functional_fields(compare(T, cover, fam, count=cfg.mc, seed=seed)))
    row.update({"m_big_over_sqrt_n": row["m_big"] / math.sqrt(n),
                "selected_sum": diag.achieved, "mean_sum": diag.mean})
    return row


def _per_dim_mean(rows, key):
    dims = sorted({r["n"] for r in rows})
    return dims, [float(np.mean([r[key] for r in rows if r["n"] == n])) for n in dims]


def _b2_check(cfg, rows):
    dims, c = _per_dim_mean(rows, "m_big_over_sqrt_n")
    growth = max(c) / c[0]
    summary = {"m_big_over_sqrt_n": dict(zip(map(str, dims), c)), "growth": growth,
               "slope_m_big": loglog_slope(*_per_dim_mean(rows, "m_big")) if len(dims) > 1 else None}
    return summary, _common_assertions(rows, lambda n: 10 * n * n) + [
        Assertion("b2-bounded", growth <= B2_GROWTH,
                  f"max_n (M/sqrt n) / value at n={dims[0]} = {growth:.4f}"),
        Assertion("selection", all(r["selected_sum"] <= r["mean_sum"] * (1 + 1e-12) for r in rows),
                  "chosen rotation beats the trial mean")]


def random_ellipsoid(n: int, seed: int) -> Ellipsoid:
    """Semi-axes ``exp(-u)`` with ``u`` uniform on ``[0, 3]`` along a Haar basis."""
    rng = stream(seed, f"ellipsoid-{n}")
    a = np.exp(-rng.uniform(0.0, 3.0, n))
    return Ellipsoid(haar_orthogonal(n, derive_seed(seed, "ellipsoid-basis", n)), a)


def _ellipsoid_row(cfg, fam, n, seed, inst):
    s = derive_seed(seed, "ellipsoid", n, inst)
    E = random_ellipsoid(n, s)
    dec = ellipsoid_blocks(E.a, E.U)
    problems = dec.check()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cover = ellipsoid_cover(E, fam, cfg.trials, seed=s, workers=cfg.workers)
    row = {"n": n, "seed": seed, "instance": inst, "blocks": len(dec.blocks),
           "level_mass": dec.level_mass(), "weight_mass": dec.weight_mass(),
           "decomposition_ok": not problems, **_probe_fields(E, cover, cfg, s)}
    row.update(_functional_fields(compare(E, cover, fam, count=cfg.mc, seed=s)))
    return row


def _ellipsoid_check(cfg, rows):
    ratios = [r["ratio"] for r in rows]
    band = max(ratios) / min(ratios)
    summary = {"ratio_min": min(ratios), "ratio_max": max(ratios), "band": band}
    return summary, _common_assertions(rows, lambda n: 10 * n * n) + [
        Assertion("decomposition", all(r["decomposition_ok"] for r in rows),
                  "dyadic block invariants"),
        Assertion("ellipsoid-band", band <= ELLIPSOID_BAND,
                  f"M/b spans a factor {band:.4f}")]


def _bq_grid(cfg):
    return [(n, s, q) for n in cfg.dims for s in cfg.seeds for q in cfg.q_values]


def _q(q) -> float:
    return math.inf if q in ("inf", math.inf) else float(q)


def _bq_row(cfg, fam, n, seed, qv):
    q = _q(qv)
    T = LqBall(n, q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cover = lq_cover(np.eye(n), q, fam, trials=cfg.trials, seed=seed, workers=cfg.workers)
        A = stream(seed, f"bq-matrix-{n}").standard_normal((n, n))
        cover_a = lq_cover(A, q, fam, trials=cfg.trials, seed=seed, workers=cfg.workers)
    row = {"n": n, "seed": seed, "q": qv, **_probe_fields(T, cover, cfg, seed)}
    row.update(_functional_fields(compare(T, cover, fam, count=cfg.mc, seed=seed)))
    pa = containment_probe(LinearImageLq(A, q), cover_a, cfg.directions, seed)
    row.update({"b_over_n_pow": row["b_sup"] / n ** (1 / holder_dual(q)),
                "image_worst_ratio": pa.worst_ratio, "image_probe_ok": pa.consistent(PROBE_TOL)})
    return row


def _bq_check(cfg, rows):
    v = [r["b_over_n_pow"] for r in rows]
    band = max(v) / min(v)
    return {"band": band, "b_over_n_pow_min": min(v), "b_over_n_pow_max": max(v)}, \
        _common_assertions(rows, lambda n: 10 * n * n) + [
            Assertion("image-containment", all(r["image_probe_ok"] for r in rows),
                      "covers of A B_q^n"),
            Assertion("bq-band", band <= BQ_BAND, f"b/n^(1/q') spans a factor {band:.4f}")]


def _stable_row(cfg, fam, n, seed, _):
    if fam.kind != "stable":
        raise ValueError("stable-counterexample needs a stable family")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cover, _d = rotation_cover_b2(n, fam, cfg.trials, seed=seed, workers=cfg.workers)
    T = L2Ball(n)
    b_mc = b_sup(T, fam, count=cfg.mc, seed=seed)
    b_mix = stable_ball_mean(n, fam, count=cfg.mc, seed=seed)
    sol = solve(truncation_curve(cover.points, fam, count=cfg.mc, seed=seed))
    se = math.hypot(b_mix.stderr, sol.m_big.stderr)
    row = {"n": n, "seed": seed, **_probe_fields(T, cover, cfg, seed),
           "b_sup": b_mix.value, "b_sup_stderr": b_mix.stderr,
           "b_sup_mc": b_mc.value, "b_sup_mc_stderr": b_mc.stderr,
           "m_tilde": sol.m_tilde.value, "m_big": sol.m_big.value, "m_big_stderr": sol.m_big.stderr,
           "sandwich_ok": sandwich_holds(sol.m_tilde, sol.m_big),
           "violation": b_mix.value > sol.m_big.value + 4 * se}
    row["ratio"] = row["m_big"] / row["b_sup"]
    return row


def _stable_check(cfg, rows):
    p = cfg.random_family.params[0]
    dims, b = _per_dim_mean(rows, "b_sup")
    _, bmc = _per_dim_mean(rows, "b_sup_mc")
    _, ratio = _per_dim_mean(rows, "ratio")
    sb, sr = loglog_slope(dims, b), loglog_slope(dims, ratio)
    gap = 1 / p - 0.5
    summary = {"p": p, "slope_b_sup": sb, "slope_b_sup_mc": loglog_slope(dims, bmc),
               "slope_ratio": sr, "target_slope_b": 1 / p, "target_slope_ratio": gap}
    return summary, _common_assertions(rows) + [
        Assertion("stable-b-slope", abs(sb - 1 / p) <= SLOPE_TOL,
                  f"slope {sb:.4f} vs 1/p = {1 / p:.4f}"),
        Assertion("stable-gap-slope", sr >= gap - GAP_SLACK,
                  f"slope of M/b {sr:.4f} vs {gap:.4f} - {GAP_SLACK}")]


def _gamma_grid(cfg):
    return [(max(cfg.dims), s, i) for s in cfg.seeds for i in range(cfg.instances)]


def random_point_set(max_dim: int, seed: int, instance: int) -> np.ndarray:
    """Random finite set; the first ten instances have at most five points."""
    rng = stream(seed, "gamma-set", instance)
    size = int(rng.integers(2, 6)) if instance < 10 else int(rng.integers(2, 33))
    dim = int(rng.integers(1, max_dim + 1))
    return rng.standard_normal((size, dim))


def _gamma_row(cfg, fam, max_dim, seed, inst):
    P = random_point_set(max_dim, seed, inst)
    g = gamma_partition(P, fam, seed=seed)
    ex = extract_cover_from_partition(g.tree, fam, seed=seed)
    S = ex.cover.points
    pairs_ok = all(member_abs_hull(P[i] - P[j], S, tol=1e-7).member
                   for i in range(len(P)) for j in range(i + 1, len(P)))
    b = b_sup(FinitePointSet(P), fam, count=cfg.mc, seed=seed)
    ml = little_m(S, fam, seed=seed).estimate.value
    i, j = np.triu_indices(len(P), 1)
    diffs = FinitePointSet(np.vstack([P[i] - P[j], P[j] - P[i]]))
    cmp = compare(diffs, ex.cover, fam, count=cfg.mc, seed=seed)
    row = {"n": P.shape[1], "seed": seed, "instance": inst, "points": len(P),
           "gamma_upper": g.gamma_upper, "b_sup": b.value, "b_sup_stderr": b.stderr,
           "b_over_gamma": b.value / g.gamma_upper, "cover_size": ex.cover.size,
           "radius": ex.radius, "pairs_ok": pairs_ok, "m_little": ml,
           "little_over_gamma": ml / g.gamma_upper,
           "b_diff": cmp.b_sup.value, "m_big": cmp.m_big.value, "violation": cmp.violation}
    if len(P) <= 5:
        brute = gamma_bruteforce(P, fam, seed=seed)
        row["gamma_brute"] = brute
        row["brute_match"] = bool(abs(brute - g.gamma_upper) <= 1e-12 * max(1.0, brute))
    return row


def _gamma_check(cfg, rows):
    C = max(r["b_over_gamma"] for r in rows)
    band = [r["gamma_upper"] / r["b_sup"] for r in rows]
    lg = max(r["little_over_gamma"] for r in rows)
    brute = [r["brute_match"] for r in rows if "brute_match" in r]
    summary = {"measured_C": C, "gamma_over_b_min": min(band), "gamma_over_b_max": max(band),
               "little_over_gamma_max": lg, "brute_checked": len(brute)}
    return summary, [
        Assertion("gamma-constant", C <= GAMMA_C, f"b <= C gamma with C = {C:.4f}"),
        Assertion("gamma-band", GAMMA_BAND[0] <= min(band) and max(band) <= GAMMA_BAND[1],
                  f"gamma/b in [{min(band):.4g}, {max(band):.4g}]"),
        Assertion("extracted-hull", all(r["pairs_ok"] for r in rows),
                  "all pairwise differences in conv(S u -S)"),
        Assertion("upper-bound", not any(r["violation"] for r in rows),
                  f"{sum(r['violation'] for r in rows)} rows with b(T - T) > m_big + 4 sigma"),
        Assertion("little-vs-gamma", lg <= LITTLE_GAMMA, f"max m/gamma = {lg:.4f}"),
        Assertion("brute-force", bool(brute) and all(brute),
                  f"{sum(brute)}/{len(brute)} small sets match exhaustive search")]


def _sandwich_grid(cfg):
    return [(max(cfg.dims), s, i) for s in cfg.seeds for i in range(cfg.instances)]


def random_points(max_dim: int, seed: int, instance: int, max_size: int = 16) -> np.ndarray:
    rng = stream(seed, "sandwich-set", instance)
    n = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, max_size + 1))
    S = rng.standard_normal((m, n))
    # sparsify some rows so single-coordinate points appear too
    S *= rng.random((m, n)) < rng.uniform(0.3, 1.0)
    return S


def _sandwich_row(cfg, fam, max_dim, seed, inst):
    S = random_points(max_dim, seed, inst)
    s = derive_seed(seed, "sandwich", inst)
    sol = solve(truncation_curve(S, fam, count=cfg.mc, seed=s, workers=1))
    row = {"n": S.shape[1], "seed": seed, "instance": inst, "points": len(S),
           "m_tilde": sol.m_tilde.value, "m_tilde_stderr": sol.m_tilde.stderr,
           "m_big": sol.m_big.value, "m_big_stderr": sol.m_big.stderr,
           "sandwich_ok": sandwich_holds(sol.m_tilde, sol.m_big)}
    if math.log(math.e + len(S)) < fam.moment_limit:
        ml = little_m(S, fam, seed=s, count=min(cfg.mc, 50_000)).estimate.value
        row["m_little"] = ml
        row["little_over_big"] = ml / sol.m_big.value if sol.m_big.value > 0 else None
    return row


def _sandwich_check(cfg, rows):
    lb = [r["little_over_big"] for r in rows if r.get("little_over_big") is not None]
    summary = {"instances": len(rows), "sandwich_failures": sum(not r["sandwich_ok"] for r in rows)}
    out = [Assertion("sandwich", all(r["sandwich_ok"] for r in rows),
                     f"{summary['sandwich_failures']} failures over {len(rows)} instances")]
    if lb:
        summary.update({"little_over_big_min": min(lb), "little_over_big_max": max(lb)})
        out.append(Assertion("little-equivalence", LITTLE_BAND[0] <= min(lb) and max(lb) <= LITTLE_BAND[1],
                             f"m/M in [{min(lb):.4g}, {max(lb):.4g}]"))
    return summary, out


def _dim_grid(cfg):
    return [(n, s, None) for n in cfg.dims for s in cfg.seeds]


def _ellipsoid_grid(cfg):
    return [(n, s, i) for n in cfg.dims for s in cfg.seeds for i in range(cfg.instances)]


_RUNNERS = {
    "b1": (_dim_grid, _b1_row, _b1_check),
    "b2": (_dim_grid, _b2_row, _b2_check),
    "ellipsoid": (_ellipsoid_grid, _ellipsoid_row, _ellipsoid_check),
    "bq": (_bq_grid, _bq_row, _bq_check),
    "stable-counterexample": (_dim_grid, _stable_row, _stable_check),
    "gamma": (_gamma_grid, _gamma_row, _gamma_check),
    "sandwich": (_sandwich_grid, _sandwich_row, _sandwich_check),
}


def run(config: ExperimentConfig, out: Optional[str | Path] = None) -> ExperimentReport:
    """Run ``config`` and optionally write ``<out>.json``/``<out>.csv``.

    Grid points run on ``config.workers`` threads; rows come back in grid
    order whatever the scheduling.
    """
    grid, make_row, check = _RUNNERS[config.experiment]
    fam = config.random_family

    def one(point):
        t0 = time.perf_counter()
        row = make_row(config, fam, *point)
        return row, time.perf_counter() - t0

    results = list(ordered_map(one, grid(config), config.workers))
    rows = [_clean(r) for r, _ in results]
    summary, assertions = check(config, rows)
    rep = ExperimentReport(config, rows, _clean(summary), assertions,
                           [round(t, 6) for _, t in results])
    if out is not None:
        rep.write(out)
    return rep
