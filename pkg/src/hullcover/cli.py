"""Command line entry point: ``hullcover {estimate,cover,verify,experiment}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import constructions as con
from .distributions import DEFAULT_MC, RandomFamily
from .experiments import EXPERIMENTS, ExperimentConfig, random_ellipsoid, run
from .functionals import (
    FunctionalReport, compare, little_m, sandwich_holds, solve, truncation_curve,
)
from .geometry import (
    FinitePointSet, HullCover, IndexSet, L1Ball, L2Ball, LqBall, canonical_cover,
    containment_probe, index_set_from_dict,
)
from .rng import stream

log = logging.getLogger("hullcover")


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_index_set(spec: str) -> IndexSet:
    """``l1:N``, ``l2:N``, ``lq:N:Q`` or a JSON file holding an index set."""
    head = spec.split(":")
    if head[0] in ("l1", "l2", "lq") and len(head) >= 2:
        n = int(head[1])
        if head[0] == "l1":
            return L1Ball(n)
        if head[0] == "l2":
            return L2Ball(n)
        return LqBall(n, math.inf if head[2] == "inf" else float(head[2]))
    d = _load_json(spec)
    return index_set_from_dict(d.get("index_set", d))


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"cannot read {path}: {exc}")


def load_cover(path: str) -> HullCover:
    d = _load_json(path)
    return HullCover.from_dict(d.get("cover", d))


def load_points(path: str) -> np.ndarray:
    d = _load_json(path)
    if isinstance(d, dict):
        d = d.get("points", d.get("cover", {}).get("points"))
    return np.atleast_2d(np.asarray(d, dtype=float))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _report_csv(d: dict) -> str:
    rows = ["functional,value,stderr,count,seed"]
    for key in ("m_tilde", "m_big", "m_little", "b_sup"):
        e = d.get(key)
        if e:
            rows.append(f"{key},{e['value']!r},{e['stderr']!r},{e['count']},{e['seed']}")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_estimate(args) -> int:
    fam = RandomFamily.parse(args.family)
    if args.cover:
        cover = load_cover(args.cover)
    elif args.points:
        P = load_points(args.points)
        cover = HullCover(np.zeros(P.shape[1]), P, "Canonical", 1.0, {"source": args.points})
    else:
        raise SystemExit("estimate needs --cover or --points")
    if args.set:
        rep = compare(parse_index_set(args.set), cover, fam, count=args.mc, seed=args.seed,
                      little=args.little)
    else:
        sol = solve(truncation_curve(cover.points, fam, count=args.mc, seed=args.seed))
        ml = None
        if args.little:
            ml = little_m(cover.points, fam, mode=args.little, seed=args.seed).estimate
        rep = FunctionalReport(sol.m_tilde, sol.m_big, ml, None,
                               sandwich_holds(sol.m_tilde, sol.m_big))
    print(rep.table())
    if args.out:
        d = rep.to_dict()
        d["family"] = fam.to_dict()
        _emit(_dump(d) if args.format == "json" else _report_csv(d), args.out)
    return 0


def _build_cover(args, fam):
    n = args.n
    c = args.construction
    if c == "canonical":
        return canonical_cover(n), L1Ball(n)
    if c == "net":
        return con.block_cover_b2(n, n, seed=args.seed), L2Ball(n)
    if c == "block":
        return con.block_cover_b2(n, args.k or con.block_dimension(n), seed=args.seed), L2Ball(n)
    if c == "rotation":
        cover, _ = con.rotation_cover_b2(n, fam, args.trials, seed=args.seed, c_log=args.c_log)
        return cover, L2Ball(n)
    if c == "ellipsoid":
        E = parse_index_set(args.set) if args.set else random_ellipsoid(n, args.seed)
        return con.ellipsoid_cover(E, fam, args.trials, seed=args.seed, c_log=args.c_log), E
    if c == "lq":
        q = math.inf if args.q == "inf" else float(args.q)
        cover = con.lq_cover(np.eye(n), q, fam, trials=args.trials, seed=args.seed, c_log=args.c_log)
        return cover, LqBall(n, q)
    if c == "gamma":
        if args.points:
            P = load_points(args.points)
        else:
            P = stream(args.seed, "cli-points").standard_normal((16, n))
        g = con.gamma_partition(P, fam, seed=args.seed)
        ex = con.extract_cover_from_partition(g.tree, fam, seed=args.seed)
        ex.cover.params["gamma_upper"] = g.gamma_upper
        i, j = np.triu_indices(len(P), 1)
        diffs = np.vstack([P[i] - P[j], P[j] - P[i]]) if len(P) > 1 else np.zeros((1, P.shape[1]))
        return ex.cover, FinitePointSet(diffs)
    raise SystemExit(f"unknown construction {c!r}")


def cmd_cover(args) -> int:
    fam = RandomFamily.parse(args.family)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        cover, T = _build_cover(args, fam)
    for w in caught:
        log.warning("%s", w.message)
    cover.params.setdefault("construction", args.construction)
    doc = {"cover": cover.to_dict(), "index_set": T.to_dict()}
    _emit(_dump(doc), args.out)
    if args.set_out:
        _emit(_dump(T.to_dict()), args.set_out)
    if args.out:
        print(f"{args.construction}: |S| = {cover.size}, dim = {cover.dim} -> {args.out}")
    return 0


def cmd_verify(args) -> int:
    cover = load_cover(args.cover)
    T = parse_index_set(args.index_set)
    fam = RandomFamily.parse(args.family)
    probe = containment_probe(T, cover, args.directions, args.seed)
    rep = compare(T, cover, fam, count=args.mc, seed=args.seed)
    ok_probe = probe.consistent(args.tol)
    passed = ok_probe and not rep.violation
    print(f"worst_ratio = {probe.worst_ratio:.6g} (tolerance 1 + {args.tol:g})"
          f"{'' if probe.exact_ok is None else f', vertex check {probe.exact_ok}'}")
    if not ok_probe:
        print("witness direction: " + " ".join(f"{v:.6g}" for v in probe.witness))
    print(rep.table())
    print("PASS" if passed else "FAIL")
    if args.out:
        d = {"probe": probe.to_dict(), "functionals": rep.to_dict(), "passed": passed,
             "family": fam.to_dict(), "seed": args.seed, "mc": args.mc,
             "directions": args.directions}
        _emit(_dump(d) if args.format == "json" else _report_csv(d["functionals"]), args.out)
    return 0 if passed else 1


def cmd_experiment(args) -> int:
    cfg = {}
    if args.config:
        cfg = _load_json(args.config)
    cfg["experiment"] = args.name
    for flag, key in (("family", "family"), ("n", "dims"), ("seed", "seeds"), ("mc", "mc"),
                      ("trials", "trials"), ("directions", "directions"),
                      ("instances", "instances"), ("workers", "workers"), ("q", "q_values")):
        v = getattr(args, flag)
        if v is not None:
            cfg[key] = v
    try:
        config = ExperimentConfig.from_dict(cfg)
    except (TypeError, ValueError) as exc:
        raise SystemExit(f"invalid configuration: {exc}")
    rep = run(config, out=args.out)
    if args.format == "json":
        sys.stdout.write(rep.to_json())
    elif args.format == "csv":
        sys.stdout.write(rep.to_csv())
    else:
        for a in rep.assertions:
            print(f"{'PASS' if a.passed else 'FAIL'}  {a.name}: {a.detail}")
    if not rep.passed:
        names = ", ".join(a.name for a in rep.failed())
        print(f"failed assertion(s): {names}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------

def _q_arg(text):
    return "inf" if text == "inf" else float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hullcover", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mc=DEFAULT_MC):
        sp.add_argument("--family", default="gaussian",
                        help='coordinate law, e.g. "student df=9" or "stable p=1.5"')
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--mc", type=int, default=mc, help="Monte-Carlo sample count")
        sp.add_argument("--out", help="output file")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    e = sub.add_parser("estimate", help="functionals of a point list or cover")
    common(e)
    e.add_argument("--cover", help="cover JSON file")
    e.add_argument("--points", help="JSON list of points")
    e.add_argument("--set", help="index set for b_X(T): l1:N, l2:N, lq:N:Q or JSON file")
    e.add_argument("--little", choices=("heuristic", "exact-small"))
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("cover", help="build a cover and write it as JSON")
    common(c)
    c.add_argument("--construction", required=True,
                   choices=("canonical", "net", "block", "rotation", "ellipsoid", "lq", "gamma"))
    c.add_argument("--n", type=int, default=8)
    c.add_argument("--k", type=int, help="block dimension for --construction block")
    c.add_argument("--q", default="4", help="exponent for --construction lq (number or inf)")
    c.add_argument("--trials", type=int, default=con.DEFAULT_TRIALS)
    c.add_argument("--c-log", type=float, default=con.DEFAULT_C_LOG)
    c.add_argument("--set", help="ellipsoid JSON for --construction ellipsoid")
    c.add_argument("--points", help="point list JSON for --construction gamma")
    c.add_argument("--set-out", help="also write the covered index set here")
    c.set_defaults(func=cmd_cover)

    v = sub.add_parser("verify", help="probe a cover against an index set")
    common(v)
    v.add_argument("cover")
    v.add_argument("index_set", help="JSON file or l1:N, l2:N, lq:N:Q")
    v.add_argument("--directions", type=int, default=10_000)
    v.add_argument("--tol", type=float, default=1e-2)
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("experiment", help="run a named experiment")
    x.add_argument("name", choices=EXPERIMENTS)
    x.add_argument("--config", help="JSON configuration; flags override it")
    x.add_argument("--family")
    x.add_argument("--n", type=int, nargs="+")
    x.add_argument("--seed", type=int, nargs="+")
    x.add_argument("--mc", type=int)
    x.add_argument("--trials", type=int)
    x.add_argument("--directions", type=int)
    x.add_argument("--instances", type=int)
    x.add_argument("--workers", type=int)
    x.add_argument("--q", type=_q_arg, nargs="+")
    x.add_argument("--out", help="output prefix for <out>.json and <out>.csv")
    x.add_argument("--format", choices=("json", "csv"), help="print the report instead of a summary")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
