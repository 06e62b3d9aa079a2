"""Coordinate laws for the random vector ``X = (X_1, ..., X_n)``.

All laws are symmetric. Laws with a finite second moment are normalized to
variance ``scale**2``; the symmetric p-stable law has characteristic function
``exp(-|scale * t|**p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy import special, stats

from .estimate import Estimate
from .rng import chunk_bounds, ordered_map, stream

DEFAULT_MC = 200_000

_ALIASES = {
    "gaussian": "gaussian",
    "normal": "gaussian",
    "rademacher": "rademacher",
    "uniform": "uniform",
    "uniformsymmetric": "uniform",
    "student": "student",
    "studentlike": "student",
    "weibull": "weibull",
    "symmetricweibull": "weibull",
    "stable": "stable",
    "symmetricstable": "stable",
    "twopoint": "twopoint",
    "twopointmixture": "twopoint",
}

# names of the shape parameters, in the order stored in RandomFamily.params
_PARAM_NAMES = {
    "gaussian": (),
    "rademacher": (),
    "uniform": (),
    "student": ("df",),
    "weibull": ("shape",),
    "stable": ("p",),
    "twopoint": ("w", "b"),
}


@dataclass(frozen=True)
class Regularity:
    """Moment-regularity metadata: ``||X||_r <= lam ||X||_2`` and optionally
    ``||X||_{2p} <= alpha ||X||_p``."""

    r: float
    lam: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if not 4 < self.r <= 8:
            raise ValueError(f"r must lie in (4, 8], got {self.r}")
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if self.alpha is not None and self.alpha < 1:
            raise ValueError("alpha must be >= 1")


@dataclass(frozen=True)
class MomentReport:
    passes: bool
    worst_ratio: float
    regmom_ratio: Optional[float] = None


@dataclass(frozen=True)
class RandomFamily:
    """Law of a single coordinate ``X_i``.

    Build instances with the named constructors (:meth:`gaussian`,
    :meth:`student`, ...) or :meth:`parse`.
    """

    kind: str
    params: tuple = ()
    scale: float = 1.0
    regularity: Optional[Regularity] = field(default=None, compare=True)

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.lower().replace("_", "").replace("-", ""))
        if kind is None:
            raise ValueError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        if len(self.params) != len(_PARAM_NAMES[kind]):
            raise ValueError(f"{kind} takes parameters {_PARAM_NAMES[kind]}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if kind == "student" and not self.params[0] > 2:
            raise ValueError("student df must exceed 2 (finite variance)")
        if kind == "weibull" and not 0 < self.params[0] < 1:
            raise ValueError("weibull shape must lie in (0, 1)")
        if kind == "stable" and not 1 < self.params[0] < 2:
            if 0 < self.params[0] <= 1:
                raise ValueError("stable laws with p <= 1 have infinite mean: unsupported")
            raise ValueError("stable index p must lie in (1, 2)")
        if kind == "twopoint":
            w, b = self.params
            if not (0 < w < 1 and b > 0):
                raise ValueError("twopoint needs 0 < w < 1 and b > 0")
        if self.regularity is not None:
            reg = self.regularity
            rep = moment_condition_check(self, reg.r, reg.lam, alpha=reg.alpha)
            if not rep.passes:
                raise ValueError(
                    f"{self.describe()} violates the declared regularity "
                    f"(ratio {rep.worst_ratio:.4g} > lambda {reg.lam})"
                )

    # -- constructors -------------------------------------------------------
    @classmethod
    def gaussian(cls, scale=1.0, regularity=None):
        return cls("gaussian", (), scale, regularity)

    @classmethod
    def rademacher(cls, scale=1.0, regularity=None):
        return cls("rademacher", (), scale, regularity)

    @classmethod
    def uniform(cls, scale=1.0, regularity=None):
        return cls("uniform", (), scale, regularity)

    @classmethod
    def student(cls, df=9.0, scale=1.0, regularity=None):
        return cls("student", (df,), scale, regularity)

    @classmethod
    def weibull(cls, shape=0.5, scale=1.0, regularity=None):
        return cls("weibull", (shape,), scale, regularity)

    @classmethod
    def stable(cls, p=1.5, scale=1.0):
        return cls("stable", (p,), scale, None)

    @classmethod
    def two_point(cls, w=0.1, b=3.0, scale=1.0, regularity=None):
        return cls("twopoint", (w, b), scale, regularity)

    # -- plain-text records -------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "RandomFamily":
        """Parse ``"kind key=value ..."``, e.g. ``"student df=9 r=5 lambda=2"``.

        Commas and colons also work as separators.
        """
        tokens = text.replace(",", " ").replace(":", " ").split()
        if not tokens:
            raise ValueError("empty family description")
        record = {"kind": tokens[0]}
        for tok in tokens[1:]:
            key, sep, value = tok.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {tok!r}")
            record[key.strip().lower()] = float(value)
        return cls.from_dict(record)

    @classmethod
    def from_dict(cls, record: dict) -> "RandomFamily":
        record = dict(record)
        kind = _ALIASES.get(str(record.pop("kind")).lower().replace("_", "").replace("-", ""))
        if kind is None:
            raise ValueError("unknown family kind")
        params = []
        for name in _PARAM_NAMES[kind]:
            if name not in record:
                raise ValueError(f"{kind} requires parameter {name!r}")
            params.append(float(record.pop(name)))
        scale = float(record.pop("scale", 1.0))
        reg = record.pop("regularity", None)
        if reg is None and "r" in record:
            reg = {"r": record.pop("r"), "lam": record.pop("lambda", record.pop("lam", None)),
                   "alpha": record.pop("alpha", None)}
        if record:
            raise ValueError(f"unexpected family fields: {sorted(record)}")
        regularity = None
        if reg is not None:
            reg = dict(reg)
            lam = reg.get("lam", reg.get("lambda"))
            if lam is None:
                raise ValueError("regularity block needs lambda")
            alpha = reg.get("alpha")
            regularity = Regularity(float(reg["r"]), float(lam), None if alpha is None else float(alpha))
        return cls(kind, tuple(params), scale, regularity)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        d.update(zip(_PARAM_NAMES[self.kind], self.params))
        d["scale"] = self.scale
        if self.regularity is not None:
            reg = self.regularity
            d["regularity"] = {"r": reg.r, "lambda": reg.lam, "alpha": reg.alpha}
        return d

    def describe(self) -> str:
        parts = [self.kind] + [f"{k}={v:g}" for k, v in zip(_PARAM_NAMES[self.kind], self.params)]
        if self.scale != 1.0:
            parts.append(f"scale={self.scale:g}")
        return " ".join(parts)

    # -- analytic properties ------------------------------------------------
    @property
    def heavy_tailed(self) -> bool:
        return self.kind in ("student", "weibull", "stable")

    @property
    def moment_limit(self) -> float:
        """Supremum of the orders ``p`` with ``E|X|^p < inf`` (exclusive)."""
        if self.kind == "stable":
            return self.params[0]
        if self.kind == "student":
            return self.params[0]
        return math.inf

    @property
    def variance(self) -> float:
        return math.inf if self.kind == "stable" else self.scale**2

    @property
    def _unit(self) -> float:
        # multiplier turning the base law into the normalized one
        if self.kind == "stable":
            return self.scale
        return self.scale / math.sqrt(self._base_abs_moment(2.0))

    def _base_abs_moment(self, p: float) -> float:
        k = self.kind
        if k == "gaussian":
            return math.exp(p / 2 * math.log(2) + math.lgamma((p + 1) / 2)) / math.sqrt(math.pi)
        if k == "rademacher":
            return 1.0
        if k == "uniform":
            return 1.0 / (p + 1)
        if k == "student":
            nu = self.params[0]
            if p >= nu:
                return math.inf
            return math.exp(
                p / 2 * math.log(nu) + math.lgamma((p + 1) / 2) + math.lgamma((nu - p) / 2)
                - math.lgamma(nu / 2)
            ) / math.sqrt(math.pi)
        if k == "weibull":
            return math.exp(math.lgamma(1 + p / self.params[0]))
        if k == "stable":
            alpha = self.params[0]
            if p >= alpha:
                return math.inf
            return math.exp(
                p * math.log(2) + math.lgamma((1 + p) / 2) + math.lgamma(1 - p / alpha)
                - math.lgamma(1 - p / 2)
            ) / math.sqrt(math.pi)
        w, b = self.params
        return (1 - w) + w * b**p

    def abs_moment(self, p: float) -> float:
        """``E|X|^p`` in closed form (``inf`` beyond :attr:`moment_limit`)."""
        if p <= 0:
            raise ValueError("moment order must be positive")
        m = self._base_abs_moment(p)
        return math.inf if math.isinf(m) else self._unit**p * m

    def norm(self, p: float) -> float:
        """``||X||_p = (E|X|^p)^(1/p)``."""
        m = self.abs_moment(p)
        return math.inf if math.isinf(m) else m ** (1 / p)

    def scalar_tail_mean(self, v):
        """``E|X| 1{|X| >= v}`` in closed form, or ``None`` for stable laws.

        Accepts a scalar or an array of thresholds.
        """
        if self.kind == "stable":
            return None
        kappa = self._unit
        w = np.asarray(v, dtype=float) / kappa
        k = self.kind
        if k == "gaussian":
            base = math.sqrt(2 / math.pi) * np.exp(-w * w / 2)
        elif k == "rademacher":
            base = np.where(w <= 1, 1.0, 0.0)
        elif k == "uniform":
            base = np.where(w <= 1, (1 - w * w) / 2, 0.0)
        elif k == "student":
            nu = self.params[0]
            base = 2 * stats.t.pdf(w, nu) * (nu + w * w) / (nu - 1)
        elif k == "weibull":
            a = 1 + 1 / self.params[0]
            base = math.gamma(a) * special.gammaincc(a, np.maximum(w, 0) ** self.params[0])
        else:
            pw, b = self.params
            base = (1 - pw) * np.where(w <= 1, 1.0, 0.0) + pw * b * np.where(w <= b, 1.0, 0.0)
        out = kappa * base
        return float(out) if np.ndim(out) == 0 else out

    # -- sampling -----------------------------------------------------------
    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        k = self.kind
        if k == "gaussian":
            y = rng.standard_normal(size)
        elif k == "rademacher":
            y = rng.integers(0, 2, size=size).astype(float) * 2 - 1
        elif k == "uniform":
            y = rng.uniform(-1.0, 1.0, size)
        elif k == "student":
            y = rng.standard_t(self.params[0], size)
        elif k == "weibull":
            u = rng.random(size)
            sign = rng.integers(0, 2, size=size) * 2 - 1
            y = sign * (-np.log1p(-u)) ** (1 / self.params[0])
        elif k == "stable":
            y = _chambers_mallows_stuck(rng, self.params[0], size)
        else:
            w, b = self.params
            sign = rng.integers(0, 2, size=size) * 2 - 1
            y = sign * np.where(rng.random(size) < w, b, 1.0)
        return self._unit * y


def _chambers_mallows_stuck(rng, alpha, size):
    # symmetric case (beta = 0) of the Chambers-Mallows-Stuck transform;
    # the result has characteristic function exp(-|t|^alpha)
    v = rng.uniform(-np.pi / 2, np.pi / 2, size)
    w = rng.standard_exponential(size)
    return (
        np.sin(alpha * v) / np.cos(v) ** (1 / alpha)
        * (np.cos((1 - alpha) * v) / w) ** ((1 - alpha) / alpha)
    )


# ---------------------------------------------------------------------------
# sampling of X and of linear forms X_t
# ---------------------------------------------------------------------------

def iter_sample_chunks(
    family: RandomFamily, n: int, count: int, seed: int, tag: str = "sample", workers: int = 1
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start_row, block)`` pieces of the ``count x n`` sample matrix."""
    bounds = chunk_bounds(count)

    def draw(item):
        c, (lo, hi) = item
        return lo, family.sample(stream(seed, tag, c), (hi - lo, n))

    yield from ordered_map(draw, enumerate(bounds), workers)


def sample_matrix(
    family: RandomFamily, n: int, count: int, seed: int, *, tag: str = "sample", workers: int = 1
) -> np.ndarray:
    """``count`` i.i.d. draws of ``X = (X_1, ..., X_n)``, one per row.

    The result depends only on ``(family, n, count, seed, tag)``; ``workers``
    changes how chunks are scheduled, never their content.
    """
    if n < 1 or count < 1:
        raise ValueError("n and count must be >= 1")
    out = np.empty((count, n))
    for lo, block in iter_sample_chunks(family, n, count, seed, tag, workers):
        out[lo: lo + len(block)] = block
    return out


def stable_scale(t: np.ndarray, p: float) -> float:
    """``||t||_p``: the scale of ``<t, X>`` for i.i.d. standard p-stable ``X``."""
    return float(np.sum(np.abs(t) ** p) ** (1 / p))


def _reduced_scale(family: RandomFamily, t: np.ndarray) -> Optional[float]:
    """Return ``c`` with ``X_t =d c * X_1`` when such a reduction exists."""
    nz = np.flatnonzero(t)
    if len(nz) == 0:
        return 0.0
    if len(nz) == 1:
        return float(abs(t[nz[0]]))
    if family.kind == "gaussian":
        return float(np.linalg.norm(t))
    if family.kind == "stable":
        return stable_scale(t, family.params[0])
    return None


def linear_form_samples(
    family: RandomFamily, t, count: int, seed: int, tag: str = "linear"
) -> np.ndarray:
    """``count`` draws of ``X_t = <t, X>``."""
    t = np.asarray(t, dtype=float)
    c = _reduced_scale(family, t)
    if c is not None:
        return c * sample_matrix(family, 1, count, seed, tag=tag)[:, 0]
    out = np.empty(count)
    for lo, block in iter_sample_chunks(family, len(t), count, seed, tag):
        out[lo: lo + len(block)] = block @ t
    return out


def _mean_estimate(values: np.ndarray, seed: int) -> Estimate:
    n = len(values)
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(float(values.mean()), se, n, seed)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def truncated_abs_mean(
    family: RandomFamily, t, u: float, *, count: int = DEFAULT_MC, seed: int = 0
) -> Estimate:
    """Estimate ``E|X_t| 1{|X_t| >= u}``.

    Closed forms are used for Gaussian laws and for ``t`` with a single nonzero
    coordinate (except stable laws); stable laws are reduced to the scalar
    ``||t||_p X_1`` and then sampled.
    """
    if u < 0:
        raise ValueError("threshold u must be >= 0")
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("t must be finite")
    c = _reduced_scale(family, t)
    if c == 0:
        return Estimate.exact(0.0, seed)
    if c is not None and family.kind != "stable":
        return Estimate.exact(c * family.scalar_tail_mean(u / c), seed)
    y = np.abs(linear_form_samples(family, t, count, seed, tag="truncated"))
    return _mean_estimate(np.where(y >= u, y, 0.0), seed)


@dataclass(frozen=True)
class TailComparison:
    plain: Estimate
    stratified: Estimate
    accepted: int

    @property
    def agreement_z(self) -> float:
        se = math.hypot(self.plain.stderr, self.stratified.stderr)
        diff = abs(self.plain.value - self.stratified.value)
        return 0.0 if se == 0 else diff / se


def tail_comparison(
    family: RandomFamily, t, u: float, *, count: int = DEFAULT_MC, seed: int = 0,
    max_rounds: int = 50,
) -> TailComparison:
    """Plain Monte Carlo of ``E|X_t| 1{|X_t| >= u}`` next to a second pass
    conditioned on ``{|X_t| >= u}`` by rejection.

    The second pass writes the target as ``P(|X_t| >= u) * E[|X_t| | |X_t| >= u]``;
    the probability comes from the plain pass, the conditional mean from up to
    ``count`` accepted draws of an independent stream.
    """
    t = np.asarray(t, dtype=float)
    y = np.abs(linear_form_samples(family, t, count, seed, tag="truncated"))
    hit = y >= u
    plain = _mean_estimate(np.where(hit, y, 0.0), seed)
    prob = hit.mean()
    kept: list[np.ndarray] = []
    n_kept = 0
    for r in range(max_rounds):
        z = np.abs(linear_form_samples(family, t, count, seed + 1 + r, tag="truncated-tail"))
        z = z[z >= u]
        kept.append(z)
        n_kept += len(z)
        if n_kept >= count:
            break
    z = np.concatenate(kept)[:count] if kept else np.empty(0)
    if len(z) < 2 or prob == 0:
        strat = Estimate(0.0, plain.stderr, len(z), seed)
    else:
        cond = z.mean()
        se_cond = z.std(ddof=1) / math.sqrt(len(z))
        se_prob = math.sqrt(prob * (1 - prob) / count)
        se = math.sqrt((prob * se_cond) ** 2 + (cond * se_prob) ** 2)
        strat = Estimate(float(prob * cond), float(se), len(z), seed)
    return TailComparison(plain, strat, len(z))


def lp_norm_linear(
    family: RandomFamily, t, p: float, *, count: int = DEFAULT_MC, seed: int = 0
) -> Estimate:
    """Estimate ``||X_t||_p = (E|X_t|^p)^(1/p)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if p >= family.moment_limit:
        raise ValueError(f"E|X|^{p} is infinite for {family.describe()}")
    t = np.asarray(t, dtype=float)
    c = _reduced_scale(family, t)
    if c is not None:
        return Estimate.exact(c * family.norm(p), seed)
    y = np.abs(linear_form_samples(family, t, count, seed, tag="lp-norm")) ** p
    m = _mean_estimate(y, seed)
    value = m.value ** (1 / p)
    # delta method for x -> x^(1/p)
    se = value / (p * m.value) * m.stderr if m.value > 0 else 0.0
    return Estimate(value, se, count, seed)


def moment_condition_check(
    family: RandomFamily, r: float, lam: float, *, alpha: Optional[float] = None,
    count: int = DEFAULT_MC, seed: int = 0,
) -> MomentReport:
    """Check ``||X_1||_r <= lam ||X_1||_2`` and, when ``alpha`` is given,
    ``||X_1||_{2p} <= alpha ||X_1||_p`` for ``p`` in ``{1, 2, 4}``.

    Every supported law has closed-form absolute moments, so ``count`` and
    ``seed`` are only used by laws without them.
    """
    if not 4 < r <= 8:
        raise ValueError("r must lie in (4, 8]")
    ratio = family.norm(r) / family.norm(2) if r < family.moment_limit else math.inf
    passes = math.isfinite(ratio) and ratio <= lam * (1 + 1e-12)
    regmom = None
    if alpha is not None:
        ratios = []
        for p in (1.0, 2.0, 4.0):
            if 2 * p >= family.moment_limit:
                ratios.append(math.inf)
            else:
                ratios.append(family.norm(2 * p) / family.norm(p))
        regmom = max(ratios)
        passes = passes and regmom <= alpha * (1 + 1e-12)
    return MomentReport(bool(passes), float(ratio), regmom)


# regularity metadata that the stock laws satisfy; StudentLike(9) has a finite
# 8th moment but with ratio sqrt(7) > 2, so its declared r is 5
DEFAULT_REGULARITY = {
    "gaussian": Regularity(8.0, 2.0, 2.0),
    "rademacher": Regularity(8.0, 1.0, 1.0),
    "uniform": Regularity(8.0, 1.5, 2.0),
    "student": Regularity(5.0, 2.0),
    "weibull": Regularity(5.0, 5.0),
}


def standard_family(kind: str, **params) -> RandomFamily:
    """Convenience constructor attaching :data:`DEFAULT_REGULARITY` where it holds."""
    fam = RandomFamily.from_dict({"kind": kind, **params})
    reg = DEFAULT_REGULARITY.get(fam.kind)
    if reg is not None and moment_condition_check(fam, reg.r, reg.lam, alpha=reg.alpha).passes:
        return RandomFamily(fam.kind, fam.params, fam.scale, reg)
    return fam
