"""Brute-force enumeration of the symplectic and orthogonal ensembles on a
truncated lattice.  Everything here is exact for the truncated ensemble and
serves as the reference that kernel computations are checked against."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb, logsumexp

from .weights import DiscreteWeight, Truncation, companion_log_table

MAX_CONFIGS = 10_000_000


class EnumerationSizeError(ValueError):
    """The requested ensemble has too many configurations to enumerate."""


@dataclass(frozen=True)
class Configuration:
    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(int(p) for p in self.points)
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError(f"points must be strictly increasing: {pts}")
        if pts and pts[0] < 0:
            raise ValueError("points must be nonnegative")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def is_admissible(self) -> bool:
        """Orthogonal-ensemble support: even first point, odd gaps."""
        p = self.points
        if not p or p[0] % 2:
            return False
        return all((b - a) % 2 == 1 for a, b in zip(p, p[1:]))


@dataclass(frozen=True)
class EnsembleSpec:
    """``flavor`` is ``"symplectic"`` (``N`` points) or ``"orthogonal"`` (``2N`` points)."""

    flavor: str
    N: int
    weight: DiscreteWeight
    trunc: Truncation

    def __post_init__(self):
        if self.flavor not in ("symplectic", "orthogonal"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.N < 1:
            raise ValueError("N must be positive")

    @property
    def n_points(self) -> int:
        return self.N if self.flavor == "symplectic" else 2 * self.N

    @property
    def n_configs(self) -> int:
        return int(comb(self.trunc.L + 1, self.n_points, exact=True))

    def log_site_weights(self) -> np.ndarray:
        if self.flavor == "symplectic":
            return self.weight.log_table(self.trunc.L)
        return companion_log_table(self.weight, self.trunc.L)


def _log_config_weights(spec: EnsembleSpec, X: np.ndarray) -> np.ndarray:
    """Log unnormalized weights for a batch of sorted configurations (rows)."""
    lw = spec.log_site_weights()
    out = lw[X].sum(axis=1)
    k = X.shape[1]
    with np.errstate(divide="ignore"):
        for i in range(k):
            for j in range(i + 1, k):
                d = (X[:, j] - X[:, i]).astype(float)
                if spec.flavor == "symplectic":
                    out += np.log(d * d * (d * d - 1.0))
                else:
                    out += np.log(d)
    if spec.flavor == "orthogonal":
        ok = X[:, 0] % 2 == 0
        if k > 1:
            ok &= np.all(np.diff(X, axis=1) % 2 == 1, axis=1)
        out = np.where(ok, out, -np.inf)
    return out


def config_weight(spec: EnsembleSpec, config) -> float:
    cfg = config if isinstance(config, Configuration) else Configuration(tuple(config))
    if len(cfg) != spec.n_points:
        raise ValueError(f"expected {spec.n_points} points, got {len(cfg)}")
    if cfg.points and cfg.points[-1] > spec.trunc.L:
        raise ValueError("configuration leaves the truncated lattice")
    X = np.array([cfg.points], dtype=np.int64)
    return float(np.exp(_log_config_weights(spec, X)[0]))


@dataclass
class Distribution:
    configs: np.ndarray
    log_weights: np.ndarray
    log_Z: float
    spec: EnsembleSpec = field(repr=False)

    @property
    def Z(self) -> float:
        return math.exp(self.log_Z)

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_Z)

    def top(self, k: int):
        p = self.probs
        idx = np.argsort(-p, kind="stable")[:k]
        return [(tuple(int(v) for v in self.configs[i]), float(p[i])) for i in idx]


def enumerate_ensemble(spec: EnsembleSpec) -> Distribution:
    n = spec.n_configs
    if n > MAX_CONFIGS:
        raise EnumerationSizeError(f"{n} configurations exceed the limit {MAX_CONFIGS}")
    k = spec.n_points
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(spec.trunc.L + 1), k)),
                       dtype=np.int64, count=n * k)
    X = flat.reshape(n, k)
    lw = _log_config_weights(spec, X)
    keep = np.isfinite(lw)
    X, lw = X[keep], lw[keep]
    return Distribution(X, lw, float(logsumexp(lw)), spec)


def oracle_generating_functional(dist: Distribution, eta) -> float:
    """``E prod_i (1 + eta(x_i))``."""
    eta = np.asarray(eta, dtype=float)
    f = np.prod(1.0 + eta[dist.configs], axis=1)
    return float(np.sum(dist.probs * f))


def oracle_correlation(dist: Distribution, points) -> float:
    """Probability that every point in ``points`` is occupied."""
    pts = [int(p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("correlation points must be distinct")
    hit = np.ones(len(dist.configs), dtype=bool)
    for p in pts:
        hit &= np.any(dist.configs == p, axis=1)
    return float(np.sum(dist.probs[hit]))


def oracle_density(dist: Distribution) -> np.ndarray:
    rho = np.zeros(dist.spec.trunc.L + 1)
    np.add.at(rho, dist.configs.ravel(), np.repeat(dist.probs, dist.configs.shape[1]))
    return rho


@dataclass
class ComparisonReport:
    gen_max: float
    gen_mean: float
    rho1_max: float
    rho2_max: float
    hole_max: float
    trials: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def compare(spec: EnsembleSpec, K, trials: int = 10, seed: int = 0, window: int | None = None,
            dist: Distribution | None = None) -> ComparisonReport:
    """Kernel-side quantities against the enumeration on a window of sites."""
    from .pfaffian import correlation, generating_functional, hole_probability

    dist = enumerate_ensemble(spec) if dist is None else dist
    size = spec.trunc.L + 1
    window = min(window or 16, size - spec.trunc.margin)
    rng = np.random.default_rng(seed)
    gens = []
    for _ in range(trials):
        eta = np.zeros(size)
        sup = rng.choice(window, size=min(6, window), replace=False)
        eta[sup] = rng.uniform(-0.9, 0.9, size=len(sup))
        gens.append(abs(generating_functional(K, eta) - oracle_generating_functional(dist, eta)))
    dens = oracle_density(dist)
    r1 = max(abs(correlation(K, [y]) - dens[y]) for y in range(window))
    r2 = 0.0
    holes = 0.0
    for _ in range(trials):
        a, b = sorted(rng.choice(window, size=2, replace=False))
        r2 = max(r2, abs(correlation(K, [a, b]) - oracle_correlation(dist, [a, b])))
        start = int(rng.integers(0, window - 2))
        region = list(range(start, start + 3))
        eta = np.zeros(size)
        eta[region] = -1.0
        holes = max(holes, abs(hole_probability(K, region) - oracle_generating_functional(dist, eta)))
    return ComparisonReport(float(max(gens)), float(np.mean(gens)), float(r1), float(r2), float(holes), trials)
