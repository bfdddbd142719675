"""z-measures on Young diagrams and their images as symplectic and orthogonal
lattice ensembles at Jack parameter theta = 2.

Weights are evaluated in log space with a separate sign because the
Pochhammer-type box products go negative for the orthogonal parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import gammaln


class DiagramError(ValueError):
    """A diagram is malformed or does not fit the requested bijection."""


@dataclass(frozen=True)
class YoungDiagram:
    parts: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(v) for v in self.parts)
        while p and p[-1] == 0:
            p = p[:-1]
        if any(v < 0 for v in p) or any(b > a for a, b in zip(p, p[1:])):
            raise DiagramError(f"parts must be weakly decreasing and nonnegative: {p}")
        object.__setattr__(self, "parts", p)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def transpose(self) -> "YoungDiagram":
        if not self.parts:
            return self
        return YoungDiagram(tuple(sum(1 for v in self.parts if v > j) for j in range(self.parts[0])))

    def boxes(self) -> Iterator[tuple[int, int]]:
        """Boxes ``(i, j)`` with 1-based row and column."""
        for i, li in enumerate(self.parts, start=1):
            for j in range(1, li + 1):
                yield i, j

    def padded(self, n: int) -> tuple[int, ...]:
        if self.length > n:
            raise DiagramError(f"diagram {self.parts} has more than {n} rows")
        return self.parts + (0,) * (n - self.length)


@dataclass(frozen=True)
class ZParams:
    z: float
    zp: float
    theta: float
    xi: float

    def __post_init__(self):
        if not 0 < self.xi < 1:
            raise ValueError("xi must lie in (0, 1)")
        if not self.theta > 0:
            raise ValueError("theta must be positive")

    @property
    def t(self) -> float:
        return self.z * self.zp / self.theta

    @classmethod
    def symplectic(cls, N: int, beta: float, xi: float) -> "ZParams":
        return cls(2 * N, 2 * N + beta - 2, 2.0, xi)

    @classmethod
    def orthogonal(cls, N: int, beta: float, xi: float) -> "ZParams":
        return cls(-2 * N, -2 * N - beta, 2.0, xi)


def _log_abs_prod(vals) -> tuple[float, int]:
    s = 1
    acc = 0.0
    for v in vals:
        if v == 0:
            return -math.inf, 0
        if v < 0:
            s = -s
        acc += math.log(abs(v))
    return acc, s


def box_pochhammer(z: float, lam: YoungDiagram, theta: float) -> tuple[float, int]:
    """``log|(z)_{lam,theta}|`` and its sign."""
    return _log_abs_prod(z + (j - 1) - (i - 1) * theta for i, j in lam.boxes())


def hook_products(lam: YoungDiagram, theta: float) -> tuple[float, float]:
    """``log H(lam, theta)`` and ``log H'(lam, theta)``."""
    lt = lam.transpose().parts
    H = Hp = 0.0
    for i, j in lam.boxes():
        arm = lam.parts[i - 1] - j
        leg = lt[j - 1] - i
        H += math.log(arm + leg * theta + 1)
        Hp += math.log(arm + leg * theta + theta)
    return H, Hp


def z_weight(params: ZParams, lam: YoungDiagram, log: bool = False):
    """The z-measure of ``lam``; with ``log=True`` returns ``(log|M|, sign)``."""
    lz, sz = box_pochhammer(params.z, lam, params.theta)
    lzp, szp = box_pochhammer(params.zp, lam, params.theta)
    H, Hp = hook_products(lam, params.theta)
    sign = sz * szp
    if sign == 0:
        val = (-math.inf, 0)
    else:
        lm = params.t * math.log1p(-params.xi) + lam.size * math.log(params.xi) + lz + lzp - H - Hp
        val = (lm, sign)
    if log:
        return val
    return 0.0 if val[1] == 0 else val[1] * math.exp(val[0])


# -- bijections --------------------------------------------------------------------------


def map_symplectic(lam: YoungDiagram, N: int) -> tuple[int, ...]:
    """``x_{N-i+1} = lam_i - 2i + 2N``."""
    p = lam.padded(N)
    return tuple(sorted(p[i - 1] - 2 * i + 2 * N for i in range(1, N + 1)))


def unmap_symplectic(points, N: int) -> YoungDiagram:
    x = sorted(int(v) for v in points)
    if len(x) != N:
        raise DiagramError(f"expected {N} points")
    parts = tuple(x[N - i] + 2 * i - 2 * N for i in range(1, N + 1))
    return YoungDiagram(parts)


def map_orthogonal(lam: YoungDiagram, N: int) -> tuple[int, ...]:
    """``x_{2N-i+1} = 2 lam'_i - i + 2N``."""
    p = lam.transpose().padded(2 * N)
    return tuple(sorted(2 * p[i - 1] - i + 2 * N for i in range(1, 2 * N + 1)))


def unmap_orthogonal(points, N: int) -> YoungDiagram:
    x = sorted(int(v) for v in points)
    if len(x) != 2 * N:
        raise DiagramError(f"expected {2 * N} points")
    cols = []
    for i in range(1, 2 * N + 1):
        v = x[2 * N - i] + i - 2 * N
        if v % 2:
            raise DiagramError(f"configuration {tuple(x)} is not in the image of the map")
        cols.append(v // 2)
    return YoungDiagram(tuple(cols)).transpose()


# -- lattice weights induced by the z-measures --------------------------------------


def log_double_factorial(x: int) -> float:
    if x <= 0:
        return 0.0
    if x % 2 == 0:
        k = x // 2
        return k * math.log(2) + float(gammaln(k + 1))
    k = (x + 1) // 2  # 1*3*...*(2k-1) = (2k)! / (2^k k!)
    return float(gammaln(2 * k + 1)) - k * math.log(2) - float(gammaln(k + 1))


def log_bracket_pochhammer(beta: float, x: int) -> float:
    """``[beta]_x = (x+beta-1)(x+beta-3)...`` down to ``beta+1`` (even x) or ``beta`` (odd x)."""
    return sum(math.log(x + beta - 1 - 2 * k) for k in range(math.ceil(x / 2)))


def log_orthogonal_site_weight(beta: float, xi: float, x: int) -> float:
    """``log([beta]_x xi^{x/2} / x!!)``."""
    return log_bracket_pochhammer(beta, x) + 0.5 * x * math.log(xi) - log_double_factorial(x)


def log_symplectic_config(beta: float, xi: float, points) -> float:
    x = np.asarray(points, dtype=float)
    lw = gammaln(x + beta) - gammaln(beta) - gammaln(x + 1) + x * math.log(xi)
    out = float(np.sum(lw))
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            d = x[i] - x[j]
            v = d * d * (d * d - 1)
            if v == 0:
                return -math.inf
            out += math.log(v)
    return out


def log_orthogonal_config(beta: float, xi: float, points) -> float:
    x = sorted(int(v) for v in points)
    out = sum(log_orthogonal_site_weight(beta, xi, v) for v in x)
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            out += math.log(x[j] - x[i])
    return out


# -- diagram generation ------------------------------------------------------------------


def partitions(n: int, max_part: int | None = None, max_len: int | None = None) -> Iterator[YoungDiagram]:
    """All partitions of ``n`` in reverse lexicographic order."""
    max_part = n if max_part is None else max_part
    max_len = n if max_len is None else max_len

    def rec(rem, cap, room):
        if rem == 0:
            yield ()
            return
        if room == 0:
            return
        for p in range(min(rem, cap), 0, -1):
            for rest in rec(rem - p, p, room - 1):
                yield (p,) + rest

    for parts in rec(n, max_part, max_len):
        yield YoungDiagram(parts)


def random_diagram(rng: np.random.Generator, max_size: int, max_len: int | None = None,
                   max_part: int | None = None) -> YoungDiagram:
    n = int(rng.integers(0, max_size + 1))
    k = n if max_len is None else min(n, max_len)
    if n == 0 or k == 0:
        return YoungDiagram(())
    length = int(rng.integers(1, k + 1))
    cap = max_part or n
    parts = sorted((int(v) for v in rng.integers(0, min(cap, n) + 1, size=length)), reverse=True)
    return YoungDiagram(tuple(parts))


# -- checks --------------------------------------------------------------------------------


@dataclass
class ProportionalityReport:
    flavor: str
    max_rel: float
    pairs: int
    skipped: int
    constant_spread: float


def proportionality_check(beta: float, xi: float, N: int, flavor: str, pairs: int = 50,
                          seed: int = 0, max_size: int = 12) -> ProportionalityReport:
    """Ratios ``M(lam)/M(mu)`` against ratios of the mapped lattice weights.

    Symplectic uses the Meixner weight with ``c = xi``; orthogonal uses
    ``[beta]_x xi^{x/2} / x!!``.  Also reports the spread of
    ``log M(lam) - log weight(map(lam))``, which should be constant.
    """
    rng = np.random.default_rng(seed)
    if flavor == "symplectic":
        params = ZParams.symplectic(N, beta, xi)

        def draw():
            return random_diagram(rng, max_size, max_len=N)

        def lat(lam):
            return log_symplectic_config(beta, xi, map_symplectic(lam, N))
    elif flavor == "orthogonal":
        params = ZParams.orthogonal(N, beta, xi)

        def draw():
            return random_diagram(rng, max_size, max_part=2 * N)

        def lat(lam):
            return log_orthogonal_config(beta, xi, map_orthogonal(lam, N))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    worst = 0.0
    skipped = 0
    consts = []
    for _ in range(pairs):
        lam, mu = draw(), draw()
        (la, sa), (lb, sb) = z_weight(params, lam, log=True), z_weight(params, mu, log=True)
        if sa == 0 or sb == 0:
            skipped += 1
            continue
        if sa != sb:
            worst = math.inf
            continue
        ratio_z = la - lb
        ratio_lat = lat(lam) - lat(mu)
        worst = max(worst, abs(math.expm1(ratio_z - ratio_lat)))
        consts += [la - lat(lam), lb - lat(mu)]
    spread = float(np.ptp(consts)) if consts else 0.0
    return ProportionalityReport(flavor, worst, pairs, skipped, spread)


def hook_identity_residual(lam: YoungDiagram) -> float:
    """Relative gap in ``1/(H H') = prod_{i<j}(2l'_i - i - 2l'_j + j) / prod_i (2l'_i - i + l)!``
    at ``theta = 2`` with ``l'`` the transposed parts and ``l`` their count."""
    H, Hp = hook_products(lam, 2.0)
    lt = lam.transpose().parts
    n = len(lt)
    num = 0.0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            num += math.log(2 * lt[i - 1] - i - 2 * lt[j - 1] + j)
    den = sum(float(gammaln(2 * lt[i - 1] - i + n + 1)) for i in range(1, n + 1))
    return abs(math.expm1((num - den) - (-H - Hp)))


@dataclass
class NormalizationReport:
    partial_sum: float
    deficit: float
    tail_estimate: float
    shells: list


def normalization_check(params: ZParams, cutoff: int) -> NormalizationReport:
    """Partial sum of the z-measure over ``|lam| <= cutoff``.

    The tail estimate extrapolates the last shell geometrically with the
    ratio of the last two shell sums.
    """
    shells = []
    for n in range(cutoff + 1):
        shells.append(math.fsum(z_weight(params, lam) for lam in partitions(n)))
    total = math.fsum(shells)
    tail = 0.0
    if len(shells) >= 2 and shells[-2] > 0:
        r = shells[-1] / shells[-2]
        tail = shells[-1] * r / (1 - r) if 0 <= r < 1 else math.inf
    return NormalizationReport(total, 1.0 - total, tail, shells)


def companion_ratio_check(beta: float, xi: float, N: int, pairs: int = 50, seed: int = 0,
                          max_size: int = 12) -> float:
    """Max relative gap between ratios of ``[beta]_x xi^{x/2}/x!!`` configuration
    weights and ratios of the orthogonal-ensemble weights built from the
    companion of the Meixner weight with ``c = xi``.

    The two site weights differ by ``xi^{-1/2}`` on odd sites only, and every
    admissible configuration has ``N`` odd points, so ratios agree.
    """
    from .oracle import EnsembleSpec, config_weight
    from .weights import Meixner, Truncation, make_weight

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        lam = random_diagram(rng, max_size, max_part=2 * N)
        mu = random_diagram(rng, max_size, max_part=2 * N)
        xa, xb = map_orthogonal(lam, N), map_orthogonal(mu, N)
        L = max(xa[-1], xb[-1])
        spec = EnsembleSpec("orthogonal", N, make_weight(Meixner(beta, xi)), Truncation(L))
        lat = math.log(config_weight(spec, xa)) - math.log(config_weight(spec, xb))
        ref = log_orthogonal_config(beta, xi, xa) - log_orthogonal_config(beta, xi, xb)
        worst = max(worst, abs(math.expm1(lat - ref)))
    return worst
