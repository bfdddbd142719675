"""Lattice weights on the nonnegative integers.

Three families are supported: Meixner ``(beta)_x c^x / x!``, Charlier
``a^x / x!`` and a generic weight defined by ``w0`` and a rational ratio
``w(x-1)/w(x) = d1(x)/d2(x)``.  All evaluation happens in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import gammaln


class ParameterError(ValueError):
    """Invalid weight parameters."""


class DomainError(ValueError):
    """Argument outside the domain of a lattice function."""


@dataclass(frozen=True)
class Meixner:
    beta: float
    c: float


@dataclass(frozen=True)
class Charlier:
    a: float


@dataclass(frozen=True)
class GenericRational:
    """Weight with ``w(0) = w0`` and ``w(x-1)/w(x) = d1(x)/d2(x)``.

    ``d1`` and ``d2`` are ascending coefficient tuples.
    """

    d1: tuple
    d2: tuple
    w0: float = 1.0


WeightKind = Union[Meixner, Charlier, GenericRational]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    condition: str
    message: str
    limit_ratio: float | None = None
    deg_d1: int | None = None
    deg_d2: int | None = None


def _trim(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    c = np.trim_zeros(c, "b")
    return c if c.size else np.zeros(1)


def ratio_polynomials(kind: WeightKind) -> tuple[np.ndarray, np.ndarray]:
    """Ascending coefficients of ``(d1, d2)`` with ``w(x-1)/w(x) = d1/d2``."""
    if isinstance(kind, Meixner):
        return np.array([0.0, 1.0]), np.array([kind.c * (kind.beta - 1.0), kind.c])
    if isinstance(kind, Charlier):
        return np.array([0.0, 1.0]), np.array([float(kind.a)])
    if isinstance(kind, GenericRational):
        return _trim(kind.d1), _trim(kind.d2)
    raise TypeError(f"unknown weight kind {kind!r}")


def validate(kind: WeightKind) -> ValidationReport:
    """Check the parameter constraints of a weight family.

    For the generic family this enforces ``d1(0) = 0``, ``d2(0) != 0``,
    ``deg d1 >= deg d2`` and, at equal degrees, a leading-coefficient ratio
    above one.
    """
    if isinstance(kind, Meixner):
        if not kind.beta > 0:
            return ValidationReport(False, "beta>0", f"beta={kind.beta} must be positive")
        if not 0 < kind.c < 1:
            return ValidationReport(False, "0<c<1", f"c={kind.c} must lie in (0, 1)")
        return ValidationReport(True, "ok", "Meixner parameters valid", 1.0 / kind.c, 1, 1)
    if isinstance(kind, Charlier):
        if not kind.a > 0:
            return ValidationReport(False, "a>0", f"a={kind.a} must be positive")
        return ValidationReport(True, "ok", "Charlier parameters valid", math.inf, 1, 0)
    if isinstance(kind, GenericRational):
        d1, d2 = ratio_polynomials(kind)
        deg1, deg2 = len(d1) - 1, len(d2) - 1
        if not kind.w0 > 0:
            return ValidationReport(False, "w0>0", f"w0={kind.w0} must be positive", None, deg1, deg2)
        if not np.all(d2 == 0) and d2[0] == 0:
            return ValidationReport(False, "d2(0)!=0", "d2 must not vanish at 0", None, deg1, deg2)
        if np.all(d2 == 0):
            return ValidationReport(False, "d2!=0", "d2 is the zero polynomial", None, deg1, deg2)
        if d1[0] != 0:
            return ValidationReport(False, "d1(0)=0", f"d1(0)={d1[0]} must vanish", None, deg1, deg2)
        if deg1 < deg2:
            return ValidationReport(False, "deg d1>=deg d2", f"deg d1={deg1} < deg d2={deg2}", 0.0, deg1, deg2)
        if deg1 == deg2:
            lim = d1[-1] / d2[-1]
            if not lim > 1:
                return ValidationReport(
                    False, "lim d1/d2>1", f"limit ratio {lim:g} does not exceed 1", lim, deg1, deg2
                )
            return ValidationReport(True, "ok", "generic weight valid", lim, deg1, deg2)
        return ValidationReport(True, "ok", "generic weight valid", math.inf, deg1, deg2)
    raise TypeError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class DiscreteWeight:
    """A validated weight, optionally rescaled by ``exp(log_scale)``.

    The rescaling hook exists so that invariance of the downstream kernels
    under ``w -> const * w`` can be tested.
    """

    kind: WeightKind
    log_scale: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        report = validate(self.kind)
        if not report.ok:
            raise ParameterError(report.message)

    # -- rational structure -------------------------------------------------
    @property
    def d1(self) -> np.ndarray:
        return ratio_polynomials(self.kind)[0]

    @property
    def d2(self) -> np.ndarray:
        return ratio_polynomials(self.kind)[1]

    @property
    def n_inf(self) -> int:
        """Order of ``w(x-1)/w(x)`` at infinity, ``deg d1 - deg d2``."""
        d1, d2 = ratio_polynomials(self.kind)
        return (len(d1) - 1) - (len(d2) - 1)

    def poles(self, tol: float = 1e-9) -> list[tuple[complex | float, int]]:
        """Finite poles of ``d1/d2`` with multiplicities, after cancelling
        common roots of ``d1`` and ``d2``."""
        d1, d2 = ratio_polynomials(self.kind)
        r2 = list(npoly.polyroots(d2)) if len(d2) > 1 else []
        r1 = list(npoly.polyroots(d1)) if len(d1) > 1 else []
        for r in list(r2):
            for q in r1:
                if abs(q - r) < tol * max(1.0, abs(r)):
                    r1.remove(q)
                    r2.remove(r)
                    break
        groups: list[list] = []
        for r in r2:
            for g in groups:
                if abs(g[0] - r) < 1e-6 * max(1.0, abs(r)):
                    g.append(r)
                    break
            else:
                groups.append([r])
        out = []
        for g in groups:
            z = complex(np.mean(g))
            out.append((z.real if abs(z.imag) < 1e-12 else z, len(g)))
        return out

    # -- evaluation -----------------------------------------------------------
    def log_table(self, L: int) -> np.ndarray:
        """``log w(x)`` for ``x = 0..L``."""
        L = int(L)
        key = ("log", L)
        if key in self._cache:
            return self._cache[key]
        x = np.arange(L + 1, dtype=float)
        k = self.kind
        if isinstance(k, Meixner):
            lw = gammaln(x + k.beta) - gammaln(k.beta) - gammaln(x + 1.0) + x * math.log(k.c)
        elif isinstance(k, Charlier):
            lw = x * math.log(k.a) - gammaln(x + 1.0)
        else:
            d1, d2 = ratio_polynomials(k)
            y = x[1:]
            num = npoly.polyval(y, d2)
            den = npoly.polyval(y, d1)
            r = num / den
            if np.any(~(r > 0)):
                bad = int(y[np.argmax(~(r > 0))])
                raise ParameterError(f"d2(x)/d1(x) is not positive at x={bad}; weight would not be positive")
            lw = np.concatenate([[0.0], np.cumsum(np.log(r))]) + math.log(k.w0)
        lw = lw + self.log_scale
        lw.setflags(write=False)
        if len(self._cache) < 16:
            self._cache[key] = lw
        return lw

    def log_weight(self, x) -> np.ndarray | float:
        xa = np.asarray(x)
        if np.any(xa < 0) or np.any(xa != np.floor(xa)):
            raise DomainError("weights are defined on nonnegative integers only")
        table = self.log_table(int(xa.max()) if xa.size else 0)
        out = table[xa.astype(int)]
        return float(out) if np.ndim(x) == 0 else out

    def weight(self, x):
        return np.exp(self.log_weight(x))

    def ratio(self, x):
        """``w(x-1)/w(x)`` from the rational representation."""
        xa = np.asarray(x, dtype=float)
        if np.any(xa < 1):
            raise DomainError("w(x-1)/w(x) is undefined at x = 0")
        d1, d2 = ratio_polynomials(self.kind)
        out = npoly.polyval(xa, d1) / npoly.polyval(xa, d2)
        return float(out) if np.ndim(x) == 0 else out

    def rescaled(self, factor: float) -> "DiscreteWeight":
        if not factor > 0:
            raise ParameterError("rescaling factor must be positive")
        return DiscreteWeight(self.kind, self.log_scale + math.log(factor))

    def label(self) -> str:
        k = self.kind
        if isinstance(k, Meixner):
            return f"meixner:beta={k.beta:g},c={k.c:g}"
        if isinstance(k, Charlier):
            return f"charlier:a={k.a:g}"
        return f"rational:d1={list(k.d1)},d2={list(k.d2)},w0={k.w0:g}"


def make_weight(kind: WeightKind) -> DiscreteWeight:
    return DiscreteWeight(kind)


def eval_log_weight(weight: DiscreteWeight, x) -> float:
    return weight.log_weight(x)


def weight_ratio(weight: DiscreteWeight, x):
    """``w(x-1)/w(x)`` together with the pair ``(d1(x), d2(x))``."""
    if np.any(np.asarray(x) < 1):
        raise DomainError("w(x-1)/w(x) is undefined at x = 0; D_- has a zero row there")
    d1, d2 = ratio_polynomials(weight.kind)
    xa = np.asarray(x, dtype=float)
    return weight.ratio(x), (npoly.polyval(xa, d1), npoly.polyval(xa, d2))


def companion_log_table(weight: DiscreteWeight, L: int) -> np.ndarray:
    """``log W(x)`` for ``x = 0..L`` where ``W(x-1) W(x) = w(x)``, ``W(0) = w(0)``."""
    lw = weight.log_table(L)
    lW = np.empty_like(lw)
    lW[0] = lw[0]
    for x in range(1, len(lw)):
        lW[x] = lw[x] - lW[x - 1]
    return lW


def companion_weight_W(weight: DiscreteWeight, x: int) -> float:
    if x < 0:
        raise DomainError("x must be nonnegative")
    return float(np.exp(companion_log_table(weight, int(x))[int(x)]))


def companion_weight_closed(weight: DiscreteWeight, x: int) -> float:
    """Alternating-product form of ``W``.

    ``W(x) = w(1) w(3) ... w(x) / (w(0) w(2) ... w(x-1))`` for odd ``x`` and
    ``w(0) w(2) ... w(x) / (w(1) ... w(x-1))`` for even ``x``.  The ``w(0)``
    factors are 1 for Meixner and Charlier weights.
    """
    lw = weight.log_table(int(x))
    signs = np.where((np.arange(x + 1) - x) % 2 == 0, 1.0, -1.0)
    return float(np.exp(np.sum(signs * lw)))


# -- truncation ---------------------------------------------------------------


@dataclass(frozen=True)
class Truncation:
    """Lattice cutoff: the truncated lattice is ``{0, ..., L}``.

    ``margin`` rows next to the cutoff are treated as untrusted by checks
    that involve the infinite sums of the epsilon operator.
    """

    L: int
    tail_tol: float = 1e-30
    margin: int = 4

    @property
    def size(self) -> int:
        return self.L + 1

    @property
    def window(self) -> slice:
        return slice(0, max(self.L + 1 - self.margin, 1))


def _tail_profile(weight: DiscreteWeight, n_max: int, M: int) -> np.ndarray:
    """log of a bound on ``sum_{x>L} w(x) (1+x)^(2 n_max)`` for ``L = 0..M-1``.

    Terms up to ``M`` are summed exactly; beyond ``M`` the ratio test bounds
    the remainder geometrically.
    """
    lw = weight.log_table(M + 1)
    x = np.arange(M + 2, dtype=float)
    lg = lw + 2 * n_max * np.log1p(x)
    lim = validate(weight.kind).limit_ratio
    lr_inf = -math.log(lim) if math.isfinite(lim) else -math.inf
    lrho = max(lg[M + 1] - lg[M], lr_inf)
    if lrho >= 0:
        beyond = math.inf
    else:
        beyond = lg[M + 1] - math.log1p(-math.exp(lrho))
    # suffix log-sum-exp over x = L+1 .. M, plus the geometric remainder
    suffix = np.logaddexp.accumulate(lg[1 : M + 1][::-1])[::-1]
    return np.logaddexp(suffix, beyond)


def choose_cutoff(weight: DiscreteWeight, n_max: int, tail_tol: float = 1e-30,
                  margin: int = 4, L_min: int = 0, L_max: int = 4_000_000,
                  relative: bool = False) -> Truncation:
    """Smallest ``L >= L_min`` whose tail bound on the truncated moment mass
    ``sum_{x>L} w(x) (1+x)^(2 n_max)`` is below ``tail_tol``.

    With ``relative=True`` the bound is measured against the full moment
    mass instead of in absolute terms.
    """
    if not tail_tol > 0:
        raise ParameterError("tail_tol must be positive")
    ltol = math.log(tail_tol)
    M = 64
    while M <= L_max:
        prof = _tail_profile(weight, n_max, M)
        if relative:
            lg0 = weight.log_table(0)[0]
            if not math.isfinite(prof[0]):
                M *= 2
                continue
            prof = prof - np.logaddexp(lg0, prof[0])
        prof[: min(L_min, M)] = np.inf
        ok = np.nonzero(prof < ltol)[0]
        if ok.size:
            return Truncation(int(ok[0]), tail_tol, margin)
        M *= 2
    raise ParameterError(f"no cutoff below {L_max} meets tail_tol={tail_tol}")
