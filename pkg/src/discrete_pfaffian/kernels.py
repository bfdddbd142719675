"""Scalar kernels ``S`` for the symplectic (``SN4``) and orthogonal (``SN1``)
ensembles, built three ways, and the 2x2 matrix kernels assembled from them.

Routes:

* ``inversion``: ``S = Phi^T M^{-1} Phi`` with ``M = Phi D Phi^T`` (symplectic)
  or ``M = Phi eps Phi^T`` (orthogonal).  This is the reference route.
* ``rank``: the finite-rank commutator ``[D, K_N] K_N = sum psi~_i (x) psi_i``
  and the correction formulas built from it.
* ``closed``: the explicit Meixner and Charlier rank-one formulas, with the
  sign and scalar of the rank-one term resolved against the reference.

All vectors and kernels are in the ``phi_n(0) > 0`` convention.  The
inversion and rank routes do not depend on it; the closed forms do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .operators import LatticeOperator, build_difference_ops, build_epsilon_generic, build_KN
from .orthofam import ConditioningError, OrthonormalTable, build_table
from .weights import Charlier, DiscreteWeight, Meixner, Truncation, choose_cutoff

FLAVORS = ("SN4", "SN1")
RANK_RTOL = 1e-10


class KernelError(ArithmeticError):
    """A kernel construction step failed a required check."""


@dataclass
class KernelSetup:
    """Everything the kernel routes share for one weight and one ``N``."""

    weight: DiscreteWeight
    N: int
    trunc: Truncation
    table: OrthonormalTable
    ops: dict
    eps: np.ndarray
    KN: np.ndarray
    kn_report: object = None

    @property
    def L(self) -> int:
        return self.trunc.L

    @property
    def D(self) -> np.ndarray:
        return self.ops["D"].matrix

    @property
    def phi(self) -> np.ndarray:
        return self.table.phi

    @property
    def window(self) -> slice:
        """Rows/columns unaffected by cutting the infinite epsilon sums."""
        return slice(0, self.L + 1 - 2 * self.trunc.margin)


def prepare(weight: DiscreteWeight, N: int, L: int | None = None, margin: int = 8,
            n_extra: int = 2, check_cd: bool = True) -> KernelSetup:
    """Build the table, difference operators, epsilon and ``K_N``.

    Without ``L`` the cutoff is chosen so the relative tail mass of the
    needed moments is below 1e-30.
    """
    if N < 1:
        raise ValueError("N must be positive")
    n_max = 2 * N + n_extra
    if L is None:
        trunc = choose_cutoff(weight, n_max, tail_tol=1e-30, margin=margin,
                              L_min=max(4 * n_max, 40), relative=True)
    else:
        trunc = Truncation(int(L), margin=margin)
    table = build_table(weight, n_max, trunc, sign="origin")
    ops = build_difference_ops(weight, trunc)
    eps = build_epsilon_generic(weight, trunc).matrix
    KN, rep = build_KN(table, N, check_cd=check_cd)
    return KernelSetup(weight, N, trunc, table, ops, eps, KN.matrix, rep)


# -- types -------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarKernel:
    matrix: np.ndarray
    label: str
    route: str
    meta: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class MMatrix:
    matrix: np.ndarray
    flavor: str
    antisymmetry: float
    sigma_min: float
    sigma_max: float

    @property
    def condition(self) -> float:
        return self.sigma_max / self.sigma_min


@dataclass
class RankFactorization:
    """``[D, K_N] K_N = sum_i psi~_i (x) psi_i`` and the epsilon counterpart.

    Rows of ``psi``, ``psi_t``, ``eta``, ``eta_t`` are the vectors.
    """

    n: int
    psi: np.ndarray
    psi_t: np.ndarray
    T: np.ndarray
    eta: np.ndarray
    eta_t: np.ndarray
    U: np.ndarray
    route: str
    factor_residual: float
    eps_factor_residual: float
    perp_residual: float
    singular_values: np.ndarray
    angles: np.ndarray | None = None
    xi: np.ndarray | None = None
    n_inf: int = 0
    pole_orders: tuple = ()

    @property
    def sv_ratio(self) -> float:
        s = self.singular_values
        return float(s[1] / s[0]) if len(s) > 1 and s[0] > 0 else 0.0


@dataclass(frozen=True)
class MatrixKernel2x2:
    """Block kernel ``[[A, B], [C, D]]``; ``flavor`` is ``K_N4``, ``K_N4_nabla`` or ``K_N1``."""

    blocks: tuple
    flavor: str

    def full(self) -> np.ndarray:
        (A, B), (C, D) = self.blocks
        return np.block([[A, B], [C, D]])

    @property
    def size(self) -> int:
        return self.blocks[0][0].shape[0]


# -- M-matrix inversion ----------------------------------------------------------------


def build_M(flavor: str, setup: KernelSetup, antisym_tol: float = 1e-8) -> MMatrix:
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    B = setup.table.basis(setup.N)
    op = setup.D if flavor == "SN4" else setup.eps
    A = B @ op @ B.T
    asym = float(np.max(np.abs(A + A.T)))
    if asym > antisym_tol:
        raise KernelError(f"M antisymmetry residual {asym:.3g} exceeds {antisym_tol:g}")
    A = 0.5 * (A - A.T)
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] < 1e-12 * s[0]:
        raise ConditioningError(f"M is numerically singular: sigma_min={s[-1]:.3g}, sigma_max={s[0]:.3g}")
    return MMatrix(A, "M4" if flavor == "SN4" else "M1", asym, float(s[-1]), float(s[0]))


def build_S_inversion(flavor: str, setup: KernelSetup, M: MMatrix | None = None) -> ScalarKernel:
    M = build_M(flavor, setup) if M is None else M
    B = setup.table.basis(setup.N)
    try:
        mu = np.linalg.inv(M.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"M inversion failed (sigma_min={M.sigma_min:.3g})") from exc
    mu = 0.5 * (mu - mu.T)
    S = B.T @ mu @ B
    return ScalarKernel(S, flavor, "inversion", {"mu": mu, "sigma_min": M.sigma_min})


# -- rank builder ------------------------------------------------------------------------


def _orthonormal_rows(V: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (rows) of the row span of ``V``."""
    if V.size == 0:
        return V
    U, s, Wt = np.linalg.svd(V, full_matrices=False)
    r = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return Wt[:r]


def analytic_psi_span(setup: KernelSetup) -> tuple[np.ndarray, np.ndarray, int, tuple]:
    """Vectors spanning the part of ``H_N`` that ``(I - K_N) D`` does not kill.

    For each real pole ``a`` of ``d1/d2`` of order ``n_a`` this takes
    ``xi_k = sum_{j<2N} phi_j p_j^{(k)}(a - 1)`` for ``k < n_a``; the growth
    ``n_inf = deg d1 - deg d2`` adds ``phi_k`` for ``2N - n_inf <= k < 2N``.
    """
    N, t = setup.N, setup.table
    B = t.basis(N)
    vecs = []
    orders = []
    for a, order in setup.weight.poles():
        if isinstance(a, complex):
            raise KernelError("complex poles are handled by the numeric route only")
        P = t.poly_values(float(a) - 1.0, n_derivs=order - 1)
        orders.append(order)
        for k in range(order):
            vecs.append(P[k, : 2 * N] @ B)
    n_inf = max(int(setup.weight.n_inf), 0)
    for k in range(max(2 * N - n_inf, 0), 2 * N):
        vecs.append(t.phi[k])
    xi = np.array(vecs) if vecs else np.zeros((0, setup.L + 1))
    return xi, _orthonormal_rows(xi), n_inf, tuple(orders)


def commutator(setup: KernelSetup) -> np.ndarray:
    return setup.D @ setup.KN - setup.KN @ setup.D


def numeric_psi_span(setup: KernelSetup, rtol: float = RANK_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Right singular vectors of ``[D, K_N] K_N`` above ``rtol * sigma_max``,
    computed on the trusted window (the vectors are extended by ``K_N``)."""
    C = commutator(setup) @ setup.KN
    w = setup.window
    s_full = np.linalg.svd(C[w, :], compute_uv=False)
    _, s, Vt = np.linalg.svd(C[w, :], full_matrices=False)
    r = int(np.sum(s > rtol * s[0]))
    return Vt[:r] @ setup.KN, s_full


def build_rank_factorization(setup: KernelSetup, route: str = "analytic", rtol: float = RANK_RTOL,
                             angle_tol: float = 1e-6) -> RankFactorization:
    """Factor the commutator and build ``T`` and ``U``.

    Both the analytic and the numeric spans are always computed; they must
    agree in dimension and span.  ``route`` selects which one is used.
    """
    KN, D, E = setup.KN, setup.D, setup.eps
    I = np.eye(setup.L + 1)
    num, svals = numeric_psi_span(setup, rtol)
    xi = None
    n_inf, orders = 0, ()
    angles = None
    try:
        xi, ana, n_inf, orders = analytic_psi_span(setup)
    except KernelError:
        ana = None
    if ana is not None:
        bound = n_inf + sum(orders)
        if num.shape[0] > bound:
            raise KernelError(f"commutator rank {num.shape[0]} exceeds the bound {bound}")
        if ana.shape[0] != num.shape[0]:
            raise KernelError(f"analytic rank {ana.shape[0]} != numeric rank {num.shape[0]}")
        angles = subspace_angles(ana.T, num.T)
        if angles.size and float(np.max(angles)) > angle_tol:
            raise KernelError(f"analytic and numeric spans differ by {np.max(angles):.3g} rad")
    if route == "analytic":
        if ana is None:
            raise KernelError("analytic route unavailable for this weight")
        psi = ana
    elif route == "numeric":
        psi = num
    else:
        raise ValueError(f"unknown route {route!r}")
    n = psi.shape[0]
    psi_t = psi @ D.T - (psi @ D.T) @ KN  # rows: (I - K_N) D psi_i
    T = np.eye(n) + (psi @ E.T) @ psi_t.T  # (eps psi_i, psi~_j)
    if n and abs(np.linalg.det(T)) < 1e-12:
        raise KernelError("T is singular")
    w = setup.window
    C = commutator(setup) @ KN
    recon = psi_t.T @ psi
    fac = float(np.max(np.abs((C - recon)[w, w]))) if n else float(np.max(np.abs(C[w, w])))
    perp = float(np.max(np.abs(psi_t @ KN))) if n else 0.0

    eta = _orthonormal_rows(psi @ E.T @ KN) if n else psi
    eta_t = (eta @ E.T) @ (I - KN)  # rows: (I - K_N) eps eta_i
    U = np.eye(eta.shape[0]) + (eta @ D.T) @ eta_t.T
    if eta.shape[0] and abs(np.linalg.det(U)) < 1e-12:
        raise KernelError("U is singular")
    CE = (E @ KN - KN @ E) @ KN
    eps_fac = float(np.max(np.abs((CE - eta_t.T @ eta)[w, w])))
    return RankFactorization(n, psi, psi_t, T, eta, eta_t, U, route, fac, eps_fac, perp,
                             svals, angles, xi, n_inf, orders)


def build_S_rank(flavor: str, setup: KernelSetup, fac: RankFactorization | None = None) -> ScalarKernel:
    fac = build_rank_factorization(setup) if fac is None else fac
    KN, D, E = setup.KN, setup.D, setup.eps
    if flavor == "SN4":
        S = E @ KN
        if fac.n:
            Ti = np.linalg.inv(fac.T)
            left = fac.psi_t @ E.T  # rows: eps psi~_i
            right = fac.psi @ E.T @ KN  # rows: K_N eps psi_j
            S = S - left.T @ Ti @ right
    elif flavor == "SN1":
        S = D @ KN
        if fac.eta.shape[0]:
            Ui = np.linalg.inv(fac.U)
            left = fac.eta_t @ D.T
            right = fac.eta @ D.T @ KN
            S = S - left.T @ Ui @ right
    else:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    return ScalarKernel(S, flavor, "rank_builder", {"n": fac.n, "T": fac.T, "U": fac.U})


# -- closed forms ------------------------------------------------------------------


def closed_form_vectors(setup: KernelSetup) -> tuple[np.ndarray, np.ndarray, dict]:
    """The rank-one pair ``(psi_1, psi_2)`` and the nominal scalars.

    Meixner: ``psi_1 = (sqrt(2Nc) phi_2N - sqrt(2N+beta-1) phi_{2N-1})/(x+beta)``
    and ``psi_2 = (sqrt(2N+beta-1) phi_2N - sqrt(2Nc) phi_{2N-1})/(x+beta-1)``.
    Charlier: ``psi_1 = phi_{2N-1}``, ``psi_2 = phi_2N``.
    """
    kind = setup.weight.kind
    N = setup.N
    p2, p1 = setup.phi[2 * N], setup.phi[2 * N - 1]
    x = np.arange(setup.L + 1, dtype=float)
    if isinstance(kind, Meixner):
        b, c = kind.beta, kind.c
        psi1 = (math.sqrt(2 * N * c) * p2 - math.sqrt(2 * N + b - 1) * p1) / (x + b)
        psi2 = (math.sqrt(2 * N + b - 1) * p2 - math.sqrt(2 * N * c) * p1) / (x + b - 1)
        lam = math.sqrt(2 * N * (2 * N + b - 1)) / ((1 - c) * math.sqrt(c))
        printed = {"SN4": lam, "SN1": lam}
        candidates = [lam, -lam]
    elif isinstance(kind, Charlier):
        a = kind.a
        psi1, psi2 = p1.copy(), p2.copy()
        printed = {"SN4": math.sqrt(2 * N / a), "SN1": math.sqrt(2 * N) / a}
        candidates = [math.sqrt(2 * N / a), -math.sqrt(2 * N / a), math.sqrt(2 * N) / a, -math.sqrt(2 * N) / a]
    else:
        raise KernelError("closed forms exist only for Meixner and Charlier weights")
    return psi1, psi2, {"printed": printed, "candidates": candidates}


@dataclass
class ClosedFormReport:
    flavor: str
    nominal_scalar: float
    nominal_residual: float
    resolved_scalar: float
    resolved_residual: float
    fitted_scalar: float
    record: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def build_S_closed(flavor: str, setup: KernelSetup, reference: ScalarKernel | None = None,
                   scalar: float | str = "resolved") -> tuple[ScalarKernel, ClosedFormReport]:
    """``eps K_N + lam (eps psi_2) (x) (eps psi_1)`` or ``D K_N + lam psi_2 (x) psi_1``.

    ``scalar="printed"`` uses the nominal scalar as is; ``"resolved"``
    picks, among the sign and scalar variants, the one closest to the
    inversion-route reference; a float is used directly.
    """
    psi1, psi2, info = closed_form_vectors(setup)
    KN, D, E = setup.KN, setup.D, setup.eps
    if flavor == "SN4":
        base = E @ KN
        R1 = np.outer(E @ psi2, E @ psi1)
    elif flavor == "SN1":
        base = D @ KN
        R1 = np.outer(psi2, psi1)
    else:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    ref = build_S_inversion(flavor, setup) if reference is None else reference
    w = setup.window
    diff = (ref.matrix - base)[w, w]
    r1 = R1[w, w]
    fitted = float(np.sum(diff * r1) / np.sum(r1 * r1))

    def resid(lam):
        return float(np.max(np.abs(diff - lam * r1)))

    printed = info["printed"][flavor]
    best = min(info["candidates"], key=resid)
    if scalar == "printed":
        lam = printed
    elif scalar == "resolved":
        lam = best
    else:
        lam = float(scalar)
    if best == printed:
        record = f"{flavor}: nominal scalar {printed:+.6g} confirmed"
    else:
        record = (f"{flavor}: nominal scalar {printed:+.6g} rejected "
                  f"(residual {resid(printed):.3g}); using {best:+.6g} (residual {resid(best):.3g})")
    rep = ClosedFormReport(flavor, printed, resid(printed), best, resid(best), fitted, record)
    S = base + lam * R1
    return ScalarKernel(S, flavor, "closed_form", {"scalar": lam, "report": rep}), rep


# -- matrix kernels ----------------------------------------------------------------


def assemble_matrix_kernel(flavor: str, S: ScalarKernel | np.ndarray, setup: KernelSetup) -> MatrixKernel2x2:
    S = S.matrix if isinstance(S, ScalarKernel) else np.asarray(S)
    ops, E = setup.ops, setup.eps
    if flavor == "K_N4":
        Dp, Dm = ops["Dplus"].matrix, ops["Dminus"].matrix
        DpS = Dp @ S
        blocks = ((DpS, -DpS @ Dm), (S, -S @ Dm))
    elif flavor == "K_N4_nabla":
        Np, Nm = ops["NablaPlus"].matrix, ops["NablaMinus"].matrix
        NpS = Np @ S
        blocks = ((NpS, -NpS @ Nm), (S, -S @ Nm))
    elif flavor == "K_N1":
        SE = S @ E
        blocks = ((SE, S), (E @ SE - E, E @ S))
    else:
        raise ValueError(f"unknown matrix kernel flavor {flavor!r}")
    return MatrixKernel2x2(blocks, flavor)


def symplectic_kernel(weight: DiscreteWeight, N: int, L: int | None = None, route: str = "inversion",
                      nabla: bool = False, setup: KernelSetup | None = None) -> MatrixKernel2x2:
    setup = prepare(weight, N, L) if setup is None else setup
    S = _route_kernel("SN4", setup, route)
    return assemble_matrix_kernel("K_N4_nabla" if nabla else "K_N4", S, setup)


def orthogonal_kernel(weight: DiscreteWeight, N: int, L: int | None = None, route: str = "inversion",
                      setup: KernelSetup | None = None) -> MatrixKernel2x2:
    setup = prepare(weight, N, L) if setup is None else setup
    return assemble_matrix_kernel("K_N1", _route_kernel("SN1", setup, route), setup)


def _route_kernel(flavor: str, setup: KernelSetup, route: str) -> ScalarKernel:
    if route == "inversion":
        return build_S_inversion(flavor, setup)
    if route in ("rank", "rank_builder"):
        return build_S_rank(flavor, setup)
    if route in ("closed", "closed_form"):
        return build_S_closed(flavor, setup)[0]
    raise ValueError(f"unknown route {route!r}")


# -- identity checks ------------------------------------------------------------------


@dataclass
class ProjectionReport:
    reproduce: float
    annihilate: float
    skew: float


def projection_identities(flavor: str, S: ScalarKernel | np.ndarray, setup: KernelSetup) -> ProjectionReport:
    """``S K_N D phi_i = phi_i`` (or ``S K_N eps phi_i``) for ``i < 2N`` and
    ``S phi_j = 0`` for ``j >= 2N``, plus ``S^T = -S``."""
    S = S.matrix if isinstance(S, ScalarKernel) else np.asarray(S)
    N = setup.N
    op = setup.D if flavor == "SN4" else setup.eps
    B = setup.table.basis(N)
    img = (S @ setup.KN @ op @ B.T).T
    w = setup.window
    rep = float(np.max(np.abs((img - B)[:, w])))
    rest = setup.phi[2 * N :]
    ann = float(np.max(np.abs(S @ rest.T))) if len(rest) else 0.0
    return ProjectionReport(rep, ann, float(np.max(np.abs(S + S.T))))


def resolvent_identity(flavor: str, S: ScalarKernel | np.ndarray, setup: KernelSetup) -> float:
    """``D S = (I - [D,K_N] K_N eps)^{-1} K_N`` (symplectic) or
    ``eps S = (I - [eps,K_N] K_N D)^{-1} K_N`` (orthogonal), on the trusted
    window.  Both sides are applied to ``H_N``."""
    S = S.matrix if isinstance(S, ScalarKernel) else np.asarray(S)
    KN, D, E = setup.KN, setup.D, setup.eps
    I = np.eye(setup.L + 1)
    if flavor == "SN4":
        lhs = D @ S
        C = (D @ KN - KN @ D) @ KN @ E
    else:
        lhs = E @ S
        C = (E @ KN - KN @ E) @ KN @ D
    rhs = np.linalg.solve(I - C, KN)
    w = setup.window
    return float(np.max(np.abs(((lhs - rhs) @ KN)[w, w])))


@dataclass
class CommutatorReport:
    sv_ratio: float
    rank: int
    symmetry: float
    closed_residual: float


def commutator_check(setup: KernelSetup) -> CommutatorReport:
    """Rank of ``[D, K_N] K_N`` and the explicit commutator forms.

    Charlier: ``[D, K_N] = sqrt(2N/a) (phi_{2N-1} (x) phi_2N + phi_2N (x) phi_{2N-1})``.
    Meixner: ``[D, K_N] = -lam (psi_1 (x) psi_2 + psi_2 (x) psi_1)`` with
    ``lam = sqrt(2N(2N+beta-1)) / ((1-c) sqrt(c))``.
    """
    C = commutator(setup)
    w = setup.window
    s = np.linalg.svd((C @ setup.KN)[w, :], compute_uv=False)
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    sym = float(np.max(np.abs((C - C.T)[w, w])))
    kind = setup.weight.kind
    N = setup.N
    closed = float("nan")
    if isinstance(kind, Charlier):
        p2, p1 = setup.phi[2 * N], setup.phi[2 * N - 1]
        ref = math.sqrt(2 * N / kind.a) * (np.outer(p1, p2) + np.outer(p2, p1))
        closed = float(np.max(np.abs((C - ref)[w, w])))
    elif isinstance(kind, Meixner):
        psi1, psi2, info = closed_form_vectors(setup)
        lam = info["printed"]["SN4"]
        ref = -lam * (np.outer(psi1, psi2) + np.outer(psi2, psi1))
        closed = float(np.max(np.abs((C - ref)[w, w])))
    return CommutatorReport(float(s[1] / s[0]) if len(s) > 1 else 0.0, rank, sym, closed)


# -- the 2x2 D_- matrices ---------------------------------------------------------------


def dminus_matrix(kind, N: int, x, variant: str = "derived") -> np.ndarray:
    """``D_-(x)`` with ``(D_- phi_2N, D_- phi_{2N-1})^T = D_-(x) (phi_2N, phi_{2N-1})^T``.

    ``variant="printed"`` reproduces the nominal entries, which differ from the derived ones in
    the (1,2) entry: the Meixner form is ``sqrt(2N(2N+beta-1))/sqrt(c(x+beta-1))``
    and the Charlier form is ``sqrt(2N)/a``.
    """
    x = np.asarray(x, dtype=float)
    n = 2 * N
    if isinstance(kind, Meixner):
        b, c = kind.beta, kind.c
        g = math.sqrt(n * (n + b - 1))
        d = x + b - 1
        m11 = (x - n) / (c * d)
        m12 = g / (math.sqrt(c) * d) if variant == "derived" else g / np.sqrt(c * d)
        m21 = -g / (math.sqrt(c) * d)
        m22 = (x + n + b - 1) / d
    elif isinstance(kind, Charlier):
        a = kind.a
        m11 = (x - n) / a
        m12 = math.sqrt(n / a) if variant == "derived" else math.sqrt(n) / a
        m21 = -math.sqrt(n / a)
        m22 = 1.0
    else:
        raise KernelError("explicit D_- matrices exist only for Meixner and Charlier weights")
    one = np.ones_like(x)
    return np.array([[m11 * one, m12 * one], [m21 * one, m22 * one]])


@dataclass
class DMinusReport:
    derived: float
    printed: float
    plus_relations: float
    determinant: float


def dminus_matrix_check(setup: KernelSetup, xs=None) -> DMinusReport:
    """Residuals of the ``D_-`` action, the ``D_+``/``D_-`` shift relations
    and ``det D_-(x+1) = w(x)/w(x+1)``."""
    kind = setup.weight.kind
    N = setup.N
    L = setup.L
    xs = np.arange(1, L + 1 - 2 * setup.trunc.margin) if xs is None else np.asarray(xs)
    Dp, Dm = setup.ops["Dplus"].matrix, setup.ops["Dminus"].matrix
    p = np.array([setup.phi[2 * N], setup.phi[2 * N - 1]])
    act_m = (p @ Dm.T)[:, xs]
    act_p = (p @ Dp.T)[:, xs]
    pv = p[:, xs]

    def resid(variant):
        M = dminus_matrix(kind, N, xs, variant)
        pred = np.einsum("ijx,jx->ix", M, pv)
        return float(np.max(np.abs(pred - act_m)))

    Mn = dminus_matrix(kind, N, xs + 1)
    Mp = np.array([[Mn[1, 1], -Mn[0, 1]], [-Mn[1, 0], Mn[0, 0]]])
    plus = float(np.max(np.abs(np.einsum("ijx,jx->ix", Mp, pv) - act_p)))
    det = Mn[0, 0] * Mn[1, 1] - Mn[0, 1] * Mn[1, 0]
    lw = setup.weight.log_table(L + 2)
    ratio = np.exp(lw[xs] - lw[xs + 1])
    det_err = float(np.max(np.abs(det - ratio) / np.abs(ratio)))
    return DMinusReport(resid("derived"), resid("printed"), plus, det_err)


def route_agreement(flavor: str, setup: KernelSetup) -> dict:
    """Max entrywise differences of the rank and closed routes from inversion."""
    w = setup.window
    ref = build_S_inversion(flavor, setup)
    out = {"rank": float(np.max(np.abs((build_S_rank(flavor, setup).matrix - ref.matrix)[w, w])))}
    try:
        S, rep = build_S_closed(flavor, setup, ref)
        out["closed"] = float(np.max(np.abs((S.matrix - ref.matrix)[w, w])))
        out["closed_record"] = rep.record
    except KernelError:
        pass
    return out
