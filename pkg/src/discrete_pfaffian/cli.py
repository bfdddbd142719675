"""Command-line front end.

Subcommands: ``kernel``, ``correlate``, ``oracle``, ``verify``, ``limit``,
``zmeasure``.  Options may also come from a ``key=value`` file passed with
``--config``; flags override it.  Output goes to ``--out``, else to
``$DISCRETE_PFAFFIAN_OUT``, else to ``./dp_out``.

Exit codes: 0 success, 1 computational failure (including failed checks),
2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .weights import Charlier, DomainError, GenericRational, Meixner, ParameterError, Truncation, make_weight

OUT_ENV = "DISCRETE_PFAFFIAN_OUT"
SUITES = ("debruijn", "operators", "projection", "commutators", "difference", "zmeasure", "oracle")


class InputError(ValueError):
    """Invalid command-line input."""


# -- parsing helpers --------------------------------------------------------------------


def parse_weight(text: str):
    """``charlier:a=1``, ``meixner:beta=2,c=0.3`` or ``generic:d1=0;1;1,d2=2;1,w0=1``."""
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise InputError(f"weight parameter {item!r} is not key=value")
        params[key.strip()] = val.strip()
    name = name.strip().lower()
    try:
        if name == "charlier":
            kind = Charlier(float(params["a"]))
        elif name == "meixner":
            kind = Meixner(float(params["beta"]), float(params["c"]))
        elif name == "generic":
            d1 = tuple(float(v) for v in params["d1"].split(";"))
            d2 = tuple(float(v) for v in params["d2"].split(";"))
            kind = GenericRational(d1, d2, float(params.get("w0", 1.0)))
        else:
            raise InputError(f"unknown weight family {name!r}")
    except KeyError as exc:
        raise InputError(f"weight {name!r} is missing parameter {exc.args[0]!r}") from None
    except ValueError as exc:
        raise InputError(f"bad weight parameter: {exc}") from None
    return make_weight(kind)


def parse_points(text: str) -> list[int]:
    try:
        pts = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"points must be comma-separated integers, got {text!r}") from None
    if not pts or min(pts) < 0:
        raise InputError("points must be nonnegative and nonempty")
    return pts


def parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def read_config(path: str) -> dict:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise InputError(f"{path}:{n}: expected key=value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _flavor(text: str) -> str:
    t = text.lower()
    if t in ("sympl", "symplectic", "sn4"):
        return "symplectic"
    if t in ("orth", "orthogonal", "sn1"):
        return "orthogonal"
    raise InputError(f"unknown flavor {text!r}")


# -- output -------------------------------------------------------------------------------


@dataclass
class Check:
    check_id: str
    identity: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual < self.tolerance)

    def as_dict(self) -> dict:
        return {"check_id": self.check_id, "identity": self.identity, "residual": _num(self.residual),
                "tolerance": self.tolerance, "pass": self.passed}


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return _num(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def out_dir(args) -> Path:
    d = Path(args.out or os.environ.get(OUT_ENV) or "dp_out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_matrix_csv(path: Path, M: np.ndarray, header: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# rows={M.shape[0]} cols={M.shape[1]} {header}\n")
        w = csv.writer(fh, lineterminator="\n")
        for row in M:
            w.writerow([repr(float(v)) for v in row])


def write_rows_csv(path: Path, rows: list[dict]) -> None:
    keys = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v for k, v in r.items()})


# -- verify suites ------------------------------------------------------------------------


def suite_debruijn(args) -> tuple[list[Check], dict]:
    from .pfaffian import de_bruijn_checks, pfaffian

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for n in range(2, 13, 2):
        for _ in range(5):
            A = rng.normal(size=(n, n))
            A = A - A.T
            p, d = pfaffian(A), np.linalg.det(A)
            worst = max(worst, abs(p * p - d) / max(abs(d), 1e-300))
    rep = de_bruijn_checks(seed=args.seed)
    checks = [
        Check("pf_squared", "Pf(A)^2 = det(A), dims 2-12", worst, 1e-10),
        Check("debruijn_pair", "sum over N-subsets of det[phi_i(x), psi_i(x)] = Pf of the antisymmetrized Gram", rep.pair_rel, 1e-10),
        Check("debruijn_eps", "sum over 2N-subsets of det(phi) Pf(eps) = Pf(phi eps phi^T)", rep.eps_rel, 1e-10),
        Check("shifted_vandermonde", "det[p_j(x_i), p_j(x_i+1)] = prod (x_j-x_i)^2((x_j-x_i)^2-1)", rep.vandermonde_rel, 1e-10),
    ]
    return checks, {"cases": rep.cases}


def suite_operators(args) -> tuple[list[Check], dict]:
    from .kernels import prepare
    from .operators import compare_epsilon_closed, epsilon_factorization_check, mutual_inverse_check

    w = args.weight_obj
    setup = prepare(w, args.N, L=args.L)
    tr = setup.trunc
    E, D = setup.eps, setup.D
    rng = np.random.default_rng(args.seed)
    probes = [rng.normal(size=tr.L + 1) for _ in range(5)]
    r1, r2 = mutual_inverse_check(D, E, tr, probes)
    kr = setup.kn_report
    checks = [
        Check("eps_antisymmetric", "eps + eps^T = 0", float(np.max(np.abs(E + E.T))), 1e-12),
        Check("eps_factorization", "eps = F Upsilon F", epsilon_factorization_check(w, tr), 1e-10),
        Check("D_eps_identity", "D eps = I on the trusted window", r1, 1e-8),
        Check("eps_D_identity", "eps D = I on the trusted window", r2, 1e-8),
        Check("KN_idempotent", "K_N^2 = K_N", kr.idempotency, 1e-9),
        Check("KN_trace", "tr K_N = 2N", kr.trace_err, 1e-8),
        Check("KN_christoffel_darboux", "CD closed form = direct sum off the diagonal (relative)", kr.cd_rel, 1e-8),
    ]
    extra = {}
    if isinstance(w.kind, (Meixner, Charlier)):
        variant = "printed" if isinstance(w.kind, Meixner) else "sqrt"
        box = slice(0, min(12, tr.L + 1))
        maps = {}
        for v in ("printed", "sqrt") if isinstance(w.kind, Charlier) else ("printed",):
            rep = compare_epsilon_closed(w, tr, v)
            maps[v] = {"max_abs_diff": rep.max_abs_diff, "residual_map": rep.residual_map[box, box]}
            if v == variant:
                checks.append(Check(f"eps_closed_{v}", "closed-form epsilon = generic epsilon", rep.max_abs_diff, 1e-8))
        extra["epsilon_closed_vs_generic"] = maps
    return checks, extra


def suite_projection(args) -> tuple[list[Check], dict]:
    from .kernels import build_S_inversion, prepare, projection_identities, resolvent_identity

    setup = prepare(args.weight_obj, args.N, L=args.L)
    checks = []
    for flavor, op in (("SN4", "D"), ("SN1", "eps")):
        S = build_S_inversion(flavor, setup)
        rep = projection_identities(flavor, S, setup)
        checks += [
            Check(f"{flavor}_reproduces_HN", f"S K_N {op} phi_i = phi_i for i < 2N", rep.reproduce, 1e-8),
            Check(f"{flavor}_annihilates_complement", "S phi_j = 0 for j >= 2N", rep.annihilate, 1e-8),
            Check(f"{flavor}_antisymmetric", "S^T = -S", rep.skew, 1e-8),
            Check(f"{flavor}_resolvent", "resolvent form of the kernel", resolvent_identity(flavor, S, setup), 1e-8),
        ]
    return checks, {}


def suite_commutators(args) -> tuple[list[Check], dict]:
    from .kernels import build_rank_factorization, commutator_check, dminus_matrix_check, prepare

    w = args.weight_obj
    setup = prepare(w, args.N, L=args.L)
    rep = commutator_check(setup)
    fac = build_rank_factorization(setup, route="analytic" if w.poles() or w.n_inf else "numeric")
    T = np.atleast_2d(fac.T)
    checks = [
        Check("commutator_rank", "sigma_2/sigma_1 of [D, K_N] K_N (rank one)", rep.sv_ratio, 1e-8),
        Check("commutator_factor", "[D, K_N] K_N = sum psi~_i (x) psi_i", fac.factor_residual, 1e-8),
        Check("T_identity", "T = 1", float(np.max(np.abs(T - np.eye(len(T))))), 1e-8),
    ]
    extra = {"rank": rep.rank, "T": T}
    if isinstance(w.kind, (Meixner, Charlier)):
        checks.append(Check("commutator_closed", "explicit rank-two symmetric commutator", rep.closed_residual, 1e-8))
        dm = dminus_matrix_check(setup)
        checks += [
            Check("dminus_action", "D_- (phi_2N, phi_2N-1) = D_-(x) (phi_2N, phi_2N-1) (derived entries)", dm.derived, 1e-8),
            Check("dplus_action", "D_+ action from the inverse shifted matrix", dm.plus_relations, 1e-8),
            Check("dminus_determinant", "det D_-(x+1) = w(x)/w(x+1) (relative)", dm.determinant, 1e-9),
        ]
        extra["dminus_nominal_residual"] = dm.printed
    return checks, extra


def suite_difference(args) -> tuple[list[Check], dict]:
    from .orthofam import build_table, difference_residual, recurrence_residual
    from .weights import choose_cutoff

    w = args.weight_obj
    if not isinstance(w.kind, (Meixner, Charlier)):
        raise InputError("the difference suite needs a Meixner or Charlier weight")
    tr = choose_cutoff(w, 13, tail_tol=1e-30, relative=True, L_min=60)
    table = build_table(w, 13, tr, sign="origin")
    xs = np.arange(0, 41)
    worst = 0.0
    for n in range(1, 13):
        r1, r2 = difference_residual(table, n, xs)
        worst = max(worst, float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))
    return [
        Check("difference_system", "first-order system linking phi_n, phi_n-1 at x and x-1 (n<=12, x<=40)", worst, 1e-9),
        Check("three_term_recurrence", "monic three-term recurrence (relative)", recurrence_residual(table, xs), 1e-9),
    ], {"L": tr.L}


def suite_zmeasure(args) -> tuple[list[Check], dict]:
    from .zmeasure import (ZParams, hook_identity_residual, normalization_check, partitions,
                           proportionality_check)

    beta, xi, N = args.beta, args.xi, args.N
    ps = proportionality_check(beta, xi, N, "symplectic", seed=args.seed)
    po = proportionality_check(beta, xi, N, "orthogonal", seed=args.seed)
    hook = max(hook_identity_residual(lam) for n in range(1, 9) for lam in partitions(n))
    nrm = normalization_check(ZParams(2.0, 2.0, 2.0, 0.2), args.cutoff)
    return [
        Check("proportionality_symplectic", "z-measure ratio = symplectic lattice weight ratio", ps.max_rel, 1e-10),
        Check("proportionality_orthogonal", "z-measure ratio = orthogonal lattice weight ratio", po.max_rel, 1e-10),
        Check("hook_identity", "1/(H H') at theta=2 as a product over transposed parts", hook, 1e-10),
        Check("normalization", f"sum of the measure over |lambda| <= {args.cutoff} (z=z'=2, xi=0.2)", abs(nrm.deficit), 1e-8),
    ], {"skipped_pairs": [ps.skipped, po.skipped]}


def suite_oracle(args) -> tuple[list[Check], dict]:
    from .kernels import orthogonal_kernel, prepare, symplectic_kernel
    from .oracle import EnsembleSpec, compare

    w = args.weight_obj
    L = args.L or 40
    setup = prepare(w, args.N, L=L)
    tr = Truncation(L)
    checks = []
    extra = {}
    for flavor, K, tol in (("symplectic", symplectic_kernel(w, args.N, setup=setup), 1e-8),
                           ("orthogonal", orthogonal_kernel(w, args.N, setup=setup), 1e-6)):
        rep = compare(EnsembleSpec(flavor, args.N, w, tr), K, trials=args.trials, seed=args.seed)
        checks += [
            Check(f"{flavor}_generating_functional", "sqrt det(I + eta K) = E prod(1 + eta(x_i))", rep.gen_max, tol),
            Check(f"{flavor}_density", "rho_1 from the kernel = enumerated density", rep.rho1_max, tol),
            Check(f"{flavor}_pair_correlation", "rho_2 from the kernel = enumerated rho_2", rep.rho2_max, tol),
            Check(f"{flavor}_hole", "hole probability from the kernel = enumerated", rep.hole_max, tol),
        ]
        extra[flavor] = rep.as_dict()
    return checks, extra


SUITE_FUNCS = {
    "debruijn": suite_debruijn,
    "operators": suite_operators,
    "projection": suite_projection,
    "commutators": suite_commutators,
    "difference": suite_difference,
    "zmeasure": suite_zmeasure,
    "oracle": suite_oracle,
}


# -- commands -----------------------------------------------------------------------------


def cmd_verify(args) -> int:
    checks, extra = SUITE_FUNCS[args.suite](args)
    report = {"suite": args.suite, "weight": args.weight_obj.label(), "N": args.N, "seed": args.seed,
              "checks": [c.as_dict() for c in checks], "details": extra,
              "pass": all(c.passed for c in checks)}
    text = dumps(report)
    (out_dir(args) / f"verify_{args.suite}.json").write_text(text)
    sys.stdout.write(text)
    return 0 if report["pass"] else 1


def cmd_kernel(args) -> int:
    from .kernels import assemble_matrix_kernel, build_S_closed, prepare, route_agreement, _route_kernel

    w = args.weight_obj
    flavor = _flavor(args.flavor)
    setup = prepare(w, args.N, L=args.L)
    sflavor = "SN4" if flavor == "symplectic" else "SN1"
    S = _route_kernel(sflavor, setup, args.route)
    mflavor = "K_N1" if flavor == "orthogonal" else ("K_N4_nabla" if args.nabla else "K_N4")
    K = assemble_matrix_kernel(mflavor, S, setup)
    d = out_dir(args)
    hdr = f"weight={w.label()} N={args.N} L={setup.L} flavor={mflavor} route={args.route}"
    for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
        write_matrix_csv(d / f"kernel_{mflavor}_{i}{j}.csv", K.blocks[i][j], f"{hdr} block={i}{j}")
    report = {"weight": w.label(), "N": args.N, "L": setup.L, "flavor": mflavor, "route": args.route,
              "route_agreement": route_agreement(sflavor, setup)}
    if args.route in ("closed", "closed_form"):
        report["sign_resolution"] = build_S_closed(sflavor, setup)[1].as_dict()
    text = dumps(report)
    (d / f"kernel_{mflavor}_report.json").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_correlate(args) -> int:
    from .kernels import orthogonal_kernel, prepare, symplectic_kernel
    from .pfaffian import correlation

    w = args.weight_obj
    pts = parse_points(args.points)
    setup = prepare(w, args.N, L=args.L)
    if max(pts) >= setup.L + 1 - 2 * setup.trunc.margin:
        raise InputError(f"points must lie below {setup.L + 1 - 2 * setup.trunc.margin}")
    flavor = _flavor(args.flavor)
    K = symplectic_kernel(w, args.N, setup=setup) if flavor == "symplectic" else orthogonal_kernel(w, args.N, setup=setup)
    rho, terms = correlation(K, pts, return_terms=True)
    report = {"weight": w.label(), "N": args.N, "flavor": flavor, "points": pts, "rho": rho,
              "subset_terms": [{"subset": list(s), "sqrt_det": g} for s, g in terms]}
    text = dumps(report)
    (out_dir(args) / "correlate.json").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    from .oracle import EnsembleSpec, enumerate_ensemble, oracle_density

    w = args.weight_obj
    spec = EnsembleSpec(_flavor(args.flavor), args.N, w, Truncation(args.L or 30))
    dist = enumerate_ensemble(spec)
    d = out_dir(args)
    rho = oracle_density(dist)
    write_rows_csv(d / "oracle_density.csv", [{"x": x, "rho1": float(r)} for x, r in enumerate(rho)])
    report = {"weight": w.label(), "flavor": spec.flavor, "N": args.N, "L": spec.trunc.L,
              "configurations": int(len(dist.configs)), "log_Z": dist.log_Z,
              "top": [{"config": list(c), "prob": p} for c, p in dist.top(args.top)]}
    text = dumps(report)
    (d / "oracle.json").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_limit(args) -> int:
    from .limits import charlier_limit_check, laguerre_limit_check

    d = out_dir(args)
    if args.target == "charlier":
        sched = parse_floats(args.schedule) if args.schedule else [10.0, 1e2, 1e3, 1e4]
        rows = [r.__dict__ for r in charlier_limit_check(args.a, args.n, sched, N=args.N)]
    else:
        sched = parse_floats(args.schedule) if args.schedule else [0.9, 0.99, 0.999]
        rows = []
        for r in laguerre_limit_check(args.alpha, args.N, sched):
            row = {"c": r.c, "L": r.L}
            row.update(r.diffs)
            row.update(r.parity)
            rows.append(row)
    path = d / f"limit_{args.target}.csv"
    write_rows_csv(path, rows)
    sys.stdout.write(path.read_text())
    return 0


def cmd_zmeasure(args) -> int:
    from .zmeasure import (ZParams, companion_ratio_check, hook_identity_residual, normalization_check,
                           partitions, proportionality_check)

    if args.check == "proportionality":
        rep = proportionality_check(args.beta, args.xi, args.N, _flavor(args.flavor), pairs=args.pairs,
                                    seed=args.seed)
        report = {"check": "proportionality", "flavor": rep.flavor, "max_rel_error": rep.max_rel,
                  "pairs": rep.pairs, "skipped": rep.skipped, "log_constant_spread": rep.constant_spread}
    elif args.check == "hook":
        worst = max(hook_identity_residual(lam) for n in range(1, args.cutoff + 1) for lam in partitions(n))
        report = {"check": "hook", "max_rel_error": worst, "max_size": args.cutoff}
    elif args.check == "normalization":
        rep = normalization_check(ZParams(args.z, args.zp, 2.0, args.xi), args.cutoff)
        report = {"check": "normalization", "partial_sum": rep.partial_sum, "deficit": rep.deficit,
                  "tail_estimate": rep.tail_estimate}
    else:
        report = {"check": "companion", "max_rel_error": companion_ratio_check(args.beta, args.xi, args.N,
                                                                               pairs=args.pairs, seed=args.seed)}
    text = dumps(report)
    (out_dir(args) / f"zmeasure_{args.check}.json").write_text(text)
    sys.stdout.write(text)
    return 0


# -- argument parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="discrete-pfaffian", description=__doc__.split("\n")[0])
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./dp_out)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weight=True):
        if weight:
            sp.add_argument("--weight", default="charlier:a=1")
        sp.add_argument("--N", type=int, default=1)
        sp.add_argument("--L", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)

    k = sub.add_parser("kernel", help="write the 2x2 matrix kernel blocks")
    common(k)
    k.add_argument("--flavor", default="sympl")
    k.add_argument("--route", default="inversion", choices=["inversion", "rank", "closed"])
    k.add_argument("--nabla", action="store_true", help="use the nabla form of the symplectic kernel")
    k.set_defaults(func=cmd_kernel)

    c = sub.add_parser("correlate", help="correlation function at given points")
    common(c)
    c.add_argument("--flavor", default="sympl")
    c.add_argument("--points", required=False, default="0")
    c.set_defaults(func=cmd_correlate)

    o = sub.add_parser("oracle", help="enumerate a truncated ensemble")
    common(o)
    o.add_argument("--flavor", default="sympl")
    o.add_argument("--top", type=int, default=10)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("--suite", required=False, default="oracle", choices=SUITES)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--beta", type=float, default=2.0)
    v.add_argument("--xi", type=float, default=0.3)
    v.add_argument("--cutoff", type=int, default=30)
    v.set_defaults(func=cmd_verify)

    lm = sub.add_parser("limit", help="convergence tables for the limit transitions")
    common(lm, weight=False)
    lm.add_argument("--target", choices=["charlier", "laguerre"], default="laguerre")
    lm.add_argument("--alpha", type=float, default=1.0)
    lm.add_argument("--a", type=float, default=1.0)
    lm.add_argument("--n", type=int, default=3)
    lm.add_argument("--schedule", default=None, help="comma-separated beta (charlier) or c (laguerre)")
    lm.set_defaults(func=cmd_limit)

    z = sub.add_parser("zmeasure", help="z-measure checks")
    common(z, weight=False)
    z.add_argument("--check", choices=["proportionality", "hook", "normalization", "companion"],
                   default="proportionality")
    z.add_argument("--flavor", default="sympl")
    z.add_argument("--beta", type=float, default=2.0)
    z.add_argument("--xi", type=float, default=0.3)
    z.add_argument("--z", type=float, default=2.0)
    z.add_argument("--zp", type=float, default=2.0)
    z.add_argument("--pairs", type=int, default=50)
    z.add_argument("--cutoff", type=int, default=30)
    z.set_defaults(func=cmd_zmeasure)
    return p


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        cfg = read_config(pre.config)
        sp = parser._subparsers._group_actions[0].choices[pre.command]
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, val in cfg.items():
            act = known.get(key)
            if act is None:
                raise InputError(f"unknown config key {key!r}")
            if act.type is not None:
                val = act.type(val)
            elif isinstance(act, argparse._StoreTrueAction):
                val = val.lower() in ("1", "true", "yes")
            defaults[key] = val
        sp.set_defaults(**defaults)
    args = parser.parse_args(argv)
    if getattr(args, "N", 1) < 1:
        raise InputError("N must be positive")
    if hasattr(args, "weight"):
        args.weight_obj = parse_weight(args.weight)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    except (InputError, ParameterError, DomainError, ValueError, TypeError, FileNotFoundError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        mod = type(exc).__module__.rsplit(".", 1)[-1]
        print(f"error [{mod}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
