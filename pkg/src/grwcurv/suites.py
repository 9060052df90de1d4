"""Canonical verification suites.

A suite returns a list of checks.  A check is a plain dict with a name, the observed
value or residual, the tolerance and a status; "vacuous" checks never affect the verdict.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .chartgeo import (
    christoffel,
    product_field,
    product_of_spheres,
    random_curvature_snapshot,
    random_metric_field,
    sample_points,
    snapshot_from_field,
    space_form_snapshot,
    sphere_field,
    flat_snapshot,
    two_jet,
)
from .conditionlab import (
    check_d1_d3,
    check_genein1,
    check_h1,
    check_sr2,
    classify_sets,
    fit_condition,
    ge_residual,
    h1_snapshot,
    planted_roter,
    products,
    quasi_einstein,
    roter_fit,
    roter_snapshot,
)
from .gaussfiber import (
    diagonal_fixture,
    e1_lambda,
    e2_check,
    e3_check,
    e4_check,
    gauss_snapshot,
    jordan3_fixture,
    nilpotent_fixture,
    sr2_from_e4,
)
from .tensorkit import norm
from .warpedlab import (
    WarpedSpec,
    admissible_points,
    b8_check,
    b9_residual,
    custom,
    exponential,
    quadratic,
    sinusoidal,
    vrs_residual,
    warp_scalars,
    warped_blocks,
    warped_christoffel,
    warped_field,
    warped_snapshot,
)


def check(name: str, residual: Optional[float], tol: float, *, expected=None, observed=None,
          holds: Optional[bool] = None, status: str = "ok", **info) -> dict:
    """One suite entry; ``holds`` defaults to residual <= tol."""
    if status == "vacuous":
        holds = True
    elif holds is None:
        holds = residual is not None and bool(np.isfinite(residual)) and residual <= tol
    return {"name": name, "status": status, "holds": bool(holds),
            "expected": expected, "observed": observed,
            "residual": residual, "tol": tol, **info}


def _coef_check(name, fit, expected, tol):
    """Fitted coefficient against an expected constant; degenerate fits are vacuous."""
    if fit.status != "ok" or not fit.coefficients:
        return check(name, None, tol, expected=expected, status="vacuous", reason=fit.status)
    L = fit.coefficients[0]
    err = abs(L - expected)
    return check(name, err, tol, expected=expected, observed=L, fit_residual=fit.residual,
                 holds=err <= tol and fit.residual <= tol)


def fixture_snapshots() -> list:
    """Named fixture snapshots with n >= 4 used by several suites."""
    s22 = product_of_spheres(2, 2)
    out = [
        ("S2xS2", s22),
        ("S4", product_of_spheres(4)),
        ("dS4", space_form_snapshot(4, 1.0, signature=1)),
        ("flat5", flat_snapshot(5, signature=1)),
        ("S2xS2xR", h1_snapshot(seed=1)),
        ("cor42", warped_snapshot(WarpedSpec(-1, quadratic(2, 3), 1.0, s22))),
        ("thm51-exp", warped_snapshot(WarpedSpec(-1, exponential(1.0, 2.0, 1 / 3, -1), 0.3, s22))),
        ("gauss-diag", gauss_snapshot(diagonal_fixture([1, 2, 0, 0], 20.0))),
        ("gauss-jordan4", gauss_snapshot(jordan3_fixture(4, 20.0))),
        ("roter", planted_roter(0.7, -0.3, 0.2, seed=3)[0]),
    ]
    return out


# --- suites ---------------------------------------------------------------------------


def suite_ge_random(seed: int = 0) -> list:
    out = []
    for k in range(100):
        s = seed + k
        dim = (4, 5, 6)[k % 3]
        fld = random_metric_field(dim, s % 2, seed=s)
        x = sample_points(fld, 1, seed=s)[0]
        out.append(check(f"ge random n={dim} seed={s}", ge_residual(snapshot_from_field(fld, x)),
                         1e-8))
    for name, snap in fixture_snapshots():
        out.append(check(f"ge fixture {name}", ge_residual(snap), 1e-8))
    return out


def suite_einstein_genein1(seed: int = 0) -> list:
    s22 = product_of_spheres(2, 2)
    r1, r2 = check_genein1(s22)
    fit = fit_condition(s22, "GENEINTSU")
    out = [
        check("S2xS2 R.C-C.R = 1/3 Q(g,R)", r1, 1e-9),
        check("S2xS2 R.C-C.R = 1/3 Q(g,C)", r2, 1e-9),
        _coef_check("S2xS2 L1", fit, 1 / 3, 1e-9),
    ]
    einstein = [
        ("S2xS2xS2", product_of_spheres(2, 2, 2)),
        ("dS5", space_form_snapshot(5, -2.0, signature=1)),
        ("gauss square-zero", gauss_snapshot(nilpotent_fixture([2, 1, 1], 7.0))),
        ("flat4", flat_snapshot(4)),
    ]
    for name, snap in einstein:
        a, b = check_genein1(snap)
        out.append(check(f"{name} genein1", max(a, b), 1e-9))
    return out


def suite_cor42(seed: int = 0) -> list:
    s22 = product_of_spheres(2, 2)
    fn = quadratic(2, 3)
    out = []
    for x in admissible_points(fn, 5, -1.0, 1.0):
        snap = warped_snapshot(WarpedSpec(-1, fn, float(x), s22))
        out.append(_coef_check(f"A1 L at x1={x:.4g}", fit_condition(snap, "A1"), 1 / 3, 1e-8))
        m = classify_sets(snap)
        out.append(check(f"curly-U membership at x1={x:.4g}", None, 0.0, holds=m.in_curlyU,
                         observed=m.in_curlyU, expected=True))
    return out


def suite_thm51(seed: int = 0) -> list:
    s22 = product_of_spheres(2, 2)
    n, kt = 5, s22.kappa
    C1 = kt / ((n - 1) * (n - 2))
    fams = [("exponential", -1, exponential(1.0, 2.0, C1, -1)),
            ("sinusoidal", 1, sinusoidal(0.0, 1.5, C1, 1))]
    out = []
    for name, eps, fn in fams:
        worst_L = worst_b8 = worst_b9 = 0.0
        min_tr = np.inf
        worst_fit = 0.0
        for x in admissible_points(fn, 50, -1.0, 1.0):
            spec = WarpedSpec(eps, fn, float(x), s22)
            fit = fit_condition(warped_snapshot(spec), "A1")
            L = fit.coefficients[0] if fit.coefficients else np.nan
            worst_L = max(worst_L, abs(L - 1 / (n - 1)))
            worst_fit = max(worst_fit, fit.residual)
            worst_b8 = max(worst_b8, b8_check(spec.jet(), eps, kt, n))
            worst_b9 = max(worst_b9, b9_residual(fn, float(x), eps, C1))
            min_tr = min(min_tr, abs(warp_scalars(spec.jet(), eps).trT))
        out += [
            check(f"{name} A1 L = 1/4 (50 pts)", worst_L, 1e-6, expected=0.25,
                  fit_residual=worst_fit, holds=worst_L <= 1e-6 and worst_fit <= 1e-6),
            check(f"{name} trT != 0", None, 0.0, holds=min_tr > 1e-8, observed=min_tr),
            check(f"{name} B8 residual", worst_b8, 1e-9),
            check(f"{name} B9 residual", worst_b9, 1e-12),
        ]
    # branch i: quadratic warps on the same Einstein fiber
    for a in (1.0, 2.0, 3.0):
        fn = quadratic(a, 4.0)
        snap = warped_snapshot(WarpedSpec(-1, fn, 0.5, s22))
        out.append(_coef_check(f"quadratic a={a:g} A1 L = 1/3", fit_condition(snap, "A1"),
                               1 / 3, 1e-8))
    return out


def _thm42_case(label: str, fiber_data, eps: int, a: float, n: int) -> list:
    fiber = gauss_snapshot(fiber_data)
    ea2 = eps * a * a
    q = quasi_einstein(fiber)
    d1, d3 = check_d1_d3(fiber, ea2)
    snap = warped_snapshot(WarpedSpec(eps, quadratic(a, 0.5), 0.3, fiber))
    fit = fit_condition(snap, "A1")
    p = products(snap)
    out = [
        check(f"{label} fiber non-Einstein", None, 0.0, holds=not q.is_einstein),
        check(f"{label} fiber quasi-Einstein", None, 0.0, holds=q.is_quasi_einstein,
              observed=q.alpha),
        check(f"{label} SR2 with ea2={ea2:g}", check_sr2(fiber, ea2), 1e-10),
        check(f"{label} D1", d1, 1e-9),
    ]
    if d3 is not None:
        out.append(check(f"{label} D3", d3, 1e-9))
    out.append(_coef_check(f"{label} warped A1 L = 1/{n - 2}", fit, 1 / (n - 2), 1e-8))
    if fit.status != "ok":
        # Q(S,R) = 0: the condition is vacuous and semisymmetry is checked instead
        out.append(check(f"{label} R.R = 0 where Q(S,R) = 0",
                         norm(p.RR) / (p.ngi * p.nR * p.nR), 1e-10))
    return out


def suite_thm42_jordan(seed: int = 0) -> list:
    out = _thm42_case("n=4 J3", jordan3_fixture(3, -12.0), -1, 1.0, 4)
    out += _thm42_case("n=5 J3+0", jordan3_fixture(4, -20.0), -1, 1.0, 5)
    # blocks J3 + J2: Q(S,R) != 0 on the warped product, so the fit is not vacuous
    out += _thm42_case("n=6 J3+J2", nilpotent_fixture([3, 2], -30.0), -1, 1.0, 6)
    return out


def random_warp(rng: np.random.Generator):
    kind = int(rng.integers(4))
    if kind == 0:
        return quadratic(rng.uniform(-2, 2), rng.uniform(2, 4))
    if kind == 1:
        return exponential(rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(-1, 1),
                           int(rng.choice([-1, 1])), sign=int(rng.choice([-1, 1])))
    if kind == 2:
        return sinusoidal(rng.uniform(0, 1), rng.uniform(0.5, 2), rng.uniform(0.1, 1), 1)
    c = rng.uniform(-0.5, 0.5, size=3)
    return custom(lambda x, xp=np, c=c: 2.0 + c[0] * x + c[1] * x * x + c[2] * xp.sin(2 * x),
                  coefficients=c.tolist())


def suite_r877_dim4(seed: int = 0) -> list:
    rng = np.random.default_rng([seed, 877])
    worst = 0.0
    passed = 0
    statuses = set()
    for _ in range(200):
        fiber = random_curvature_snapshot(3, rng, negatives=int(rng.integers(2)))
        fn = random_warp(rng)
        x = float(rng.choice(admissible_points(fn, 8)))
        snap = warped_snapshot(WarpedSpec(int(rng.choice([-1, 1])), fn, x, fiber))
        fit = fit_condition(snap, "R877", tol=1e-6)
        statuses.add(fit.status)
        worst = max(worst, fit.residual)
        passed += fit.holds
    return [check("R877 on 200 random 4-dim warped snapshots", worst, 1e-6,
                  observed=passed, expected=200, holds=passed == 200,
                  statuses=sorted(statuses))]


def suite_crosscheck(seed: int = 0) -> list:
    out = []
    fibers = [("S3", sphere_field(3)), ("S2xS2", product_field(sphere_field(2), sphere_field(2)))]
    rng = np.random.default_rng([seed, 7])
    fn = exponential(1.0, 2.0, 0.4, -1)
    for name, fib in fibers:
        wf = warped_field(-1, fn, fib)
        worst = worst_g = 0.0
        for k in range(10):
            y = rng.uniform(0.6, 1.2, size=fib.dim)
            x1 = float(rng.uniform(-0.8, 0.8))
            pt = np.concatenate([[x1], y])
            fiber_snap = snapshot_from_field(fib, y)
            closed = warped_snapshot(WarpedSpec(-1, fn, x1, fiber_snap))
            ad = snapshot_from_field(wf, pt, method="ad")
            worst = max(worst, norm(ad.R.data - closed.R.data) / norm(closed.R.data),
                        norm(ad.S.data - closed.S.data) / max(norm(closed.S.data), 1e-300))
            G_ad = christoffel(two_jet(wf, pt, method="ad"))
            G_bl = warped_christoffel(-1, fn, fib, pt)
            worst_g = max(worst_g, norm(G_ad - G_bl) / max(norm(G_ad), 1.0))
        out.append(check(f"closed form vs AD, fiber {name} (10 pts)", worst, 1e-7))
        out.append(check(f"Christoffel blocks, fiber {name}", worst_g, 1e-10))
    out += suite_blocks(seed)
    return out


def suite_blocks(seed: int = 0) -> list:
    rng = np.random.default_rng([seed, 8])
    worst = {k: 0.0 for k in ("QgR", "QSR", "V", "P")}
    worst_vrs = 0.0
    for _ in range(20):
        fdim = int(rng.integers(3, 5))
        fiber = random_curvature_snapshot(fdim, rng, negatives=int(rng.integers(2)))
        fn = random_warp(rng)
        x = float(rng.choice(admissible_points(fn, 8)))
        spec = WarpedSpec(int(rng.choice([-1, 1])), fn, x, fiber)
        p = products(warped_snapshot(spec))
        asm = warped_blocks(spec).assembled()
        for k, ref in (("QgR", p.QgR), ("QSR", p.QSR), ("V", p.V), ("P", p.P)):
            worst[k] = max(worst[k], norm(asm[k] - ref) / max(norm(ref), 1e-300))
        worst_vrs = max(worst_vrs, vrs_residual(spec))
    out = [check(f"block formula {k} (20 specs)", v, 1e-10) for k, v in worst.items()]
    out.append(check("VRS block identity (20 specs)", worst_vrs, 1e-10))
    return out


def suite_gauss_e123(seed: int = 0) -> list:
    d = diagonal_fixture([1, 2, 0, 0], 20.0)
    e1 = e1_lambda(d)
    r2, rc = e2_check(d)
    e4 = e4_check(d)
    out = [
        check("diag(1,2,0,0) E1 lambda", abs(e1.lam + 2), 1e-10, expected=-2.0, observed=e1.lam,
              holds=e1.success and abs(e1.lam + 2) <= 1e-10),
        check("diag(1,2,0,0) E2", r2, 1e-10),
        check("diag(1,2,0,0) R.S = c Q(g,S)", rc, 1e-10),
        check("diag(1,2,0,0) E3", e3_check(d), 1e-9),
        check("diag(1,2,0,0) E4 fails (lambda != 0)", None, 0.0, holds=not e4.holds),
    ]
    for fd, tau in ((3, -12.0), (4, 20.0), (4, -20.0)):
        j = jordan3_fixture(fd, tau)
        e4 = e4_check(j)
        out.append(check(f"jordan dim {fd} tau={tau:g} E4", max(e4.lambda_dev, e4.tau_dev), 1e-10,
                         holds=e4.holds))
        out.append(check(f"jordan dim {fd} tau={tau:g} E4 => SR2", sr2_from_e4(j), 1e-10))
        out.append(check(f"jordan dim {fd} tau={tau:g} E2", max(e2_check(j)), 1e-10))
        if fd >= 4:
            out.append(check(f"jordan dim {fd} tau={tau:g} E3", e3_check(j), 1e-9))
    # diagonalizable shape operators with lambda = 0 give Einstein fibers
    dz = diagonal_fixture([1.5, 0, 0, 0], 6.0)
    out.append(check("diagonal lambda=0 fiber is Einstein", None, 0.0,
                     holds=quasi_einstein(gauss_snapshot(dz)).is_einstein))
    return out


def suite_roter(seed: int = 0) -> list:
    rng = np.random.default_rng([seed, 9])
    worst_c = worst_L = 0.0
    for k in range(20):
        if k == 0:
            snap, planted = planted_roter(0.7, -0.3, 0.2, seed=seed)
        else:
            n = int(rng.integers(4, 7))
            p = int(rng.integers(2, n - 1))
            s1, s2 = rng.uniform(-2, 2, size=2)
            snap, planted = roter_snapshot(rng.uniform(0.3, 2.0) * rng.choice([-1, 1]),
                                           s1, s2, p, n, negatives=int(rng.integers(2)),
                                           seed=int(rng.integers(2**31)))
        fit = roter_fit(snap)
        if fit.status != "ok":
            worst_c = np.inf
            continue
        scale = max(max(abs(v) for v in planted), 1.0)
        worst_c = max(worst_c, max(abs(a - b) for a, b in zip(fit.coefficients, planted)) / scale)
        worst_L = max(worst_L, fit.extras.get("L_R_mismatch", np.inf))
    out = [check("Roter (phi, mu, eta) recovered (20 planted)", worst_c, 1e-10),
           check("PSEUDO fit equals L_R (20 planted)", worst_L, 1e-8)]
    out.append(check("Einstein snapshot flagged degenerate", None, 0.0,
                     holds=roter_fit(product_of_spheres(2, 2)).status == "degenerate"))
    # (H1) snapshots: Ricci-semisymmetric with A1 at L = 1/(n-2)
    for neg in (0, 1):
        h = h1_snapshot(negatives=neg, seed=seed + neg)
        rs = fit_condition(h, "RICCIPSEUDO")
        out.append(check(f"H1 residual (negatives={neg})", check_h1(h), 1e-10))
        out.append(check(f"H1 => R.S = 0 (negatives={neg})",
                         abs(rs.coefficients[0]) if rs.coefficients else np.inf, 1e-10))
        out.append(_coef_check(f"H1 => A1 L = 1/3 (negatives={neg})", fit_condition(h, "A1"),
                               1 / 3, 1e-8))
    return out


def suite_rw_sanity(seed: int = 0) -> list:
    s3 = product_of_spheres(3)
    fams = [("quadratic", quadratic(2, 3)), ("exponential", exponential(1.0, 2.0, 0.5, -1)),
            ("sinusoidal", sinusoidal(0.2, 1.3, 0.4, 1)),
            ("custom", custom(lambda x, xp=np: 2 + xp.cos(x) + 0.3 * x**3))]
    out = []
    for name, fn in fams:
        for eps in (-1, 1):
            worst_c = 0.0
            qe = True
            for x in admissible_points(fn, 5):
                snap = warped_snapshot(WarpedSpec(eps, fn, float(x), s3))
                worst_c = max(worst_c, norm(snap.C.data) / norm(snap.R.data))
                qe = qe and quasi_einstein(snap).is_quasi_einstein
            out.append(check(f"RW {name} eps={eps:+d} conformally flat", worst_c, 1e-9))
            out.append(check(f"RW {name} eps={eps:+d} quasi-Einstein", None, 0.0, holds=qe))
    return out


SUITES: dict[str, Callable[[int], list]] = {
    "ge-random": suite_ge_random,
    "einstein-genein1": suite_einstein_genein1,
    "cor42": suite_cor42,
    "thm51": suite_thm51,
    "thm42-jordan": suite_thm42_jordan,
    "r877-dim4": suite_r877_dim4,
    "crosscheck": suite_crosscheck,
    "gauss-e123": suite_gauss_e123,
    "blocks": suite_blocks,
    "roter": suite_roter,
    "rw-sanity": suite_rw_sanity,
}


def run_suite(name: str, seed: int = 0) -> dict:
    checks = SUITES[name](seed)
    failing = [c["name"] for c in checks if c["status"] != "vacuous" and not c["holds"]]
    return {
        "suite": name,
        "verdict": "fail" if failing else "pass",
        "n_checks": len(checks),
        "n_vacuous": sum(c["status"] == "vacuous" for c in checks),
        "failing": failing,
        "checks": checks,
    }
