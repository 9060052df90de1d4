"""Pseudosymmetry-type curvature conditions evaluated on a single snapshot.

Every condition here is a pointwise algebraic statement.  Fits return the scalar
coefficient of a one-term relation ``lhs = L * basis`` together with a
scale-free residual; checks return the relative size of a residual tensor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .chartgeo import CurvatureSnapshot
from .tensorkit import (
    as_array,
    curvature_action,
    gram_fit,
    kulkarni_nomizu,
    norm,
    ricci_operator_action,
    sym_outer_block,
    tachibana,
)

DEFAULT_TOL = 1e-8
MEMBERSHIP_TOL = 1e-8
# a tensor whose norm is below this fraction of its natural size is treated as zero
ZERO_RTOL = 1e-9
# floor for relative residuals, as a fraction of the natural size of the terms
FLOOR_RTOL = 1e-6

FIT_IDS = ("A1", "GENEINTSU", "QGC", "R77", "R777", "R877", "PSEUDO", "RICCIPSEUDO", "QSC")
CHECK_IDS = ("H1", "GENEIN1", "SR2", "D1", "D3", "ROTER", "GE", "THM21")
CONDITION_IDS = FIT_IDS + CHECK_IDS


class ConditionError(ValueError):
    pass


@dataclass
class FitResult:
    condition: str
    coefficients: list
    residual: float
    holds: bool
    status: str = "ok"  # ok | degenerate | skipped | vacuous | error
    tol: float = DEFAULT_TOL
    lhs_norm: float = 0.0
    basis_norms: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.status in ("degenerate", "skipped", "vacuous")

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status,
            "holds": self.holds,
            "coefficients": [float(c) for c in self.coefficients],
            "residual": float(self.residual),
            "tol": float(self.tol),
            "lhs_norm": float(self.lhs_norm),
            "basis_norms": [float(b) for b in self.basis_norms],
            "extras": {k: (float(v) if isinstance(v, (int, float, np.floating)) and
                           not isinstance(v, bool) else v)
                       for k, v in self.extras.items()},
        }


class Products:
    """Lazily computed curvature products of one snapshot."""

    def __init__(self, snap: CurvatureSnapshot):
        self.snap = snap
        self.g = snap.g.data
        self.gi = snap.g_inv.data
        self.R = snap.R.data
        self.S = snap.S.data
        self.C = snap.C.data
        self.G = snap.G.data
        self.n = snap.dim
        self.kappa = snap.kappa
        self.nR = max(norm(self.R), 1e-300)
        self.ng = norm(self.g)
        self.ngi = norm(self.gi)

    # natural sizes: curvature ~ |R|, Ricci ~ |g^-1| |R|, each action adds |g^-1|
    @property
    def nS(self) -> float:
        return self.ngi * self.nR

    @cached_property
    def RC(self):
        return curvature_action(self.R, self.gi, self.C).data

    @cached_property
    def CR(self):
        return curvature_action(self.C, self.gi, self.R).data

    @cached_property
    def RR(self):
        return curvature_action(self.R, self.gi, self.R).data

    @cached_property
    def RS(self):
        return curvature_action(self.R, self.gi, self.S).data

    @cached_property
    def CS(self):
        return curvature_action(self.C, self.gi, self.S).data

    @cached_property
    def diff(self):
        return self.RC - self.CR

    @cached_property
    def QSR(self):
        return tachibana(self.S, self.R).data

    @cached_property
    def QgR(self):
        return tachibana(self.g, self.R).data

    @cached_property
    def QgC(self):
        return tachibana(self.g, self.C).data

    @cached_property
    def QSC(self):
        return tachibana(self.S, self.C).data

    @cached_property
    def QgS(self):
        return tachibana(self.g, self.S).data

    @cached_property
    def V(self):
        return ricci_operator_action(self.S, self.gi, self.R).data

    @cached_property
    def P(self):
        return p_from_v(self.g, self.V)


_CACHE_ATTR = "_grwcurv_products"


def products(snap: CurvatureSnapshot) -> Products:
    """Shared lazily-evaluated products for a snapshot (cached on the instance)."""
    pr = snap.__dict__.get(_CACHE_ATTR)
    if pr is None:
        pr = Products(snap)
        object.__setattr__(snap, _CACHE_ATTR, pr)
    return pr


def p_from_v(g, V) -> np.ndarray:
    """Twelve-term P tensor built from a metric and V_{hijk} = S_h^l R_{lijk}."""
    g, V = as_array(g), as_array(V)
    e = np.einsum
    Vs = V + V.transpose(1, 0, 2, 3)
    return (
        e("hl,mijk->hijklm", g, V) - e("hm,lijk->hijklm", g, V)
        - e("il,mhjk->hijklm", g, V) + e("im,lhjk->hijklm", g, V)
        + e("jl,mkhi->hijklm", g, V) - e("jm,lkhi->hijklm", g, V)
        - e("kl,mjhi->hijklm", g, V) + e("km,ljhi->hijklm", g, V)
        - e("ij,hklm->hijklm", g, Vs) - e("hk,ijlm->hijklm", g, Vs)
        + e("ik,hjlm->hijklm", g, Vs) + e("hj,iklm->hijklm", g, Vs)
    )


def p_tensor(snap: CurvatureSnapshot) -> np.ndarray:
    return products(snap).P


def _relres(diff, terms, floor: float) -> float:
    den = max([norm(t) for t in terms] + [floor, 1e-300])
    return norm(diff) / den


def ge_residual(snap: CurvatureSnapshot) -> float:
    """Relative size of (n-2)(R.C - C.R) - Q(S,R) + kappa/(n-1) Q(g,R) - P."""
    if snap.dim < 4:
        raise ConditionError("identity needs n >= 4")
    p = products(snap)
    n = p.n
    terms = [(n - 2) * p.diff, p.QSR, p.kappa / (n - 1) * p.QgR, p.P]
    resid = terms[0] - terms[1] + terms[2] - terms[3]
    return _relres(resid, terms, FLOOR_RTOL * p.ngi * p.nS * p.nR)


# --- set membership ----------------------------------------------------------------


@dataclass
class SetMembership:
    in_UR: bool
    in_US: bool
    in_UC: bool
    in_U: bool
    in_curlyU: bool
    in_U1: bool
    witnesses: dict

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("in_UR", "in_US", "in_UC", "in_U", "in_curlyU", "in_U1")}
        d["witnesses"] = {k: float(v) for k, v in self.witnesses.items()}
        return d


def classify_sets(snap: CurvatureSnapshot, tol: float = MEMBERSHIP_TOL) -> SetMembership:
    p = products(snap)
    n = p.n
    nS = norm(p.S)
    w = {
        "UR": norm(p.R - p.kappa / ((n - 1) * n) * p.G) / max(p.nR, 1.0),
        "US": norm(p.S - p.kappa / n * p.g) / max(nS, 1.0),
        "UC": norm(p.C) / max(p.nR, 1.0),
        "U": norm(p.QSR) / max(nS * p.nR, 1.0),
    }
    in_UR, in_US, in_UC, in_U = (w[k] > tol for k in ("UR", "US", "UC", "U"))
    qe = quasi_einstein(snap, tol)
    w["min_rank_candidate"] = qe.min_rank
    return SetMembership(
        in_UR=in_UR, in_US=in_US, in_UC=in_UC, in_U=in_U,
        in_curlyU=in_U and in_US and in_UC,
        in_U1=qe.min_rank >= 2,
        witnesses=w,
    )


# --- quasi-Einstein ----------------------------------------------------------------


@dataclass
class QuasiEinsteinResult:
    is_einstein: bool
    is_quasi_einstein: bool
    alpha: Optional[float]
    candidates: list
    ranks: list
    complex_roots: list
    min_rank: int
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "is_einstein": self.is_einstein,
            "is_quasi_einstein": self.is_quasi_einstein,
            "alpha": None if self.alpha is None else float(self.alpha),
            "candidates": [float(a) for a in self.candidates],
            "ranks": list(self.ranks),
            "complex_roots": [[float(z.real), float(z.imag)] for z in self.complex_roots],
            "status": self.status,
        }


def _cluster_roots(roots: np.ndarray, atol: float) -> list:
    """Group nearby eigenvalues; defective eigenvalues split by ~sqrt(eps)."""
    remaining = list(roots)
    clusters = []
    while remaining:
        z = remaining.pop(0)
        group = [z]
        rest = []
        for w in remaining:
            (group if abs(w - z) <= atol else rest).append(w)
        remaining = rest
        clusters.append(np.mean(group))
    return clusters


def quasi_einstein(snap: CurvatureSnapshot, tol: float = MEMBERSHIP_TOL) -> QuasiEinsteinResult:
    """Decide rank(S - alpha g) = 1 for a real root alpha of det(S - alpha g) = 0.

    The roots are the eigenvalues of the mixed Ricci operator S^i_j.  Ranks are
    judged from singular values of S^i_j - alpha delta^i_j with a relative cutoff.
    """
    p = products(snap)
    n = p.n
    M = p.gi @ p.S
    scale = max(np.max(np.abs(np.linalg.eigvals(M))) if np.any(M) else 0.0,
                norm(M), 1e-300)
    einstein_dev = norm(p.S - p.kappa / n * p.g) / max(norm(p.S), 1.0)
    is_einstein = einstein_dev <= tol
    try:
        roots = np.linalg.eigvals(M)
    except np.linalg.LinAlgError:
        return QuasiEinsteinResult(is_einstein, False, None, [], [], [], n, status="error")
    clusters = _cluster_roots(roots, atol=1e-5 * scale)
    real = [float(z.real) for z in clusters if abs(z.imag) <= 1e-6 * scale]
    cplx = [complex(z) for z in clusters if abs(z.imag) > 1e-6 * scale]
    ranks = []
    for a in real:
        sv = np.linalg.svd(M - a * np.eye(n), compute_uv=False)
        ranks.append(int(np.sum(sv > tol * max(scale, abs(a)))))
    min_rank = min(ranks) if ranks else n
    alpha = None
    is_qe = False
    if not is_einstein:
        for a, r in zip(real, ranks):
            if r <= 1:
                alpha, is_qe = a, True
                break
    return QuasiEinsteinResult(is_einstein, is_qe, alpha, real, ranks, cplx, min_rank)


# --- single-coefficient fits -------------------------------------------------------


def _fit_terms(p: Products, cid: str):
    """(lhs, basis, natural size of lhs, natural size of basis)."""
    gi, R, S = p.ngi, p.nR, p.nS
    g = p.ng
    table = {
        "A1": (lambda: p.diff, lambda: p.QSR, gi * R * R, S * R),
        "GENEINTSU": (lambda: p.diff, lambda: p.QgR, gi * R * R, g * R),
        "QGC": (lambda: p.diff, lambda: p.QgC, gi * R * R, g * R),
        "R77": (lambda: p.CR, lambda: p.QgR, gi * R * R, g * R),
        "R777": (lambda: p.CS, lambda: p.QgS, gi * R * S, g * S),
        "R877": (lambda: p.RR - p.QSR, lambda: p.QgC, gi * R * R, g * R),
        "PSEUDO": (lambda: p.RR, lambda: p.QgR, gi * R * R, g * R),
        "RICCIPSEUDO": (lambda: p.RS, lambda: p.QgS, gi * R * S, g * S),
        "QSC": (lambda: p.diff, lambda: p.QSC, gi * R * R, S * R),
    }
    return table[cid]


def fit_condition(snap: CurvatureSnapshot, condition_id: str,
                  tol: float = DEFAULT_TOL) -> FitResult:
    """Fit ``lhs = L * basis`` for one of the single-coefficient conditions.

    Both sides are normalised before fitting, so the residual is the sine of the
    angle between them and is invariant under rescaling of the metric.
    """
    cid = condition_id.upper()
    if cid not in FIT_IDS:
        raise ConditionError(f"unknown fit condition {condition_id!r}")
    p = products(snap)
    lhs_fn, basis_fn, lhs_size, basis_size = _fit_terms(p, cid)
    D, B = lhs_fn(), basis_fn()
    nD, nB = norm(D), norm(B)
    if nB <= ZERO_RTOL * basis_size:
        lhs_zero = nD <= ZERO_RTOL * lhs_size
        return FitResult(cid, [], nD / max(lhs_size, 1e-300) if not lhs_zero else 0.0,
                         holds=lhs_zero, status="degenerate", tol=tol, lhs_norm=nD,
                         basis_norms=[nB], extras={"lhs_zero": lhs_zero})
    if nD <= ZERO_RTOL * lhs_size:
        return FitResult(cid, [0.0], nD / lhs_size, holds=True, tol=tol, lhs_norm=nD,
                         basis_norms=[nB], extras={"lhs_zero": True})
    fit = gram_fit(D / nD, [B / nB])
    L = float(fit.coefficients[0]) * nD / nB
    return FitResult(cid, [L], fit.residual, holds=fit.residual <= tol, tol=tol,
                     lhs_norm=nD, basis_norms=[nB])


# --- implication checks -------------------------------------------------------------


def _check(cid: str, resid: float, tol: float, **extras) -> FitResult:
    return FitResult(cid, [], resid, holds=resid <= tol, tol=tol, extras=extras)


def check_h1(snap: CurvatureSnapshot) -> float:
    """Relative size of S o R - kappa/(n-1) R."""
    p = products(snap)
    rhs = p.kappa / (p.n - 1) * p.R
    return _relres(p.V - rhs, [p.V, rhs], FLOOR_RTOL * p.nS * p.nR)


def is_einstein(snap: CurvatureSnapshot, tol: float = MEMBERSHIP_TOL) -> bool:
    return not classify_sets(snap, tol).in_US


def check_genein1(snap: CurvatureSnapshot, tol: float = MEMBERSHIP_TOL) -> tuple:
    """Residuals of R.C - C.R = kappa/((n-1)n) Q(g,R) and of the Q(g,C) version."""
    p = products(snap)
    n = p.n
    if norm(p.S - p.kappa / n * p.g) / max(norm(p.S), 1.0) > tol:
        raise ConditionError("snapshot is not Einstein")
    c = p.kappa / ((n - 1) * n)
    floor = FLOOR_RTOL * p.ngi * p.nR * p.nR
    r1 = _relres(p.diff - c * p.QgR, [p.diff, c * p.QgR], floor)
    r2 = _relres(p.diff - c * p.QgC, [p.diff, c * p.QgC], floor)
    return r1, r2


def check_sr2(fiber: CurvatureSnapshot, ea2: float) -> float:
    """Fiber condition S~ o R~ = k R~ + ea2 (g~ S~ - g~ S~) - ea2 k G~, k = kappa~/(n-1).

    Here n is the dimension of the warped product, i.e. fiber dim + 1.
    """
    p = products(fiber)
    n = p.n + 1
    k = p.kappa / (n - 1)
    W = sym_outer_block(p.g, p.S)
    rhs = k * p.R + ea2 * W - ea2 * k * p.G
    return _relres(p.V - rhs, [p.V, k * p.R, ea2 * W, ea2 * k * p.G],
                   FLOOR_RTOL * p.nS * p.nR)


def check_d1_d3(fiber: CurvatureSnapshot, ea2: float) -> tuple:
    """Residuals of R~.S~ = ea2 Q(g~,S~) and of
    (n-3)(R~.C~ - C~.R~) = Q(S~,R~) - kappa~/((n-1)(n-2)) Q(g~,R~).

    The second is ``None`` when the fiber has dimension 3.
    """
    p = products(fiber)
    n = p.n + 1
    rhs1 = ea2 * p.QgS
    d1 = _relres(p.RS - rhs1, [p.RS, rhs1], FLOOR_RTOL * p.ngi * p.nR * p.nS)
    if p.n < 4:
        return d1, None
    lhs = (n - 3) * p.diff
    rhs = p.QSR - p.kappa / ((n - 1) * (n - 2)) * p.QgR
    d3 = _relres(lhs - rhs, [lhs, p.QSR, p.kappa / ((n - 1) * (n - 2)) * p.QgR],
                 FLOOR_RTOL * p.ngi * p.nR * p.nR)
    return d1, d3


def roter_fit(snap: CurvatureSnapshot, tol: float = DEFAULT_TOL) -> FitResult:
    """Fit R = phi/2 S^S + mu g^S + eta G and derive L_R = ((n-2)(mu^2 - phi eta) - mu)/phi."""
    p = products(snap)
    n = p.n
    basis = [0.5 * kulkarni_nomizu(p.S, p.S).data, kulkarni_nomizu(p.g, p.S).data, p.G]
    norms = [norm(b) for b in basis]
    sizes = [p.nS * p.nS, p.ng * p.nS, p.ng * p.ng]
    if any(nb <= ZERO_RTOL * s for nb, s in zip(norms, sizes)):
        return FitResult("ROTER", [], 1.0, holds=False, status="degenerate", tol=tol,
                         lhs_norm=p.nR, basis_norms=norms)
    fit = gram_fit(p.R / p.nR, [b / nb for b, nb in zip(basis, norms)], rcond=1e-9)
    phi, mu, eta = (float(c) * p.nR / nb for c, nb in zip(fit.coefficients, norms))
    membership = classify_sets(snap)
    extras = {"in_U1": membership.in_U1}
    status = "degenerate" if fit.rank_deficient else "ok"
    holds = fit.residual <= tol and not fit.rank_deficient
    if holds and phi != 0:
        L_R = ((n - 2) * (mu * mu - phi * eta) - mu) / phi
        pseudo = fit_condition(snap, "PSEUDO", tol)
        extras["L_R"] = L_R
        if pseudo.coefficients:
            extras["pseudo_L"] = pseudo.coefficients[0]
            extras["pseudo_residual"] = pseudo.residual
            extras["L_R_mismatch"] = abs(pseudo.coefficients[0] - L_R) / max(abs(L_R), 1.0)
    return FitResult("ROTER", [phi, mu, eta], fit.residual, holds=holds, status=status,
                     tol=tol, lhs_norm=p.nR, basis_norms=norms, extras=extras)


def theorem2_1_check(snap: CurvatureSnapshot, tol: float = DEFAULT_TOL) -> FitResult:
    """If R.C - C.R = L Q(g,C) holds on U_S n U_C, check R.R = L Q(g,R) and C.R = 0."""
    m = classify_sets(snap)
    hyp = fit_condition(snap, "QGC", tol)
    if not (m.in_US and m.in_UC) or not hyp.holds or hyp.status != "ok":
        return FitResult("THM21", hyp.coefficients, 0.0, holds=True, status="vacuous", tol=tol,
                         extras={"hypothesis_residual": hyp.residual,
                                 "in_US_and_UC": m.in_US and m.in_UC})
    p = products(snap)
    L = hyp.coefficients[0]
    floor = FLOOR_RTOL * p.ngi * p.nR * p.nR
    r_pseudo = _relres(p.RR - L * p.QgR, [p.RR, L * p.QgR], floor)
    r_cr = norm(p.CR) / max(norm(p.RR), norm(p.RC), floor)
    resid = max(r_pseudo, r_cr)
    return FitResult("THM21", [L], resid, holds=resid <= tol, tol=tol,
                     extras={"pseudo_residual": r_pseudo, "CR_residual": r_cr})


def evaluate(snap: CurvatureSnapshot, condition_id: str, tol: float = DEFAULT_TOL,
             fiber: Optional[CurvatureSnapshot] = None, ea2: Optional[float] = None,
             ) -> FitResult:
    """Dispatch a condition id to its fit or check and wrap the outcome as a FitResult.

    SR2, D1 and D3 act on ``fiber`` (defaulting to ``snap``) with candidate ``ea2``.
    """
    cid = condition_id.upper()
    if cid in FIT_IDS:
        return fit_condition(snap, cid, tol)
    if cid == "GE":
        if snap.dim < 4:
            return FitResult(cid, [], 0.0, holds=True, status="skipped", tol=tol)
        return _check(cid, ge_residual(snap), tol)
    if cid == "H1":
        return _check(cid, check_h1(snap), tol)
    if cid == "GENEIN1":
        try:
            r1, r2 = check_genein1(snap)
        except ConditionError:
            return FitResult(cid, [], 0.0, holds=True, status="vacuous", tol=tol,
                             extras={"reason": "not Einstein"})
        c = snap.kappa / ((snap.dim - 1) * snap.dim)
        return FitResult(cid, [c], max(r1, r2), holds=max(r1, r2) <= tol, tol=tol,
                         extras={"QgR_residual": r1, "QgC_residual": r2})
    if cid in ("SR2", "D1", "D3"):
        f = fiber if fiber is not None else snap
        if ea2 is None:
            return FitResult(cid, [], 0.0, holds=True, status="skipped", tol=tol,
                             extras={"reason": "no ea2 candidate"})
        if cid == "SR2":
            return _check(cid, check_sr2(f, ea2), tol, ea2=ea2)
        d1, d3 = check_d1_d3(f, ea2)
        if cid == "D1":
            return _check(cid, d1, tol, ea2=ea2)
        if d3 is None:
            return FitResult(cid, [], 0.0, holds=True, status="skipped", tol=tol,
                             extras={"reason": "fiber dim 3"})
        return _check(cid, d3, tol)
    if cid == "ROTER":
        return roter_fit(snap, tol)
    if cid == "THM21":
        return theorem2_1_check(snap, tol)
    raise ConditionError(f"unknown condition id {condition_id!r}")


# --- synthetic fixtures ------------------------------------------------------------


def _frame(n: int, negatives: int, seed: Optional[int]):
    J = np.diag([-1.0] * negatives + [1.0] * (n - negatives))
    if seed is None:
        return J, np.eye(n)
    rng = np.random.default_rng(seed)
    P = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    return J, P


def roter_snapshot(phi: float, s1: float, s2: float, p: int, n: int,
                   negatives: int = 0, seed: Optional[int] = None):
    """Roter-type snapshot whose Ricci operator has eigenvalues s1 (x p) and s2 (x n-p).

    mu and eta are solved from the self-consistency of the Ricci contraction.
    Returns (snapshot, (phi, mu, eta)).
    """
    if not (2 <= p <= n - 2) or s1 == s2 or phi == 0:
        raise ConditionError("need 2 <= p <= n-2, s1 != s2 and phi != 0")
    kappa = p * s1 + (n - p) * s2
    # s = phi (kappa s - s^2) + mu ((n-2) s + kappa) + eta (n-1) for s in {s1, s2}
    M = np.array([[(n - 2) * s + kappa, n - 1.0] for s in (s1, s2)])
    rhs = np.array([s - phi * (kappa * s - s * s) for s in (s1, s2)])
    mu, eta = np.linalg.solve(M, rhs)
    return _roter_from(phi, mu, eta, [s1] * p + [s2] * (n - p), negatives, seed)


def planted_roter(phi: float, mu: float, eta: float, n: int = 4, negatives: int = 0,
                  seed: Optional[int] = None):
    """Roter snapshot with prescribed (phi, mu, eta), n even, Ricci eigenvalues of
    equal multiplicity n/2.  Returns (snapshot, (phi, mu, eta))."""
    if n % 2 or n < 4:
        raise ConditionError("planted_roter needs even n >= 4")
    h = n // 2
    # with kappa = h (s1 + s2) the Ricci self-consistency is a quadratic with roots s1, s2
    # s1 + s2 = (phi kappa + mu (n-2) - 1) / phi,  s1 s2 = -(mu kappa + eta (n-1)) / phi
    sigma = (mu * (n - 2) - 1) / (phi * (1 - h))
    kappa = h * sigma
    prod = -(mu * kappa + eta * (n - 1)) / phi
    disc = sigma * sigma - 4 * prod
    if disc <= 0:
        raise ConditionError("planted coefficients give no real distinct Ricci eigenvalues")
    r = np.sqrt(disc)
    s1, s2 = (sigma + r) / 2, (sigma - r) / 2
    return _roter_from(phi, mu, eta, [s1] * h + [s2] * h, negatives, seed)


def _roter_from(phi, mu, eta, eigs, negatives, seed):
    from .chartgeo import synthetic_snapshot

    n = len(eigs)
    J, P = _frame(n, negatives, seed)
    g = P.T @ J @ P
    S = P.T @ (J @ np.diag(eigs)) @ P
    G = 0.5 * kulkarni_nomizu(g, g).data
    R = 0.5 * phi * kulkarni_nomizu(S, S).data + mu * kulkarni_nomizu(g, S).data + eta * G
    snap = synthetic_snapshot(g, R, provenance=f"roter({phi:g},{mu:g},{eta:g})")
    return snap, (float(phi), float(mu), float(eta))


def h1_snapshot(negatives: int = 0, seed: Optional[int] = None):
    """Curvature of S2 x S2 x (line) at a point, optionally in a random frame.

    Its Ricci operator has eigenvalues 1 (x4) and 0, so S o R = kappa/(n-1) R with kappa = 4.
    """
    from .chartgeo import product_of_spheres, synthetic_snapshot

    base = product_of_spheres(2, 2)
    n = 5
    _, P = _frame(n, 0, seed)
    g0 = np.zeros((n, n))
    g0[:4, :4] = base.g.data
    g0[4, 4] = -1.0 if negatives else 1.0
    R0 = np.zeros((n,) * 4)
    R0[:4, :4, :4, :4] = base.R.data
    g = P.T @ g0 @ P
    R = np.einsum("abcd,ai,bj,ck,dl->ijkl", R0, P, P, P, P)
    return synthetic_snapshot(g, R, provenance="S2xS2xR")
