"""Fiber curvature built from hypersurface data through the Gauss equation.

R~ = (eps/2) H^H + c G~ with c = tau/((n-1)n), where n is the fiber dimension plus one.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .chartgeo import CurvatureSnapshot, synthetic_snapshot
from .conditionlab import check_sr2, products
from .tensorkit import as_array, kulkarni_nomizu, norm, sym_outer_block

E1_TOL = 1e-9


class GaussError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HypersurfaceData:
    gt: np.ndarray
    H: np.ndarray
    tau: float
    gauss_sign: int = 1
    lam: Optional[float] = None

    def __post_init__(self):
        gt, H = as_array(self.gt), as_array(self.H)
        m = gt.shape[0]
        if gt.shape != (m, m) or H.shape != (m, m):
            raise GaussError("gt and H must be square of equal size")
        if m < 3:
            raise GaussError(f"fiber dim {m} < 3")
        if self.gauss_sign not in (1, -1):
            raise GaussError("gauss_sign must be +1 or -1")
        scale = max(norm(H), 1.0)
        if norm(H - H.T) > 1e-12 * scale or norm(gt - gt.T) > 1e-12 * max(norm(gt), 1.0):
            raise GaussError("H and gt must be symmetric (shape operator self-adjoint)")
        object.__setattr__(self, "gt", gt)
        object.__setattr__(self, "H", H)

    @property
    def fiber_dim(self) -> int:
        return self.gt.shape[0]

    @property
    def n(self) -> int:
        return self.fiber_dim + 1

    @property
    def c(self) -> float:
        return self.tau / ((self.n - 1) * self.n)

    @property
    def A(self) -> np.ndarray:
        return np.linalg.solve(self.gt, self.H)


@dataclass(frozen=True)
class E1Result:
    lam: float
    residual: float
    success: bool
    umbilic: bool = False


def e1_lambda(data: HypersurfaceData, tol: float = E1_TOL) -> E1Result:
    """Least-squares lambda in A^3 = tr(A) A^2 + lambda A."""
    A = data.A
    nA = norm(A)
    if nA == 0.0:
        return E1Result(0.0, 0.0, True, umbilic=True)
    A2 = A @ A
    lhs = A2 @ A - np.trace(A) * A2
    lam = float(np.sum(lhs * A) / nA**2)
    res = norm(lhs - lam * A) / max(norm(A2 @ A), norm(np.trace(A) * A2), norm(lam * A), 1e-300)
    return E1Result(lam, float(res), res <= tol)


def with_lambda(data: HypersurfaceData, tol: float = E1_TOL) -> HypersurfaceData:
    if data.lam is not None:
        return data
    r = e1_lambda(data, tol)
    if not r.success:
        raise GaussError(f"(A^3 = trA A^2 + lambda A) fails, residual {r.residual:.3e}")
    return replace(data, lam=r.lam)


def gauss_snapshot(data: HypersurfaceData) -> CurvatureSnapshot:
    gt, H, eps, c = data.gt, data.H, data.gauss_sign, data.c
    Gt = 0.5 * kulkarni_nomizu(gt, gt).data
    R = 0.5 * eps * kulkarni_nomizu(H, H).data + c * Gt
    snap = synthetic_snapshot(gt, R, provenance=f"gauss(tau={data.tau:g},eps={eps})")
    # closed-form Ricci as an internal consistency check
    gi = snap.g_inv.data
    S_closed = eps * (np.trace(data.A) * H - H @ gi @ H) + (data.n - 2) * c * gt
    dev = norm(snap.S.data - S_closed) / max(norm(S_closed), 1.0)
    if dev > 1e-10:
        raise GaussError(f"Ricci contraction disagrees with closed form ({dev:.3e})")
    return snap


def gauss_kappa(data: HypersurfaceData) -> float:
    """kappa~ = eps((trA)^2 - tr A^2) + (n-2) tau / n."""
    A = data.A
    return data.gauss_sign * (np.trace(A) ** 2 - np.trace(A @ A)) + (data.n - 2) * data.tau / data.n


def _rel(diff, terms, floor):
    return norm(diff) / max([norm(t) for t in terms] + [floor, 1e-300])


def e2_check(data: HypersurfaceData) -> tuple:
    """Residuals of S~ o R~ = mu (R~ - c G~) + c W and of R~.S~ = c Q(g~,S~).

    W_mbgd = g~_bg S~_md - g~_bd S~_mg and mu = (n-2) c - eps lambda.
    """
    data = with_lambda(data)
    p = products(gauss_snapshot(data))
    c = data.c
    mu = (data.n - 2) * c - data.gauss_sign * data.lam
    W = sym_outer_block(p.g, p.S)
    rhs = mu * (p.R - c * p.G) + c * W
    floor = 1e-6 * p.nS * p.nR
    r2 = _rel(p.V - rhs, [p.V, mu * p.R, mu * c * p.G, c * W], floor)
    rs = c * p.QgS
    rc = _rel(p.RS - rs, [p.RS, rs], 1e-6 * p.ngi * p.nR * p.nS)
    return r2, rc


def e3_check(data: HypersurfaceData) -> Optional[float]:
    """Residual of (n-3)(R~.C~ - C~.R~) = Q(S~,R~) + ((n-2)c - eps lambda - kappa~/(n-2)) Q(g~,R~).

    Returns None (skip) when the fiber has dimension 3.
    """
    if data.fiber_dim < 4:
        return None
    data = with_lambda(data)
    n = data.n
    p = products(gauss_snapshot(data))
    coef = (n - 2) * data.c - data.gauss_sign * data.lam - p.kappa / (n - 2)
    lhs = (n - 3) * p.diff
    return _rel(lhs - p.QSR - coef * p.QgR, [lhs, p.QSR, coef * p.QgR],
                1e-6 * p.ngi * p.nR * p.nR)


@dataclass(frozen=True)
class E4Result:
    lambda_zero: bool
    tau_relation: bool
    lambda_dev: float
    tau_dev: float
    trace_dev: float

    @property
    def holds(self) -> bool:
        return self.lambda_zero and self.tau_relation


def e4_check(data: HypersurfaceData, tol: float = 1e-10) -> E4Result:
    """lambda = 0 and (n-2) tau = n kappa~; trace_dev measures (trA)^2 - tr(A^2)."""
    data = with_lambda(data)
    n = data.n
    kt = gauss_snapshot(data).kappa
    A = data.A
    scaleA = max(norm(A) ** 2, 1.0)
    lam_dev = abs(data.lam) / max(norm(A) ** 2, 1.0)
    tau_dev = abs((n - 2) * data.tau - n * kt) / max(abs((n - 2) * data.tau), abs(n * kt), 1.0)
    trace_dev = abs(np.trace(A) ** 2 - np.trace(A @ A)) / scaleA
    return E4Result(lam_dev <= tol, tau_dev <= tol, lam_dev, tau_dev, trace_dev)


def sr2_from_e4(data: HypersurfaceData) -> float:
    """check_sr2 residual of the Gauss fiber with ea2 = tau/((n-1)n)."""
    return check_sr2(gauss_snapshot(data), data.c)


# --- fixtures ----------------------------------------------------------------------


def diagonal_fixture(eigs, tau: float, gauss_sign: int = 1) -> HypersurfaceData:
    eigs = np.asarray(eigs, dtype=float)
    return HypersurfaceData(np.eye(eigs.size), np.diag(eigs), tau, gauss_sign)


def nilpotent_fixture(blocks, tau: float, gauss_sign: int = 1) -> HypersurfaceData:
    """Self-adjoint nilpotent shape operator built from Jordan blocks of size 1, 2 or 3.

    Size 2 uses a null pair (u, v) with g~(u,v) = 1 and A v = u; size 3 uses (u, e, v)
    with A e = u, A v = e; size 1 is a spacelike kernel direction.
    """
    metrics = {1: [[1.0]], 2: [[0.0, 1.0], [1.0, 0.0]],
               3: [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]}
    m = int(sum(blocks))
    gt = np.zeros((m, m))
    A = np.zeros((m, m))
    i = 0
    for b in blocks:
        if b not in metrics:
            raise GaussError(f"block size {b} not in (1, 2, 3)")
        gt[i:i + b, i:i + b] = metrics[b]
        for k in range(b - 1):
            A[i + k, i + k + 1] = 1.0
        i += b
    return HypersurfaceData(gt, gt @ A, tau, gauss_sign)


def jordan3_fixture(fiber_dim: int, tau: float, gauss_sign: int = 1) -> HypersurfaceData:
    """Null pair (u, v) with g~(u,v) = 1, spacelike e and complement; A u = 0, A e = u, A v = e."""
    if fiber_dim < 3:
        raise GaussError("jordan3_fixture needs fiber_dim >= 3")
    return nilpotent_fixture([3] + [1] * (fiber_dim - 3), tau, gauss_sign)


def catalog_gauss(kind: str, params: dict) -> HypersurfaceData:
    kind = kind.lower()
    if kind == "jordan3":
        return jordan3_fixture(int(params["fiber_dim"]), float(params["tau"]),
                               int(params.get("gauss_sign", 1)))
    if kind == "diagonal":
        return diagonal_fixture(params["eigs"], float(params["tau"]),
                                int(params.get("gauss_sign", 1)))
    if kind == "nilpotent":
        return nilpotent_fixture([int(b) for b in params["blocks"]], float(params["tau"]),
                                 int(params.get("gauss_sign", 1)))
    raise GaussError(f"unknown gauss fixture {kind!r}")
