"""Warped products with a one-dimensional base and the warping-function catalog.

The metric is ``g = eps dx1^2 + F(x1) g~`` in a product chart (x1, y^2, ..., y^n).
Fiber quantities carry a trailing ``_f`` or a tilde in the comments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .chartgeo import (
    CurvatureSnapshot,
    MetricField,
    synthetic_snapshot,
    weyl_from,
)
from .conditionlab import p_from_v
from .tensorkit import (
    DenseTensor,
    curvature_action,
    ricci_operator_action,
    sym_outer_block,
    tachibana,
)

FAMILIES = ("quadratic", "exponential", "sinusoidal", "custom")
POSITIVITY_FLOOR = 1e-6


class WarpingError(ValueError):
    pass


@dataclass(frozen=True)
class WarpingJet:
    x1: float
    F: float
    Fp: float
    Fpp: float

    def __post_init__(self):
        if not self.F > 0:
            raise WarpingError(f"warping function not positive at x1={self.x1}: F={self.F}")


@dataclass(frozen=True, eq=False)
class WarpingFunction:
    """A warping function F(x1) from the catalog.

    quadratic:   F = (a x + b)^2
    exponential: F = c/2 (exp(s b x/2) - 2 eps C1/(b^2 c) exp(-s b x/2))^2, s = +-1
    sinusoidal:  F = A (1 + sin(c x + b)), A = 2 eps C1 / c^2 (corrected) or 2 eps C1 / c
    custom:      user callable ``fn(x, xp)`` differentiated by forward-mode AD
    """

    family: str
    params: dict
    custom: Optional[Callable] = None
    _ad: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise WarpingError(f"unknown warping family {self.family!r}")
        p = self.params
        if self.family == "quadratic":
            _require(p, "a", "b")
        elif self.family == "exponential":
            _require(p, "b", "c", "C1", "epsilon")
            if not p["c"] > 0:
                raise WarpingError("exponential warp needs c > 0")
            if p["b"] == 0:
                raise WarpingError("exponential warp needs b != 0")
            if p.get("sign", 1) not in (1, -1):
                raise WarpingError("sign must be +1 or -1")
        elif self.family == "sinusoidal":
            _require(p, "b", "c", "C1", "epsilon")
            if p["c"] == 0:
                raise WarpingError("sinusoidal warp needs c != 0")
        elif self.custom is None:
            raise WarpingError("custom warp needs a callable")

    @property
    def amplitude(self) -> float:
        """Prefactor of (1 + sin) for the sinusoidal family."""
        p = self.params
        if p.get("printed", False):
            return 2 * p["epsilon"] * p["C1"] / p["c"]
        return 2 * p["epsilon"] * p["C1"] / p["c"] ** 2

    def printed_constraint_holds(self) -> bool:
        """Whether eps*C1/c > 0, the constraint printed alongside the sinusoidal family."""
        p = self.params
        return p["epsilon"] * p["C1"] / p["c"] > 0

    def value(self, x, xp=np):
        """F(x) using array namespace ``xp``; usable under automatic differentiation."""
        p = self.params
        if self.family == "quadratic":
            return (p["a"] * x + p["b"]) ** 2
        if self.family == "exponential":
            k = p.get("sign", 1) * p["b"] / 2
            K = 2 * p["epsilon"] * p["C1"] / (p["b"] ** 2 * p["c"])
            return p["c"] / 2 * (xp.exp(k * x) - K * xp.exp(-k * x)) ** 2
        if self.family == "sinusoidal":
            return self.amplitude * (1 + xp.sin(p["c"] * x + p["b"]))
        return self.custom(x, xp)

    def __repr__(self):
        return f"WarpingFunction({self.family}, {self.params})"


def _require(p: dict, *keys):
    missing = [k for k in keys if k not in p]
    if missing:
        raise WarpingError(f"missing warping parameters {missing}")


def quadratic(a: float, b: float) -> WarpingFunction:
    return WarpingFunction("quadratic", {"a": float(a), "b": float(b)})


def exponential(b: float, c: float, C1: float, epsilon: int, sign: int = 1) -> WarpingFunction:
    return WarpingFunction("exponential", {"b": float(b), "c": float(c), "C1": float(C1),
                                           "epsilon": int(epsilon), "sign": int(sign)})


def sinusoidal(b: float, c: float, C1: float, epsilon: int,
               printed: bool = False) -> WarpingFunction:
    return WarpingFunction("sinusoidal", {"b": float(b), "c": float(c), "C1": float(C1),
                                          "epsilon": int(epsilon), "printed": bool(printed)})


def custom(fn: Callable, **params) -> WarpingFunction:
    return WarpingFunction("custom", dict(params), custom=fn)


def warping_jet(fn: WarpingFunction, x1: float) -> WarpingJet:
    """(F, F', F'') at x1; closed form for the catalog families."""
    x = float(x1)
    p = fn.params
    if fn.family == "quadratic":
        a, b = p["a"], p["b"]
        u = a * x + b
        F, Fp, Fpp = u * u, 2 * a * u, 2 * a * a
    elif fn.family == "exponential":
        k = p.get("sign", 1) * p["b"] / 2
        K = 2 * p["epsilon"] * p["C1"] / (p["b"] ** 2 * p["c"])
        u = math.exp(k * x) - K * math.exp(-k * x)
        up = k * (math.exp(k * x) + K * math.exp(-k * x))
        c = p["c"]
        F, Fp, Fpp = c / 2 * u * u, c * u * up, c * (up * up + k * k * u * u)
    elif fn.family == "sinusoidal":
        A, c = fn.amplitude, p["c"]
        s, co = math.sin(c * x + p["b"]), math.cos(c * x + p["b"])
        F, Fp, Fpp = A * (1 + s), A * c * co, -A * c * c * s
        if F < POSITIVITY_FLOOR * abs(A):
            raise WarpingError(f"sinusoidal warp at x1={x} is outside the positivity domain")
    else:
        F, Fp, Fpp = _custom_jet(fn, x)
    return WarpingJet(x, float(F), float(Fp), float(Fpp))


def _custom_jet(fn: WarpingFunction, x: float):
    if "fn" not in fn._ad:
        import jax

        jax.config.update("jax_enable_x64", True)
        import jax.numpy as jnp

        f = lambda t: fn.custom(t, jnp)  # noqa: E731
        d1 = jax.grad(f)
        d2 = jax.grad(d1)
        fn._ad["fn"] = jax.jit(lambda t: (f(t), d1(t), d2(t)))
    return tuple(float(v) for v in fn._ad["fn"](float(x)))


@dataclass(frozen=True)
class WarpScalars:
    T11: float
    trT: float
    Delta1F: float
    Delta1F_over_4F: float


def warp_scalars(jet: WarpingJet, epsilon: int) -> WarpScalars:
    """T11 = F'' - F'^2/(2F), tr T = eps T11, Delta_1 F = eps F'^2."""
    T11 = jet.Fpp - jet.Fp**2 / (2 * jet.F)
    d1 = epsilon * jet.Fp**2
    return WarpScalars(T11, epsilon * T11, d1, d1 / (4 * jet.F))


@dataclass(frozen=True, eq=False)
class WarpedSpec:
    epsilon: int
    warping: WarpingFunction
    x1: float
    fiber: CurvatureSnapshot

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise WarpingError("epsilon must be +1 or -1")
        if self.fiber.dim < 3:
            raise WarpingError(f"fiber dim {self.fiber.dim} < 3")

    @property
    def n(self) -> int:
        return self.fiber.dim + 1

    def jet(self) -> WarpingJet:
        return warping_jet(self.warping, self.x1)


def warped_snapshot(spec: WarpedSpec) -> CurvatureSnapshot:
    """Closed-form curvature of the warped product at (x1, fiber point)."""
    jet = spec.jet()
    sc = warp_scalars(jet, spec.epsilon)
    f = spec.fiber
    m = f.dim
    n = m + 1
    eps, F = spec.epsilon, jet.F
    gt, Rt, St = f.g.data, f.R.data, f.S.data

    g = np.zeros((n, n))
    g[0, 0] = eps
    g[1:, 1:] = F * gt
    R = np.zeros((n,) * 4)
    mixed = -0.5 * sc.T11 * gt  # R_{a11b}
    R[1:, 0, 0, 1:] = mixed
    R[0, 1:, 1:, 0] = mixed
    R[0, 1:, 0, 1:] = -mixed
    R[1:, 0, 1:, 0] = -mixed
    R[1:, 1:, 1:, 1:] = F * (Rt - sc.Delta1F_over_4F * f.G.data)

    S = np.zeros((n, n))
    S[0, 0] = -(n - 1) / (2 * F) * sc.T11
    S[1:, 1:] = St - (sc.trT / 2 + (n - 2) * sc.Delta1F_over_4F) * gt
    kappa = (f.kappa - (n - 1) * (sc.trT + (n - 2) * sc.Delta1F_over_4F)) / F

    base = synthetic_snapshot(g, R, provenance=_provenance(spec))
    # keep the closed-form Ricci data; consistency with the contraction is tested separately
    return CurvatureSnapshot(
        g=base.g, g_inv=base.g_inv, R=base.R, S=DenseTensor(0.5 * (S + S.T), "symmetric-pair"),
        kappa=float(kappa), C=weyl_from(base.g, base.R, S, kappa), G=base.G,
        signature=base.signature, provenance=base.provenance,
    )


def _provenance(spec: WarpedSpec) -> str:
    return (f"warped(eps={spec.epsilon},{spec.warping.family}{spec.warping.params},"
            f"x1={spec.x1:g},fiber={spec.fiber.provenance})")


def warped_field(epsilon: int, warping: WarpingFunction, fiber: MetricField) -> MetricField:
    """Warped metric eps dx1^2 + F(x1) g~(y) as a differentiable field."""
    m = fiber.dim
    n = m + 1

    def metric(x, xp):
        F = warping.value(x[0], xp)
        gt = fiber.metric(x[1:], xp)
        top = xp.concatenate([xp.ones((1, 1)) * epsilon, xp.zeros((1, m))], axis=1)
        bot = xp.concatenate([xp.zeros((m, 1)), F * gt], axis=1)
        return xp.concatenate([top, bot], axis=0)

    def domain(x):
        try:
            warping_jet(warping, x[0])
        except WarpingError:
            return False
        return fiber.domain is None or fiber.domain(x[1:])

    neg = fiber.signature[0] + (1 if epsilon < 0 else 0)
    return MetricField(dim=n, signature=(neg, n - neg), metric=metric,
                       provenance=f"warped(eps={epsilon},{warping.family},{fiber.provenance})",
                       domain=domain)


def warped_christoffel(epsilon: int, warping: WarpingFunction, fiber: MetricField, point,
                       ) -> np.ndarray:
    """Christoffel symbols Gamma[m, i, j] of the warped metric from its block formulas."""
    from .chartgeo import christoffel, two_jet

    point = np.asarray(point, dtype=float)
    jet = warping_jet(warping, point[0])
    fj = two_jet(fiber, point[1:])
    gt = fj[0]
    m = gt.shape[0]
    Gam = np.zeros((m + 1,) * 3)
    Gam[0, 1:, 1:] = -0.5 * epsilon * jet.Fp * gt
    Gam[1:, 0, 1:] = Gam[1:, 1:, 0] = jet.Fp / (2 * jet.F) * np.eye(m)
    Gam[1:, 1:, 1:] = christoffel(fj)
    return Gam


# --- block formulas -----------------------------------------------------------------


@dataclass(frozen=True)
class WarpedBlocks:
    """Fiber-index blocks of Q(g,R), Q(S,R), V and P.

    Keys follow index patterns: "1bgd1m" is X_{1 b g d 1 m}, "1b1dlm" is X_{1 b 1 d l m},
    "abgdlm" is the all-fiber block; V uses "1bg1", "a11d", "abgd".
    """

    QgR: dict
    QSR: dict
    V: dict
    P: dict
    n: int

    def assembled(self) -> dict:
        return {
            "QgR": assemble6(self.n, self.QgR),
            "QSR": assemble6(self.n, self.QSR),
            "V": assemble_v(self.n, self.V),
            "P": assemble6(self.n, self.P),
        }


def warped_blocks(spec: WarpedSpec) -> WarpedBlocks:
    jet = spec.jet()
    sc = warp_scalars(jet, spec.epsilon)
    f = spec.fiber
    n = f.dim + 1
    F, g11 = jet.F, float(spec.epsilon)
    tr, q = sc.trT, sc.Delta1F_over_4F
    gt, Rt, St, Gt = f.g.data, f.R.data, f.S.data, f.G.data
    gi = f.g_inv.data

    Rt_mbgd = Rt  # index order (mu, beta, gamma, delta)
    W = sym_outer_block(gt, St)  # g~_bg S~_md - g~_bd S~_mg, order (m, b, g, d)
    QgRt = tachibana(gt, Rt).data
    QgSt = tachibana(gt, St).data
    QSRt = tachibana(St, Rt).data
    QSGt = tachibana(St, Gt).data
    RSt = curvature_action(Rt, gi, St).data
    SoR = ricci_operator_action(St, gi, Rt).data
    shift = tr / 2 + (n - 2) * q

    def mbgd_to_bgdm(X):
        # blocks are quoted with mu first; storage order is (beta, gamma, delta, mu)
        return X.transpose(1, 2, 3, 0)

    QgR = {
        "1bgd1m": mbgd_to_bgdm(F * g11 * (Rt_mbgd + (tr / 2 - q) * Gt)),
        "abgdlm": F**2 * QgRt,
    }
    # Q(S,R)_{1bgd1m}: -(trT/2) g11 ((n-1) R~_mbgd - g~_bg S~_dm + g~_bd S~_gm + (trT/2 - q) G~_mbgd)
    QSR = {
        "1bgd1m": mbgd_to_bgdm(-tr / 2 * g11 * ((n - 1) * Rt_mbgd - W + (tr / 2 - q) * Gt)),
        "1b1dlm": -tr / 2 * g11 * QgSt,
        "abgdlm": F * QSRt - jet.F * q * QSGt - F * shift * QgRt,
    }
    V = {
        "1bg1": (n - 1) / (4 * F) * tr**2 * g11 * gt,
        "a11d": -tr / (2 * F) * g11 * (St - shift * gt),
        "abgd": SoR - shift * Rt - q * np.einsum("bg,ad->abgd", gt, St)
        + q * np.einsum("bd,ag->abgd", gt, St) + shift * q * Gt,
    }
    P = {
        "1b1dlm": g11 * (RSt + (tr / 2 - q) * QgSt),
        "1bgd1m": mbgd_to_bgdm(g11 * (
            SoR - shift * Rt_mbgd + (tr / 2 - q) * W
            + ((n - 2) * q**2 - tr**2 / 4 - (n - 3) * tr / 2 * q) * Gt)),
        "abgdlm": F * p_from_v(gt, V["abgd"]),
    }
    return WarpedBlocks(QgR=QgR, QSR=QSR, V=V, P=P, n=n)


def assemble6(n: int, blocks: dict) -> np.ndarray:
    """Full (0,6) tensor from warped-product blocks keyed "1bgd1m", "1b1dlm", "abgdlm".

    The tensor is assumed antisymmetric in slots (0,1), (2,3) and (4,5) and symmetric
    under the pair exchange (01) <-> (23), which holds for Q(A,T), B.T and P when T is
    a generalized curvature tensor.  Missing keys are zero blocks.
    """
    X = np.zeros((n,) * 6)
    F_ = slice(1, None)
    if "abgdlm" in blocks:
        X[F_, F_, F_, F_, F_, F_] = blocks["abgdlm"]
    if "1bgd1m" in blocks:
        A = blocks["1bgd1m"]  # (b, g, d, m)
        Asw = A.transpose(1, 2, 0, 3)  # (g, d, b, m) for the pair-exchanged slots
        for s01, (i0, i1) in ((1, (0, F_)), (-1, (F_, 0))):
            for s45, (l0, l1) in ((1, (0, F_)), (-1, (F_, 0))):
                X[i0, i1, F_, F_, l0, l1] = s01 * s45 * A
                X[F_, F_, i0, i1, l0, l1] = s01 * s45 * Asw
    if "1b1dlm" in blocks:
        B = blocks["1b1dlm"]  # (b, d, l, m)
        X[0, F_, 0, F_, F_, F_] = B
        X[F_, 0, 0, F_, F_, F_] = -B
        X[0, F_, F_, 0, F_, F_] = -B
        X[F_, 0, F_, 0, F_, F_] = B
    return X


def assemble_v(n: int, blocks: dict) -> np.ndarray:
    V = np.zeros((n,) * 4)
    F_ = slice(1, None)
    V[0, F_, F_, 0] = blocks["1bg1"]
    V[0, F_, 0, F_] = -blocks["1bg1"]
    V[F_, 0, 0, F_] = blocks["a11d"]
    V[F_, 0, F_, 0] = -blocks["a11d"]
    V[F_, F_, F_, F_] = blocks["abgd"]
    return V


def vrs_residual(spec: WarpedSpec) -> float:
    """Relative deviation of V_abgd + V_bagd from (R~.S~) - (Delta1F/4F) Q(g~,S~)."""
    from .tensorkit import relative_norm

    blocks = warped_blocks(spec)
    V = blocks.V["abgd"]
    f = spec.fiber
    q = warp_scalars(spec.jet(), spec.epsilon).Delta1F_over_4F
    rhs = curvature_action(f.R, f.g_inv, f.S).data - q * tachibana(f.g, f.S).data
    lhs = V + V.transpose(1, 0, 2, 3)
    return relative_norm(lhs - rhs, lhs, rhs)


# --- warping ODE checks -----------------------------------------------------------


def b9_residual(fn: WarpingFunction, x1: float, epsilon: int, C1: float) -> float:
    """F F'' - F'^2 + 2 eps C1 F, normalised by the largest term (or 1)."""
    j = warping_jet(fn, x1)
    terms = (j.F * j.Fpp, j.Fp**2, 2 * epsilon * C1 * j.F)
    val = terms[0] - terms[1] + terms[2]
    return abs(val) / max(abs(terms[0]), abs(terms[1]), abs(terms[2]), 1.0)


def b8_check(jet: WarpingJet, epsilon: int, kappa_fiber: float, n: int) -> float:
    """|Delta1F/(4F) - trT/2 - kappa~/((n-1)(n-2))| relative to the largest term (or 1)."""
    if n < 4:
        raise WarpingError("n must be >= 4")
    sc = warp_scalars(jet, epsilon)
    target = kappa_fiber / ((n - 1) * (n - 2))
    val = sc.Delta1F_over_4F - sc.trT / 2 - target
    return abs(val) / max(abs(sc.Delta1F_over_4F), abs(sc.trT / 2), abs(target), 1.0)


def admissible_points(fn: WarpingFunction, count: int, lo: float = -1.0, hi: float = 1.0,
                      min_F: float = 1e-2) -> np.ndarray:
    """``count`` x1 values spread over [lo, hi] where F >= min_F."""
    xs = []
    for x in np.linspace(lo, hi, 4 * count):
        try:
            j = warping_jet(fn, x)
        except WarpingError:
            continue
        if j.F >= min_F:
            xs.append(x)
    if len(xs) < count:
        raise WarpingError(f"only {len(xs)} admissible points in [{lo}, {hi}]")
    idx = np.linspace(0, len(xs) - 1, count).round().astype(int)
    return np.asarray(xs)[idx]


def catalog_warp(family: str, params: dict) -> WarpingFunction:
    """Build a catalog warp from a config-style id and parameter mapping."""
    params = dict(params)
    if family == "quadratic":
        return quadratic(**params)
    if family == "exponential":
        return exponential(**params)
    if family == "sinusoidal":
        return sinusoidal(**params)
    raise WarpingError(f"unknown warping family {family!r}")
