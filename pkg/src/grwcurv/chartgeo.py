"""Curvature snapshots from metric fields, closed-form catalogs and raw (g, R) pairs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .tensorkit import (
    DenseTensor,
    MetricPoint,
    TensorError,
    as_array,
    flat_metric,
    g_tensor,
    kulkarni_nomizu,
    norm,
)


class GeometryError(ValueError):
    """Raised when a point is outside a field's domain or the metric degenerates."""


@dataclass(frozen=True, eq=False)
class CurvatureSnapshot:
    """Pointwise curvature data (g, R, S, kappa, C, G) in one chart basis."""

    g: DenseTensor
    g_inv: DenseTensor
    R: DenseTensor
    S: DenseTensor
    kappa: float
    C: DenseTensor
    G: DenseTensor
    signature: tuple
    provenance: str = "synthetic"

    @property
    def dim(self) -> int:
        return self.g.dim

    def scaled(self, lam: float) -> "CurvatureSnapshot":
        """Snapshot of the homothetic metric lam**2 * g at the same point."""
        return synthetic_snapshot(lam**2 * self.g.data, lam**2 * self.R.data,
                                  provenance=f"{self.provenance}*{lam:g}^2")


def _signature_negatives(dim: int, signature) -> int:
    if signature is None or signature == "riemannian":
        return 0
    if signature == "lorentzian":
        return 1
    if isinstance(signature, (int, np.integer)):
        return int(signature)
    s = tuple(signature)
    if len(s) != 2 or s[0] + s[1] != dim:
        raise GeometryError(f"signature {signature} does not match dim {dim}")
    return int(s[0])


def ricci_from(g_inv: np.ndarray, R: np.ndarray) -> np.ndarray:
    """S_ij = g^{hk} R_{hijk}."""
    S = np.einsum("hk,hijk->ij", g_inv, R)
    return 0.5 * (S + S.T)


def weyl_from(g, R, S, kappa: float) -> DenseTensor:
    """Weyl tensor C = R - (g ^ S - kappa/(n-1) G) / (n-2)."""
    g, R, S = as_array(g), as_array(R), as_array(S)
    n = g.shape[0]
    if n < 3:
        raise GeometryError("Weyl tensor needs dim >= 3")
    C = R - (kulkarni_nomizu(g, S).data - kappa / (n - 1) * g_tensor(g).data) / (n - 2)
    return DenseTensor(C, "generalized-curvature", ref_scale=float(np.max(np.abs(R))))


def synthetic_snapshot(g, R, provenance: str = "synthetic") -> CurvatureSnapshot:
    """Snapshot from a metric and a generalized curvature tensor at one point."""
    mp = MetricPoint(DenseTensor(g, "symmetric-pair"))
    try:
        Rt = DenseTensor(R, "generalized-curvature")
    except TensorError as exc:
        raise GeometryError(str(exc)) from exc
    gi = mp.g_inv.data
    S = ricci_from(gi, Rt.data)
    kappa = float(np.einsum("ij,ij->", gi, S))
    n = mp.dim
    if n >= 3:
        C = weyl_from(mp.g, Rt, S, kappa)
    else:
        # every curvature tensor in dim <= 2 is pure trace
        C = DenseTensor(np.zeros((n,) * 4), "generalized-curvature")
    return CurvatureSnapshot(
        g=mp.g, g_inv=mp.g_inv, R=Rt, S=DenseTensor(S, "symmetric-pair"), kappa=kappa,
        C=C, G=g_tensor(mp.g), signature=mp.signature, provenance=provenance,
    )


def space_form_snapshot(dim: int, kappa: float, signature=None, g=None) -> CurvatureSnapshot:
    """Constant curvature snapshot R = kappa / ((n-1) n) G.

    ``g`` defaults to the diagonal flat metric with the requested signature; pass a
    chart metric to get the space form expressed in that chart.
    """
    if dim < 2:
        raise GeometryError("space form needs dim >= 2")
    if g is None:
        g = flat_metric(dim, _signature_negatives(dim, signature))
    g = as_array(g)
    R = kappa / ((dim - 1) * dim) * g_tensor(g).data
    return synthetic_snapshot(g, R, provenance=f"space_form(n={dim},kappa={kappa:g})")


def flat_snapshot(dim: int, signature=None) -> CurvatureSnapshot:
    g = flat_metric(dim, _signature_negatives(dim, signature))
    return synthetic_snapshot(g, np.zeros((dim,) * 4), provenance=f"flat(n={dim})")


def product_snapshot(s1: CurvatureSnapshot, s2: CurvatureSnapshot) -> CurvatureSnapshot:
    """Riemannian-product snapshot: block-diagonal g, no mixed curvature components."""
    n1, n2 = s1.dim, s2.dim
    n = n1 + n2
    g = np.zeros((n, n))
    g[:n1, :n1] = s1.g.data
    g[n1:, n1:] = s2.g.data
    R = np.zeros((n,) * 4)
    R[:n1, :n1, :n1, :n1] = s1.R.data
    R[n1:, n1:, n1:, n1:] = s2.R.data
    return synthetic_snapshot(g, R, provenance=f"({s1.provenance})x({s2.provenance})")


def product_of_spheres(*dims: int, radius: float = 1.0) -> CurvatureSnapshot:
    snaps = [space_form_snapshot(m, m * (m - 1) / radius**2) if m >= 2 else flat_snapshot(m)
             for m in dims]
    out = snaps[0]
    for s in snaps[1:]:
        out = product_snapshot(out, s)
    return out


# --- metric fields -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricField:
    """A metric on a chart.

    ``metric(x, xp)`` returns the metric matrix using the array namespace ``xp`` (numpy
    or jax.numpy) so that it can be differentiated automatically.  ``jet`` optionally
    returns the closed-form two-jet and ``exact`` a closed-form snapshot.
    """

    dim: int
    signature: tuple
    metric: Callable
    provenance: str = "user"
    jet: Optional[Callable] = None
    exact: Optional[Callable] = None
    domain: Optional[Callable] = None
    _ad: dict = field(default_factory=dict, repr=False)

    def g(self, x) -> np.ndarray:
        return np.asarray(self.metric(np.asarray(x, dtype=float), np), dtype=float)


def _ad_jet_fn(fld: MetricField):
    if "fn" not in fld._ad:
        import jax

        jax.config.update("jax_enable_x64", True)
        import jax.numpy as jnp

        def gfun(x):
            return fld.metric(x, jnp)

        d1 = jax.jacfwd(gfun)
        d2 = jax.jacfwd(d1)
        fld._ad["fn"] = jax.jit(lambda x: (gfun(x), d1(x), d2(x)))
    return fld._ad["fn"]


def two_jet(fld: MetricField, point, method: str = "auto"):
    """Metric two-jet (g, dg, ddg) with dg[c,a,b] = d_c g_ab and ddg[c,d,a,b] = d_c d_d g_ab.

    ``method`` is "closed" (catalog formulas), "ad" (forward-mode automatic
    differentiation) or "auto" (closed form when available).
    """
    x = np.asarray(point, dtype=float)
    if x.shape != (fld.dim,):
        raise GeometryError(f"point has shape {x.shape}, field dim is {fld.dim}")
    if fld.domain is not None and not fld.domain(x):
        raise GeometryError(f"point {x.tolist()} outside the domain of {fld.provenance}")
    if method not in ("auto", "closed", "ad"):
        raise ValueError(f"unknown jet method {method!r}")
    if method == "closed" and fld.jet is None:
        raise GeometryError(f"{fld.provenance} has no closed-form jet")
    if fld.jet is not None and method != "ad":
        g, dg, ddg = (np.asarray(a, dtype=float) for a in fld.jet(x))
    else:
        g, d1, d2 = (np.asarray(a, dtype=float) for a in _ad_jet_fn(fld)(x))
        dg = d1.transpose(2, 0, 1)
        ddg = d2.transpose(2, 3, 0, 1)
    n = fld.dim
    if g.shape != (n, n) or dg.shape != (n, n, n) or ddg.shape != (n,) * 4:
        raise GeometryError("malformed jet")
    det = np.linalg.det(g)
    if not np.isfinite(det) or abs(det) < 1e-12 * max(1.0, np.max(np.abs(g))) ** n:
        raise GeometryError(f"singular metric at {x.tolist()} (det={det:.3e})")
    return g, dg, ddg


def christoffel(jet) -> np.ndarray:
    """Levi-Civita symbols Gamma[m, i, j] = Gamma^m_{ij}."""
    g, dg, _ = jet
    gi = np.linalg.inv(g)
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # [k, i, j]
    return np.einsum("mk,kij->mij", gi, low)


def riemann_from_jet(jet) -> np.ndarray:
    """R_{hijk} = g(R(d_h, d_i) d_j, d_k) with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]."""
    g, dg, ddg = jet
    gi = np.linalg.inv(g)
    low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # Gamma_{k ij}
    gam = np.einsum("mk,kij->mij", gi, low)
    # d_h Gamma_{k ij} = (d_h d_i g_kj + d_h d_j g_ki - d_h d_k g_ij) / 2
    dlow = 0.5 * (ddg.transpose(0, 2, 1, 3) + ddg.transpose(0, 2, 3, 1) - ddg)
    dgi = -np.einsum("ma,hab,bk->hmk", gi, dg, gi)
    dgam = np.einsum("hmk,kij->hmij", dgi, low) + np.einsum("mk,hkij->hmij", gi, dlow)
    # R^m_{hij} = d_h Gam^m_ij - d_i Gam^m_hj + Gam^l_ij Gam^m_hl - Gam^l_hj Gam^m_il
    Rup = (
        np.einsum("hmij->mhij", dgam)
        - np.einsum("imhj->mhij", dgam)
        + np.einsum("lij,mhl->mhij", gam, gam)
        - np.einsum("lhj,mil->mhij", gam, gam)
    )
    R = np.einsum("km,mhij->hijk", g, Rup)
    return _project_curvature(R)


def _project_curvature(R: np.ndarray) -> np.ndarray:
    # strip round-off asymmetry; the algebraic symmetries hold exactly in exact arithmetic
    R = 0.5 * (R - R.transpose(1, 0, 2, 3))
    R = 0.5 * (R - R.transpose(0, 1, 3, 2))
    return 0.5 * (R + R.transpose(2, 3, 0, 1))


def snapshot_from_field(fld: MetricField, point, method: str = "auto") -> CurvatureSnapshot:
    jet = two_jet(fld, point, method)
    R = riemann_from_jet(jet)
    g = 0.5 * (jet[0] + jet[0].T)
    return synthetic_snapshot(g, R, provenance=f"{fld.provenance}@{np.round(point, 6).tolist()}")


# --- catalog --------------------------------------------------------------------------


def flat_field(dim: int, signature=None) -> MetricField:
    eta = flat_metric(dim, _signature_negatives(dim, signature))

    def metric(x, xp):
        return xp.asarray(eta) + 0.0 * x[0]

    def jet(x):
        return eta.copy(), np.zeros((dim,) * 3), np.zeros((dim,) * 4)

    return MetricField(
        dim=dim, signature=(_signature_negatives(dim, signature),
                            dim - _signature_negatives(dim, signature)),
        metric=metric, provenance=f"flat(n={dim})", jet=jet,
        exact=lambda x: flat_snapshot(dim, signature),
    )


def sphere_field(m: int, radius: float = 1.0) -> MetricField:
    """Round sphere S^m in hyperspherical coordinates (theta_1, ..., theta_{m-1}, phi)."""
    r2 = radius**2

    def metric(x, xp):
        s2 = xp.sin(x[: m - 1]) ** 2
        diag = [xp.ones(()) * r2]
        acc = r2
        for j in range(m - 1):
            acc = acc * s2[j]
            diag.append(acc)
        return xp.diag(xp.stack(diag))

    def jet(x):
        f = np.sin(x) ** 2
        f1 = np.sin(2 * x)
        f2 = 2 * np.cos(2 * x)
        g = np.zeros((m, m))
        dg = np.zeros((m, m, m))
        ddg = np.zeros((m, m, m, m))
        for k in range(m):
            factors = list(range(k))  # g_kk = r^2 prod_{j<k} sin^2 x_j
            g[k, k] = r2 * np.prod(f[factors])
            for c in factors:
                rest = [j for j in factors if j != c]
                dg[c, k, k] = r2 * f1[c] * np.prod(f[rest])
                ddg[c, c, k, k] = r2 * f2[c] * np.prod(f[rest])
                for d in factors:
                    if d != c:
                        rest2 = [j for j in rest if j != d]
                        ddg[c, d, k, k] = r2 * f1[c] * f1[d] * np.prod(f[rest2])
        return g, dg, ddg

    def exact(x):
        return space_form_snapshot(m, m * (m - 1) / r2, g=metric(np.asarray(x, float), np))

    def domain(x):
        return bool(np.all(np.abs(np.sin(x[: m - 1])) > 1e-8))

    return MetricField(dim=m, signature=(0, m), metric=metric,
                       provenance=f"sphere(m={m},r={radius:g})", jet=jet, exact=exact,
                       domain=domain)


def product_field(f1: MetricField, f2: MetricField) -> MetricField:
    n1, n2 = f1.dim, f2.dim
    n = n1 + n2

    def metric(x, xp):
        a = f1.metric(x[:n1], xp)
        b = f2.metric(x[n1:], xp)
        top = xp.concatenate([a, xp.zeros((n1, n2))], axis=1)
        bot = xp.concatenate([xp.zeros((n2, n1)), b], axis=1)
        return xp.concatenate([top, bot], axis=0)

    jet = None
    if f1.jet is not None and f2.jet is not None:
        def jet(x):
            j1, j2 = f1.jet(x[:n1]), f2.jet(x[n1:])
            g = np.zeros((n, n))
            dg = np.zeros((n,) * 3)
            ddg = np.zeros((n,) * 4)
            g[:n1, :n1], g[n1:, n1:] = j1[0], j2[0]
            dg[:n1, :n1, :n1], dg[n1:, n1:, n1:] = j1[1], j2[1]
            ddg[:n1, :n1, :n1, :n1], ddg[n1:, n1:, n1:, n1:] = j1[2], j2[2]
            return g, dg, ddg

    exact = None
    if f1.exact is not None and f2.exact is not None:
        def exact(x):
            return product_snapshot(f1.exact(x[:n1]), f2.exact(x[n1:]))

    def domain(x):
        return ((f1.domain is None or f1.domain(x[:n1]))
                and (f2.domain is None or f2.domain(x[n1:])))

    sig = (f1.signature[0] + f2.signature[0], f1.signature[1] + f2.signature[1])
    return MetricField(dim=n, signature=sig, metric=metric,
                       provenance=f"{f1.provenance}x{f2.provenance}", jet=jet, exact=exact,
                       domain=domain)


def conformal_field(dim: int, u_grad, signature=None) -> MetricField:
    """g = exp(2 u.x) eta with a linear conformal factor exponent."""
    u = np.asarray(u_grad, dtype=float)
    neg = _signature_negatives(dim, signature)
    eta = flat_metric(dim, neg)

    def metric(x, xp):
        return xp.exp(2.0 * xp.dot(xp.asarray(u), x)) * xp.asarray(eta)

    def jet(x):
        g = np.exp(2.0 * u @ x) * eta
        return g, 2.0 * np.einsum("c,ab->cab", u, g), 4.0 * np.einsum("c,d,ab->cdab", u, u, g)

    return MetricField(dim=dim, signature=(neg, dim - neg), metric=metric,
                       provenance=f"conformal(u={u.tolist()})", jet=jet)


def random_metric_field(dim: int, signature=None, seed: int = 0,
                        amplitude: float = 0.05) -> MetricField:
    """eta + amplitude * (symmetric polynomial of degree <= 2 in the coordinates)."""
    neg = _signature_negatives(dim, signature)
    eta = flat_metric(dim, neg)
    rng = np.random.default_rng(seed)
    c0 = rng.normal(size=(dim, dim))
    c1 = rng.normal(size=(dim, dim, dim))
    c2 = rng.normal(size=(dim, dim, dim, dim))
    c0 = 0.5 * (c0 + c0.T)
    c1 = 0.5 * (c1 + c1.transpose(1, 0, 2))
    c2 = 0.5 * (c2 + c2.transpose(1, 0, 2, 3))
    c2 = 0.5 * (c2 + c2.transpose(0, 1, 3, 2))  # symmetric in the two coordinate slots
    a = float(amplitude)

    def metric(x, xp):
        p = (xp.asarray(c0) + xp.einsum("abc,c->ab", xp.asarray(c1), x)
             + xp.einsum("abcd,c,d->ab", xp.asarray(c2), x, x))
        return xp.asarray(eta) + a * p

    def jet(x):
        g = metric(x, np)
        dg = a * (c1.transpose(2, 0, 1) + 2.0 * np.einsum("abcd,d->cab", c2, x))
        ddg = a * 2.0 * c2.transpose(2, 3, 0, 1)
        return g, dg, ddg

    def domain(x):
        ev = np.linalg.eigvalsh(metric(x, np))
        return bool(np.min(np.abs(ev)) > 1e-3 and int(np.sum(ev < 0)) == neg)

    return MetricField(dim=dim, signature=(neg, dim - neg), metric=metric,
                       provenance=f"random(n={dim},seed={seed},amp={a:g})", jet=jet,
                       domain=domain)


def sample_points(fld: MetricField, count: int, seed: int = 0, radius: float = 0.5,
                  center=None, max_tries: int = 1000) -> list:
    """Deterministic points inside the field's domain, drawn around ``center``."""
    rng = np.random.default_rng(seed)
    c = np.zeros(fld.dim) if center is None else np.asarray(center, dtype=float)
    pts = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > max_tries:
            raise GeometryError(f"could not sample {count} admissible points for {fld.provenance}")
        x = c + rng.uniform(-radius, radius, size=fld.dim)
        if fld.domain is None or fld.domain(x):
            pts.append(x)
    return pts


def random_snapshot(dim: int, seed: int, negatives: int = 0, amplitude: float = 0.05,
                    ) -> CurvatureSnapshot:
    """Snapshot of a random polynomial metric field at an admissible point."""
    fld = random_metric_field(dim, negatives, seed, amplitude)
    x = sample_points(fld, 1, seed=seed)[0]
    return snapshot_from_field(fld, x)


def random_curvature_snapshot(dim: int, rng: np.random.Generator, negatives: int = 0,
                              terms: int = 4) -> CurvatureSnapshot:
    """Random metric plus a random algebraic curvature tensor (no field behind it)."""
    from .tensorkit import random_curvature_tensor

    eta = flat_metric(dim, negatives)
    P = np.eye(dim) + 0.3 * rng.normal(size=(dim, dim))
    g = P.T @ eta @ P
    return synthetic_snapshot(0.5 * (g + g.T), random_curvature_tensor(dim, rng, terms),
                              provenance=f"random_algebraic(n={dim})")


def max_trace_of_weyl(snap: CurvatureSnapshot) -> float:
    """Largest relative single g-contraction of C (all six slot pairs)."""
    gi, C = snap.g_inv.data, snap.C.data
    ref = max(norm(snap.R), 1e-300)
    traces = [
        np.einsum("ab,abcd->cd", gi, C), np.einsum("ac,abcd->bd", gi, C),
        np.einsum("ad,abcd->bc", gi, C), np.einsum("bc,abcd->ad", gi, C),
        np.einsum("bd,abcd->ac", gi, C), np.einsum("cd,abcd->ab", gi, C),
    ]
    return max(norm(t) for t in traces) / ref
