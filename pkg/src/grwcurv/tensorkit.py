"""Dense multilinear algebra in a fixed chart basis.

All tensors are covariant arrays of shape ``(n,) * rank``.  Raising an index is
always explicit through an inverse metric.  The helpers here accept either a
:class:`DenseTensor` or a bare ``numpy`` array and return :class:`DenseTensor`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

SYMMETRY_CLASSES = ("none", "symmetric-pair", "generalized-curvature")
SYMMETRY_RTOL = 1e-10
MAX_RANK = 6


class TensorError(ValueError):
    """Raised for malformed tensors or incompatible operands."""


@dataclass(frozen=True, eq=False)
class DenseTensor:
    data: np.ndarray
    symmetry: str = "none"
    # entries of a tensor derived from larger ones may be pure rounding; validate against this
    ref_scale: float = field(default=0.0, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if arr.ndim > MAX_RANK:
            raise TensorError(f"rank {arr.ndim} exceeds {MAX_RANK}")
        if arr.ndim and len(set(arr.shape)) != 1:
            raise TensorError(f"non-cubic shape {arr.shape}")
        if self.symmetry not in SYMMETRY_CLASSES:
            raise TensorError(f"unknown symmetry class {self.symmetry!r}")
        if self.symmetry == "symmetric-pair":
            if arr.ndim != 2:
                raise TensorError("symmetric-pair requires rank 2")
            dev = symmetric_deviation(arr, self.ref_scale)
            if dev > SYMMETRY_RTOL:
                raise TensorError(f"not symmetric (relative deviation {dev:.3e})")
        elif self.symmetry == "generalized-curvature":
            if arr.ndim != 4:
                raise TensorError("generalized-curvature requires rank 4")
            dev = curvature_symmetry_deviation(arr, self.ref_scale)
            if dev > SYMMETRY_RTOL:
                raise TensorError(
                    f"not a generalized curvature tensor (relative deviation {dev:.3e})"
                )

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def dim(self) -> int:
        return self.data.shape[0] if self.data.ndim else 0

    @property
    def components(self) -> np.ndarray:
        """Row-major flat component list of length ``dim**rank``."""
        return self.data.ravel()

    def norm(self) -> float:
        return norm(self)

    def _combine(self, other, op):
        b = as_array(other)
        sym = self.symmetry
        if isinstance(other, DenseTensor) and other.symmetry != sym:
            sym = "none"
        return DenseTensor(op(self.data, b), sym)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        return DenseTensor(-self.data, self.symmetry)

    def __mul__(self, scalar):
        return DenseTensor(self.data * float(scalar), self.symmetry)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return DenseTensor(self.data / float(scalar), self.symmetry)

    def __repr__(self):
        return f"DenseTensor(dim={self.dim}, rank={self.rank}, symmetry={self.symmetry!r})"


TensorLike = Union[DenseTensor, np.ndarray]


def as_array(t: TensorLike) -> np.ndarray:
    if isinstance(t, DenseTensor):
        return t.data
    return np.asarray(t, dtype=float)


def _scale(*arrays: np.ndarray) -> float:
    return max([float(np.max(np.abs(a))) if a.size else 0.0 for a in arrays] + [1e-300])


def symmetric_deviation(a: TensorLike, scale: float = 0.0) -> float:
    a = as_array(a)
    return float(np.max(np.abs(a - a.T))) / max(_scale(a), scale)


def curvature_symmetry_deviation(b: TensorLike, scale: float = 0.0) -> float:
    """Largest violation of the generalized-curvature identities, relative to
    max(|b|_max, scale)."""
    b = as_array(b)
    devs = [
        b + b.transpose(1, 0, 2, 3),
        b + b.transpose(0, 1, 3, 2),
        b - b.transpose(2, 3, 0, 1),
        b + b.transpose(1, 2, 0, 3) + b.transpose(2, 0, 1, 3),
    ]
    return max(float(np.max(np.abs(d))) for d in devs) / max(_scale(b), scale)


@dataclass(frozen=True, eq=False)
class MetricPoint:
    """Metric components at one point together with the inverse and signature."""

    g: DenseTensor
    g_inv: DenseTensor = field(default=None)
    signature: tuple = field(default=None)

    def __post_init__(self):
        g = self.g if isinstance(self.g, DenseTensor) else DenseTensor(self.g, "symmetric-pair")
        object.__setattr__(self, "g", g)
        det = np.linalg.det(g.data)
        if not np.isfinite(det) or abs(det) <= 1e-14 * _scale(g.data) ** g.dim:
            raise TensorError(f"degenerate metric (det={det:.3e})")
        if self.g_inv is None:
            ginv = np.linalg.inv(g.data)
            ginv = 0.5 * (ginv + ginv.T)
            object.__setattr__(self, "g_inv", DenseTensor(ginv, "symmetric-pair"))
        eig = np.linalg.eigvalsh(g.data)
        sig = (int(np.sum(eig < 0)), int(np.sum(eig > 0)))
        if self.signature is None:
            object.__setattr__(self, "signature", sig)
        elif tuple(self.signature) != sig:
            raise TensorError(f"declared signature {self.signature} but eigenvalues give {sig}")
        eye = g.data @ self.g_inv.data
        if np.max(np.abs(eye - np.eye(g.dim))) > 1e-12 * max(1.0, np.linalg.cond(g.data)):
            raise TensorError("g_inv is not the inverse of g")

    @property
    def dim(self) -> int:
        return self.g.dim


def flat_metric(dim: int, negatives: int = 0) -> np.ndarray:
    """Diagonal pseudo-Euclidean metric with ``negatives`` leading -1 entries."""
    return np.diag([-1.0] * negatives + [1.0] * (dim - negatives))


def g_tensor(g: TensorLike) -> DenseTensor:
    """G_{hijk} = g_{hk} g_{ij} - g_{hj} g_{ik}."""
    g = as_array(g)
    G = np.einsum("hk,ij->hijk", g, g) - np.einsum("hj,ik->hijk", g, g)
    return DenseTensor(G, "generalized-curvature")


def _check_symmetric(a: np.ndarray, what: str):
    if a.ndim != 2:
        raise TensorError(f"{what} must be rank 2")
    if symmetric_deviation(a) > 1e-12:
        raise TensorError(f"{what} is not symmetric")


def kulkarni_nomizu(E: TensorLike, T: TensorLike) -> DenseTensor:
    """Kulkarni-Nomizu product of a symmetric (0,2) tensor E with a (0,k) tensor T, k >= 2.

    (E ^ T)_{abcd...} = E_ad T_bc... + E_bc T_ad... - E_ac T_bd... - E_bd T_ac...
    """
    e, t = as_array(E), as_array(T)
    _check_symmetric(e, "E")
    if t.ndim < 2:
        raise TensorError("T must have rank >= 2")
    if t.ndim + 2 > MAX_RANK:
        raise TensorError("result rank exceeds 6")
    if t.shape[0] != e.shape[0]:
        raise TensorError(f"dimension mismatch {e.shape[0]} vs {t.shape[0]}")
    out = (
        np.einsum("ad,bc...->abcd...", e, t)
        + np.einsum("bc,ad...->abcd...", e, t)
        - np.einsum("ac,bd...->abcd...", e, t)
        - np.einsum("bd,ac...->abcd...", e, t)
    )
    sym = "generalized-curvature" if t.ndim == 2 and symmetric_deviation(t) <= 1e-12 else "none"
    return DenseTensor(out, sym)


_LETTERS = "abcdef"


def tachibana(A: TensorLike, T: TensorLike) -> DenseTensor:
    """Tachibana tensor Q(A, T) of a symmetric (0,2) tensor A and a (0,k) tensor T.

    Q(A,T)_{i1..ik l m} = sum_s A_{i_s l} T_{..m..} - A_{i_s m} T_{..l..}
    where the replaced index sits in slot s.
    """
    a, t = as_array(A), as_array(T)
    _check_symmetric(a, "A")
    if t.ndim not in (2, 4):
        raise TensorError(f"unsupported rank {t.ndim} for Q(A,T)")
    if t.shape[0] != a.shape[0]:
        raise TensorError(f"dimension mismatch {a.shape[0]} vs {t.shape[0]}")
    k = t.ndim
    idx = _LETTERS[:k]
    out = np.zeros((a.shape[0],) * (k + 2))
    for s in range(k):
        with_m = idx[:s] + "m" + idx[s + 1:]
        with_l = idx[:s] + "l" + idx[s + 1:]
        out += np.einsum(f"{idx[s]}l,{with_m}->{idx}lm", a, t)
        out -= np.einsum(f"{idx[s]}m,{with_l}->{idx}lm", a, t)
    return DenseTensor(out)


def curvature_action(B: TensorLike, g_inv: TensorLike, T: TensorLike) -> DenseTensor:
    """B . T for a generalized curvature tensor B acting as a derivation on T.

    (B.T)_{i1..ik l m} = sum_s g^{pq} T_{..p..} B_{q i_s l m}
    """
    b, gi, t = as_array(B), as_array(g_inv), as_array(T)
    if t.ndim not in (2, 4):
        raise TensorError(f"unsupported rank {t.ndim} for B.T")
    if b.ndim != 4 or not (b.shape[0] == gi.shape[0] == t.shape[0]):
        raise TensorError("dimension mismatch")
    raised = np.einsum("pq,qilm->pilm", gi, b)
    k = t.ndim
    out = np.zeros((t.shape[0],) * (k + 2))
    for s in range(k):
        term = np.tensordot(t, raised, axes=([s], [0]))
        # remaining T slots, then (i_s, l, m): put i_s back in slot s
        out += np.moveaxis(term, k - 1, s)
    return DenseTensor(out)


def inner_product(T1: TensorLike, T2: TensorLike) -> float:
    a, b = as_array(T1), as_array(T2)
    if a.shape != b.shape:
        raise TensorError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def norm(T: TensorLike) -> float:
    return float(np.linalg.norm(as_array(T).ravel()))


def relative_norm(diff: TensorLike, *refs: TensorLike) -> float:
    """||diff|| / max(||ref_i||, 1e-300)."""
    den = max([norm(r) for r in refs] + [1e-300])
    return norm(diff) / den


@dataclass(frozen=True)
class GramFit:
    coefficients: np.ndarray
    residual: float
    rank: int
    rank_deficient: bool
    condition: float


def gram_fit(D: TensorLike, basis: Sequence[TensorLike], rcond: float = 1e-12) -> GramFit:
    """Least-squares coefficients c minimising ||D - sum c_i B_i||.

    The relative residual is ``||D - sum c_i B_i|| / max(||D||, max_i ||B_i||, 1e-300)``.
    A rank-deficient basis gets the minimum-norm solution and is flagged.
    """
    if len(basis) == 0:
        raise TensorError("empty basis")
    d = as_array(D).ravel()
    cols = [as_array(b).ravel() for b in basis]
    if any(c.shape != d.shape for c in cols):
        raise TensorError("basis shapes differ from D")
    X = np.stack(cols, axis=1)
    coef, _, rank, sv = np.linalg.lstsq(X, d, rcond=rcond)
    resid = np.linalg.norm(d - X @ coef)
    den = max([np.linalg.norm(d)] + [np.linalg.norm(c) for c in cols] + [1e-300])
    cond = float(sv[0] / sv[-1]) ** 2 if sv[-1] > 0 else np.inf
    return GramFit(
        coefficients=coef,
        residual=float(resid / den),
        rank=int(rank),
        rank_deficient=int(rank) < len(cols),
        condition=cond,
    )


def dump(T: TensorLike, tol: float = 0.0) -> list:
    """Nonzero entries as ``(index_tuple, "%.17g" value)`` pairs in row-major order."""
    a = as_array(T)
    out = []
    for idx in zip(*np.nonzero(np.abs(a) > tol)):
        out.append((tuple(int(i) for i in idx), f"{a[idx]:.17g}"))
    return out


def raise_first(g_inv: TensorLike, A: TensorLike) -> np.ndarray:
    """Mixed matrix A^i_j = g^{ik} A_kj."""
    return as_array(g_inv) @ as_array(A)


def ricci_operator_action(S: TensorLike, g_inv: TensorLike, R: TensorLike) -> DenseTensor:
    """(S o R)_{hijk} = S_h^l R_{lijk} = g^{lm} S_{hl} R_{mijk}."""
    s, gi, r = as_array(S), as_array(g_inv), as_array(R)
    return DenseTensor(np.einsum("hl,lm,mijk->hijk", s, gi, r))


def sym_outer_block(g: TensorLike, S: TensorLike) -> np.ndarray:
    """W_{mbcd} = g_bc S_md - g_bd S_mc (recurring block in the fiber conditions)."""
    g, s = as_array(g), as_array(S)
    return np.einsum("bc,md->mbcd", g, s) - np.einsum("bd,mc->mbcd", g, s)


def random_symmetric(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(scale=scale, size=(dim, dim))
    return 0.5 * (a + a.T)


def random_curvature_tensor(
    dim: int, rng: np.random.Generator, terms: int = 4, scale: float = 1.0
) -> np.ndarray:
    """Random algebraic curvature tensor as a sum of Kulkarni-Nomizu products."""
    R = np.zeros((dim,) * 4)
    for _ in range(terms):
        E = random_symmetric(dim, rng, scale)
        F = random_symmetric(dim, rng)
        R += kulkarni_nomizu(E, F).data
    return R
