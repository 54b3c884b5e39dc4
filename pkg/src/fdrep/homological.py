"""Projective covers, syzygies, duals, transpose, Nakayama functor and Ext."""

from __future__ import annotations

import numpy as np

from . import linalg as la
from .algebra import Algebra, opposite
from .decompose import decompose, registry
from .modules import (
    Module,
    ModuleError,
    ModuleHom,
    _block_diag,
    direct_sum,
    hom_matrices,
    quotient,
    regular_module,
    submodule,
    zero_module,
)
from .sequences import ShortExactSeq

__all__ = [
    "projective_cover",
    "syzygy",
    "syzygy_power",
    "is_projective",
    "is_injective",
    "injective_hull",
    "star",
    "star_map",
    "dualD",
    "dual_map",
    "nakayama",
    "nakayama_map",
    "transpose",
    "minimal_presentation",
    "minimal_resolution",
    "ext_dim",
    "ext1_classes",
    "strip_projectives",
    "reflexive",
    "torsionless",
    "stably_zero",
    "stable_hom_dim",
    "phom_dim",
    "projective_injectives",
    "indecomposable_projectives",
    "indecomposable_injectives",
]


def projective_cover(x: Module) -> tuple[Module, ModuleHom]:
    """Minimal projective cover P -> x with P a block sum of registered projectives."""
    if "cover" in x._cache:
        return x._cache["cover"]
    A, p = x.algebra, x.p
    registry(A)
    if x.dim == 0:
        z = zero_module(A)
        out = (z, ModuleHom(z, x, la.zeros(0, 0), check=False))
        x._cache["cover"] = out
        return out
    pres = x.presentation
    reps, rows = [], []
    for lo, hi, i in pres.blocks:
        rep, iso = A._cache["proj_rep"][i]
        reps.append(rep)
        rows.append(la.mul(la.inverse(iso, p), pres.cover[lo:hi], p))
    P = direct_sum(*reps)
    cov = np.vstack(rows)
    epi = ModuleHom(P, x, cov, check=False)
    ker = la.left_kernel(cov, p)
    if ker.shape[0] and P.radical_rows.shape[0] < P.dim:
        red = la.Reducer(P.radical_rows, p, P.dim)
        if np.any(red.reduce(ker)):
            raise ModuleError("projective cover is not minimal (kernel not superfluous)")
    x._cache["cover"] = (P, epi)
    return P, epi


def syzygy(x: Module) -> tuple[Module, ModuleHom, ModuleHom]:
    """(Omega x, inclusion Omega x -> P, cover P -> x)."""
    P, epi = projective_cover(x)
    ker = la.left_kernel(epi.matrix, x.p) if P.dim else la.zeros(0, 0)
    om, inc = submodule(P, ker) if P.dim else (zero_module(x.algebra), ModuleHom(zero_module(x.algebra), P, la.zeros(0, 0), check=False))
    return om, inc, epi


def syzygy_power(x: Module, n: int) -> Module:
    for _ in range(n):
        x = syzygy(x)[0]
    return x


def is_projective(x: Module) -> bool:
    return projective_cover(x)[0].dim == x.dim


def dualD(x: Module) -> Module:
    """D x = Hom_k(x, k), a module over the opposite algebra."""
    if "dualD" not in x._cache:
        op = opposite(x.algebra)
        d = Module(op, x.action.transpose(0, 2, 1), check=False)
        d._cache["dualD"] = x
        x._cache["dualD"] = d
    return x._cache["dualD"]


def dual_map(f: ModuleHom) -> ModuleHom:
    return ModuleHom(dualD(f.target), dualD(f.source), f.matrix.T.copy(), check=False)


def is_injective(x: Module) -> bool:
    return is_projective(dualD(x))


def injective_hull(x: Module) -> tuple[Module, ModuleHom]:
    """x -> I with I injective, computed as D of the cover of D x."""
    Q, q = projective_cover(dualD(x))
    I = dualD(Q)
    return I, ModuleHom(x, I, q.matrix.T.copy(), check=False)


def _star_data(x: Module):
    if "star" not in x._cache:
        A, p = x.algebra, x.p
        R = regular_module(A)
        H = hom_matrices(x, R)  # (k, n, d)
        k = H.shape[0]
        op = opposite(A)
        if k == 0:
            mod = zero_module(op)
        else:
            flat = H.reshape(k, -1)
            # (phi . b^op) = phi followed by left multiplication by b
            imgs = np.einsum("kna,bac->bknc", H, np.array([A.left_mult(e) for e in la.eye(A.dim)])) % p
            coords = la.solve_left(flat, imgs.reshape(-1, flat.shape[1]), p)
            if coords is None:
                raise ModuleError("Hom(x, A) is not closed under the left action")
            mod = Module(op, coords.reshape(A.dim, k, k), check=False)
        x._cache["star"] = (mod, H)
    return x._cache["star"]


def star(x: Module) -> Module:
    """x* = Hom_A(x, A_A) as a right module over A^op."""
    return _star_data(x)[0]


def star_basis(x: Module) -> np.ndarray:
    return _star_data(x)[1]


def star_map(f: ModuleHom) -> ModuleHom:
    """f*: Y* -> X*, phi |-> f phi."""
    p = f.p
    Ys, Hy = _star_data(f.target)
    Xs, Hx = _star_data(f.source)
    if Hy.shape[0] == 0 or Hx.shape[0] == 0:
        return ModuleHom(Ys, Xs, la.zeros(Ys.dim, Xs.dim), check=False)
    imgs = la.bmul(f.matrix, Hy, p)
    coords = la.solve_left(Hx.reshape(Hx.shape[0], -1), imgs.reshape(imgs.shape[0], -1), p)
    return ModuleHom(Ys, Xs, coords, check=False)


def nakayama(x: Module) -> Module:
    """nu x = D Hom_A(x, A)."""
    return dualD(star(x))


def nakayama_map(f: ModuleHom) -> ModuleHom:
    return dual_map(star_map(f))


def minimal_presentation(x: Module) -> tuple[ModuleHom, ModuleHom]:
    """(d: P1 -> P0, cover: P0 -> x) from minimal covers."""
    om, inc, epi = syzygy(x)
    P1, epi1 = projective_cover(om)
    d = ModuleHom(P1, epi.source, la.mul(epi1.matrix, inc.matrix, x.p), check=False)
    return d, epi


def minimal_resolution(x: Module, length: int) -> list[ModuleHom]:
    """Differentials d_1, ..., d_length with d_k: P_k -> P_{k-1}, plus the cover.

    Returns [cover P_0 -> x, d_1: P_1 -> P_0, ...].
    """
    om, inc, epi = syzygy(x)
    out = [epi]
    for _ in range(length):
        om2, inc2, epi2 = syzygy(om)
        out.append(ModuleHom(epi2.source, inc.target, la.mul(epi2.matrix, inc.matrix, x.p), check=False))
        om, inc = om2, inc2
    return out


def transpose(x: Module) -> Module:
    """Tr x = Cok(P0* -> P1*) over the opposite algebra."""
    if "transpose" in x._cache:
        return x._cache["transpose"]
    d, _ = minimal_presentation(x)
    ds = star_map(d)  # P0* -> P1*
    if ds.target.dim == 0:
        tr = zero_module(opposite(x.algebra))
    else:
        tr, _ = quotient(ds.target, ds.matrix)
    x._cache["transpose"] = tr
    return tr


def strip_projectives(x: Module) -> Module:
    dec = decompose(x)
    keep = [b for b in dec.blocks if not is_projective(b)]
    return direct_sum(*keep) if keep else zero_module(x.algebra)


def ext_dim(x: Module, y: Module, i: int = 1) -> int:
    """dim Ext^i(x, y) via the minimal projective resolution of x."""
    if i < 1:
        raise ValueError("ext degree must be >= 1")
    k = syzygy_power(x, i - 1)
    om, _, epi = syzygy(k)
    return len(hom_matrices(om, y)) - len(hom_matrices(epi.source, y)) + len(hom_matrices(k, y))


def _ext1_setup(z: Module, x: Module):
    p = z.p
    om, inc, epi = syzygy(z)
    H = hom_matrices(om, x)  # classes live here
    Hp = hom_matrices(epi.source, x)
    n = om.dim * x.dim
    bnd = (la.bmul(inc.matrix, Hp, p)).reshape(-1, n) if Hp.shape[0] and n else la.zeros(0, n)
    red = la.Reducer(bnd, p, n)
    return om, inc, epi, H, red


def ext1_basis(z: Module, x: Module) -> tuple[np.ndarray, tuple]:
    """Representatives phi: Omega z -> x of a basis of Ext^1(z, x)."""
    om, inc, epi, H, red = _ext1_setup(z, x)
    if H.shape[0] == 0:
        return H, (om, inc, epi, red)
    flat = red.reduce(H.reshape(H.shape[0], -1))
    idx = la.independent_rows(flat, z.p)
    return H[idx], (om, inc, epi, red)


def realize_extension(phi: np.ndarray, om: Module, inc: ModuleHom, epi: ModuleHom, x: Module) -> ShortExactSeq:
    """Pushout of 0 -> Omega -> P -> z -> 0 along phi: Omega -> x."""
    p = x.p
    P = inc.target
    mid = direct_sum(x, P)
    rel = np.hstack([phi % p, (-inc.matrix) % p])
    E, pr = quotient(mid, rel)
    f_full = np.hstack([la.eye(x.dim), la.zeros(x.dim, P.dim)])
    f = ModuleHom(x, E, la.mul(f_full, pr.matrix, p), check=False)
    g_full = np.vstack([la.zeros(x.dim, epi.target.dim), epi.matrix])
    g = ModuleHom(E, epi.target, la.mul(pr.section, g_full, p), check=False)
    return ShortExactSeq(f, g)


def ext1_classes(z: Module, x: Module) -> list[ShortExactSeq]:
    """A basis of Ext^1(z, x), each class realized as 0 -> x -> E -> z -> 0."""
    basis, (om, inc, epi, _) = ext1_basis(z, x)
    return [realize_extension(phi, om, inc, epi, x) for phi in basis]


def torsionless(x: Module) -> bool:
    """x -> x** injective, i.e. the Hom(x, A) maps separate points."""
    H = hom_matrices(x, regular_module(x.algebra))
    if x.dim == 0:
        return True
    if H.shape[0] == 0:
        return False
    return la.rank(np.hstack(list(H)), x.p) == x.dim


def reflexive(x: Module) -> bool:
    """x -> x** is an isomorphism."""
    if not torsionless(x):
        return False
    return star(star(x)).dim == x.dim


def phom_dim(x: Module, y: Module) -> int:
    """dim of maps x -> y factoring through a projective."""
    p = x.p
    H = hom_matrices(x, y)
    if H.shape[0] == 0:
        return 0
    P, epi = projective_cover(y)
    Hp = hom_matrices(x, P)
    if Hp.shape[0] == 0:
        return 0
    imgs = la.bmul(Hp, epi.matrix, p)
    return la.rank(imgs.reshape(imgs.shape[0], -1), p)


def stable_hom_dim(x: Module, y: Module) -> int:
    return len(hom_matrices(x, y)) - phom_dim(x, y)


def stably_zero(f: ModuleHom) -> bool:
    """f factors through the projective cover of its target."""
    p = f.p
    if f.is_zero():
        return True
    P, epi = projective_cover(f.target)
    x = f.source
    # solve blockwise over the summands of x when x is a block module
    if x.summands is not None and len(x.summands) > 1:
        o = 0
        for s in x.summands:
            sub = f.matrix[o : o + s.dim]
            o += s.dim
            if np.any(sub) and not _lifts(s, sub, P, epi, p):
                return False
        return True
    return _lifts(x, f.matrix, P, epi, p)


def _lifts(x: Module, m: np.ndarray, P: Module, epi: ModuleHom, p: int) -> bool:
    Hp = hom_matrices(x, P)
    if Hp.shape[0] == 0:
        return not np.any(m)
    imgs = la.bmul(Hp, epi.matrix, p)
    return la.solve_left(imgs.reshape(imgs.shape[0], -1), m.reshape(1, -1), p) is not None


def indecomposable_projectives(A: Algebra) -> list[Module]:
    registry(A)
    out = []
    for i in range(A.n_vertices):
        rep = A._cache["proj_rep"][i][0]
        if all(rep is not r for r in out):
            out.append(rep)
    return out


def indecomposable_injectives(A: Algebra) -> list[Module]:
    out = []
    for q in indecomposable_projectives(opposite(A)):
        I = dualD(q)
        rep = decompose(I).blocks[0]
        if all(rep is not r for r in out):
            out.append(rep)
    return out


def projective_injectives(A: Algebra) -> list[Module]:
    return [P for P in indecomposable_projectives(A) if is_injective(P)]
