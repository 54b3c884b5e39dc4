"""Short exact sequences and perfect exact sequences.

A sequence ``0 -> X -f-> Y -g-> Z -> 0`` is stored by its two maps.  Exactness
is certified by three rank identities rather than trusted from constructors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .modules import (
    Module,
    ModuleError,
    ModuleHom,
    direct_sum,
    hom_matrices,
    regular_module,
    same_module,
    zero_module,
)

__all__ = [
    "ShortExactSeq",
    "SequenceError",
    "is_perfect",
    "dual_sequence_exact",
    "merge_left",
    "merge_right",
    "splice_snake_1",
    "splice_snake_2",
    "direct_sum_sequences",
    "remove_split_summands",
    "SplitRemoval",
    "canonical_sequence",
    "ext1_vanishing_equiv",
]


class SequenceError(ValueError):
    """Shape or exactness violation."""


class ShortExactSeq:
    """0 -> X -f-> Y -g-> Z -> 0 with exactness certified on construction."""

    def __init__(self, f: ModuleHom, g: ModuleHom, *, check: bool = True):
        if not same_module(f.target, g.source):
            raise SequenceError("f and g are not composable")
        self.f = f
        self.g = g
        if check:
            self.certify()

    @property
    def X(self) -> Module:
        return self.f.source

    @property
    def Y(self) -> Module:
        return self.f.target

    @property
    def Z(self) -> Module:
        return self.g.target

    @property
    def p(self) -> int:
        return self.f.p

    @property
    def algebra(self):
        return self.X.algebra

    def certify(self) -> dict:
        p = self.p
        rf = la.rank(self.f.matrix, p)
        rg = la.rank(self.g.matrix, p)
        fg = la.mul(self.f.matrix, self.g.matrix, p)
        cert = {
            "rank_f": rf,
            "rank_g": rg,
            "dims": [self.X.dim, self.Y.dim, self.Z.dim],
            "fg_zero": not np.any(fg),
        }
        if rf != self.X.dim:
            raise SequenceError(f"f is not injective (rank {rf} < {self.X.dim})")
        if rg != self.Z.dim:
            raise SequenceError(f"g is not surjective (rank {rg} < {self.Z.dim})")
        if np.any(fg):
            raise SequenceError("fg != 0")
        if self.X.dim + self.Z.dim != self.Y.dim:
            raise SequenceError("dim Y != dim X + dim Z")
        return cert

    def dims(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return self.X.dim_vector, self.Y.dim_vector, self.Z.dim_vector

    def is_zero(self) -> bool:
        return self.Y.dim == 0

    def __repr__(self) -> str:
        return f"<SES {self.X.dim_vector} -> {self.Y.dim_vector} -> {self.Z.dim_vector}>"


def direct_sum_sequences(*seqs: ShortExactSeq) -> ShortExactSeq:
    from .modules import direct_sum_maps

    return ShortExactSeq(direct_sum_maps(*[s.f for s in seqs]), direct_sum_maps(*[s.g for s in seqs]))


def _hom_to_A_rank(f: ModuleHom) -> tuple[int, int]:
    """(rank of Hom(f, A), dim Hom(source, A))."""
    A = f.source.algebra
    R = regular_module(A)
    Hy = hom_matrices(f.target, R)
    Hx = hom_matrices(f.source, R)
    p = f.p
    if Hx.shape[0] == 0:
        return 0, 0
    if Hy.shape[0] == 0:
        return 0, Hx.shape[0]
    imgs = la.bmul(f.matrix, Hy, p)
    return la.rank(imgs.reshape(imgs.shape[0], -1), p), Hx.shape[0]


def is_perfect(s: ShortExactSeq) -> bool:
    """True iff Hom(f, A): Hom(Y, A) -> Hom(X, A) is surjective."""
    r, d = _hom_to_A_rank(s.f)
    return r == d


def dual_sequence_exact(s: ShortExactSeq) -> bool:
    """Exactness of 0 -> Z* -> Y* -> X* -> 0 by rank bookkeeping."""
    R = regular_module(s.algebra)
    dz = hom_matrices(s.Z, R).shape[0]
    dy = hom_matrices(s.Y, R).shape[0]
    dx = hom_matrices(s.X, R).shape[0]
    r, _ = _hom_to_A_rank(s.f)
    # left exactness always holds; exact on the right iff dim Y* = dim Z* + dim X*
    return r == dx and dy == dz + dx


def _hstack(*ms):
    return np.hstack(ms) if ms else None


def merge_left(s: ShortExactSeq, t: ShortExactSeq, alpha: ModuleHom, beta: np.ndarray | None = None) -> ShortExactSeq:
    """Pushout merge.

    s: 0 -> X -f-> Y -g-> Z -> 0, t: 0 -> X -u-> U -v-> V -> 0 and
    alpha: U -> Y with f = u alpha.  Returns
    0 -> U -(alpha, v)-> Y (+) V -(g; beta)-> Z -> 0 where v beta = -alpha g.
    """
    p = s.p
    if not same_module(s.X, t.X) or not same_module(alpha.source, t.Y) or not same_module(alpha.target, s.Y):
        raise SequenceError("merge_left: incompatible shapes")
    if not np.array_equal(la.mul(t.f.matrix, alpha.matrix, p), s.f.matrix):
        raise SequenceError("merge_left: f != u alpha")
    rhs = (-la.mul(alpha.matrix, s.g.matrix, p)) % p
    if beta is None:
        beta = la.solve(t.g.matrix, rhs, p)
        if beta is None:
            raise SequenceError("merge_left: no beta with v beta = -alpha g")
    elif not np.array_equal(la.mul(t.g.matrix, beta, p), rhs):
        raise SequenceError("merge_left: supplied beta violates v beta = -alpha g")
    mid = direct_sum(s.Y, t.Z)
    first = ModuleHom(t.Y, mid, np.hstack([alpha.matrix, t.g.matrix]), check=False)
    second = ModuleHom(mid, s.Z, np.vstack([s.g.matrix, beta]), check=False)
    return ShortExactSeq(first, second)


def merge_right(s: ShortExactSeq, t: ShortExactSeq, alpha: ModuleHom) -> ShortExactSeq:
    """Pullback merge.

    s: 0 -> X -f-> Y -g-> Z -> 0, t: 0 -> U -u-> V -v-> Z -> 0 and
    alpha: Y -> V with g = alpha v.  Returns
    0 -> X -(beta, f)-> U (+) Y -(u; alpha)-> V -> 0 where beta u = -f alpha.
    """
    p = s.p
    if not same_module(s.Z, t.Z) or not same_module(alpha.source, s.Y) or not same_module(alpha.target, t.Y):
        raise SequenceError("merge_right: incompatible shapes")
    if not np.array_equal(la.mul(alpha.matrix, t.g.matrix, p), s.g.matrix):
        raise SequenceError("merge_right: g != alpha v")
    rhs = (-la.mul(s.f.matrix, alpha.matrix, p)) % p
    beta = la.solve_left(t.f.matrix, rhs, p)
    if beta is None:
        raise SequenceError("merge_right: no beta with beta u = -f alpha")
    mid = direct_sum(t.X, s.Y)
    first = ModuleHom(s.X, mid, np.hstack([beta, s.f.matrix]), check=True)
    second = ModuleHom(mid, t.Y, np.vstack([t.f.matrix, alpha.matrix]), check=False)
    return ShortExactSeq(first, second)


def _check_sum(mid: Module, first: Module, second: Module) -> None:
    """mid must literally be first (+) second."""
    n1 = first.dim
    if mid.dim != n1 + second.dim:
        raise SequenceError("middle term has the wrong dimension")
    a = mid.action
    if (
        np.any(a[:, :n1, n1:])
        or np.any(a[:, n1:, :n1])
        or not np.array_equal(a[:, :n1, :n1], first.action)
        or not np.array_equal(a[:, n1:, n1:], second.action)
    ):
        raise SequenceError("middle term is not the expected direct sum")


def _block_module(mid: Module, lo: int, hi: int) -> Module:
    from .modules import Module as M

    sub = mid.action[:, lo:hi, lo:hi]
    if mid.summands is not None:
        offs, o = [], 0
        pieces = []
        for sm in mid.summands:
            if o >= lo and o + sm.dim <= hi:
                pieces.append(sm)
            o += sm.dim
        if sum(x.dim for x in pieces) == hi - lo:
            return direct_sum(*pieces) if pieces else zero_module(mid.algebra)
    return M(mid.algebra, sub, check=False)


def splice_snake_1(s1: ShortExactSeq, s2: ShortExactSeq) -> ShortExactSeq:
    """s1: 0 -> X -(s, iota)-> U (+) P -(t; pi)-> V -> 0 and
    s2: 0 -> U -(v, t)-> Y (+) V -(g; w)-> Z -> 0 give
    0 -> X -(s v, iota)-> Y (+) P -(g; -pi w)-> Z -> 0.
    """
    p = s1.p
    U = s2.X
    V = s1.Z
    nu = U.dim
    nv = V.dim
    ny = s2.Y.dim - nv
    if ny < 0 or s1.Y.dim < nu:
        raise SequenceError("splice_snake_1: shape mismatch")
    Ublock = _block_module(s1.Y, 0, nu)
    _check_sum(s1.Y, U, _block_module(s1.Y, nu, s1.Y.dim))
    _check_sum(s2.Y, _block_module(s2.Y, 0, ny), V)
    if not same_module(Ublock, U):
        raise SequenceError("splice_snake_1: U differs")
    sm = s1.f.matrix[:, :nu]
    iota = s1.f.matrix[:, nu:]
    t1 = s1.g.matrix[:nu]
    pi = s1.g.matrix[nu:]
    v = s2.f.matrix[:, :ny]
    t2 = s2.f.matrix[:, ny:]
    g = s2.g.matrix[:ny]
    w = s2.g.matrix[ny:]
    if not np.array_equal(t1, t2):
        raise SequenceError("splice_snake_1: the shared map t differs")
    Y = _block_module(s2.Y, 0, ny)
    P = _block_module(s1.Y, nu, s1.Y.dim)
    mid = direct_sum(Y, P)
    first = ModuleHom(s1.X, mid, np.hstack([la.mul(sm, v, p), iota]), check=False)
    second = ModuleHom(mid, s2.Z, np.vstack([g, (-la.mul(pi, w, p)) % p]), check=False)
    return ShortExactSeq(first, second)


def splice_snake_2(s1: ShortExactSeq, s2: ShortExactSeq) -> ShortExactSeq:
    """s1: 0 -> U -(s, iota)-> V (+) P -(t; pi)-> Z -> 0 and
    s2: 0 -> X -(f, v)-> Y (+) U -(w; s)-> V -> 0 give
    0 -> X -(f, -v iota)-> Y (+) P -(w t; pi)-> Z -> 0.
    """
    p = s1.p
    U = s1.X
    V = s2.Z
    nu, nv = U.dim, V.dim
    ny = s2.Y.dim - nu
    if ny < 0 or s1.Y.dim < nv:
        raise SequenceError("splice_snake_2: shape mismatch")
    _check_sum(s1.Y, V, _block_module(s1.Y, nv, s1.Y.dim))
    _check_sum(s2.Y, _block_module(s2.Y, 0, ny), U)
    s_a = s1.f.matrix[:, :nv]
    iota = s1.f.matrix[:, nv:]
    t = s1.g.matrix[:nv]
    pi = s1.g.matrix[nv:]
    f = s2.f.matrix[:, :ny]
    v = s2.f.matrix[:, ny:]
    w = s2.g.matrix[:ny]
    s_b = s2.g.matrix[ny:]
    if not np.array_equal(s_a, s_b):
        raise SequenceError("splice_snake_2: the shared map s differs")
    Y = _block_module(s2.Y, 0, ny)
    P = _block_module(s1.Y, nv, s1.Y.dim)
    mid = direct_sum(Y, P)
    first = ModuleHom(s2.X, mid, np.hstack([f, (-la.mul(v, iota, p)) % p]), check=False)
    second = ModuleHom(mid, s1.Z, np.vstack([la.mul(w, t, p), pi]), check=False)
    return ShortExactSeq(first, second)


# --- split summands ------------------------------------------------------------


@dataclass
class SplitRemoval:
    """Result of :func:`remove_split_summands`.

    ``projections`` are the components (X, Y, Z) of a morphism from the input
    sequence onto ``seq``; ``witness`` holds the full isomorphisms onto
    ``seq (+) split part`` before deleting the split blocks.
    """

    seq: ShortExactSeq
    projections: tuple[ModuleHom, ModuleHom, ModuleHom]
    witness: tuple[np.ndarray, np.ndarray, np.ndarray] = field(repr=False)
    removed_left: list = field(default_factory=list)
    removed_right: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.seq, self.projections))


def canonical_sequence(s: ShortExactSeq) -> tuple[ShortExactSeq, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Isomorphic sequence with all three terms in canonical block form."""
    from .decompose import decompose

    p = s.p
    dx, dy, dz = decompose(s.X), decompose(s.Y), decompose(s.Z)
    f = la.mul(la.mul(dx.iso_inv, s.f.matrix, p), dy.iso, p)
    g = la.mul(la.mul(dy.iso_inv, s.g.matrix, p), dz.iso, p)
    out = ShortExactSeq(
        ModuleHom(dx.canonical, dy.canonical, f, check=False),
        ModuleHom(dy.canonical, dz.canonical, g, check=False),
        check=False,
    )
    return out, (dx.iso, dy.iso, dz.iso)


def _ranges(blocks) -> list[np.ndarray]:
    out, o = [], 0
    for b in blocks:
        out.append(np.arange(o, o + b.dim))
        o += b.dim
    return out


def _unit_block(m: np.ndarray, p: int) -> np.ndarray | None:
    if m.shape[0] != m.shape[1] or m.shape[0] == 0:
        return None
    try:
        return la.inverse(m, p)
    except ZeroDivisionError:
        return None


def remove_split_summands(s: ShortExactSeq) -> SplitRemoval:
    """Peel off split summands W -id-> W -> 0 and 0 -> W -id-> W by block
    elimination over the indecomposable summands.

    A summand X_a of X splits off iff some component X_a -> Y_b is an
    isomorphism (End X_a is local); dually for Z.
    """
    from .decompose import decompose

    p = s.p
    cs, (ix, iy, iz) = canonical_sequence(s)
    xb, yb, zb = decompose(cs.X).blocks, decompose(cs.Y).blocks, decompose(cs.Z).blocks
    xr, yr, zr = _ranges(xb), _ranges(yb), _ranges(zb)
    F, G = cs.f.matrix.copy(), cs.g.matrix.copy()
    aX, aY, aZ = ix.copy(), iy.copy(), iz.copy()
    ax, ay, az = set(range(len(xb))), set(range(len(yb))), set(range(len(zb)))
    left, right = [], []

    def alive_idx(ranges, alive, skip):
        idx = [ranges[i] for i in sorted(alive) if i != skip]
        return np.concatenate(idx) if idx else np.zeros(0, dtype=np.int64)

    changed = True
    while changed:
        changed = False
        for a in sorted(ax):
            for b in sorted(ay):
                if yb[b] is not xb[a]:
                    continue
                ui = _unit_block(F[np.ix_(xr[a], yr[b])], p)
                if ui is None:
                    continue
                Xa, Yb = xr[a], yr[b]
                cols = alive_idx(yr, ay, b)
                if cols.size:
                    N = la.mul(ui, F[np.ix_(Xa, cols)], p)
                    F[:, cols] = (F[:, cols] - la.mul(F[:, Yb], N, p)) % p
                    aY[:, cols] = (aY[:, cols] - la.mul(aY[:, Yb], N, p)) % p
                    G[Yb, :] = (G[Yb, :] + la.mul(N, G[cols, :], p)) % p
                rows = alive_idx(xr, ax, a)
                if rows.size:
                    M = la.mul(F[np.ix_(rows, Yb)], ui, p)
                    F[rows, :] = (F[rows, :] - la.mul(M, F[Xa, :], p)) % p
                    aX[:, Xa] = (aX[:, Xa] + la.mul(aX[:, rows], M, p)) % p
                ax.discard(a)
                ay.discard(b)
                left.append(xb[a])
                changed = True
                break
            if changed:
                break
        if changed:
            continue
        for b in sorted(ay):
            for z in sorted(az):
                if zb[z] is not yb[b]:
                    continue
                ui = _unit_block(G[np.ix_(yr[b], zr[z])], p)
                if ui is None:
                    continue
                Yb, Zz = yr[b], zr[z]
                cols = alive_idx(zr, az, z)
                if cols.size:
                    N = la.mul(ui, G[np.ix_(Yb, cols)], p)
                    G[:, cols] = (G[:, cols] - la.mul(G[:, Zz], N, p)) % p
                    aZ[:, cols] = (aZ[:, cols] - la.mul(aZ[:, Zz], N, p)) % p
                rows = alive_idx(yr, ay, b)
                if rows.size:
                    M = la.mul(G[np.ix_(rows, Zz)], ui, p)
                    G[rows, :] = (G[rows, :] - la.mul(M, G[Yb, :], p)) % p
                    F[:, Yb] = (F[:, Yb] + la.mul(F[:, rows], M, p)) % p
                    aY[:, Yb] = (aY[:, Yb] + la.mul(aY[:, rows], M, p)) % p
                ay.discard(b)
                az.discard(z)
                right.append(zb[z])
                changed = True
                break
            if changed:
                break

    A = s.algebra
    kx, ky, kz = alive_idx(xr, ax, -1), alive_idx(yr, ay, -1), alive_idx(zr, az, -1)

    def build(blocks, alive):
        mods = [blocks[i] for i in sorted(alive)]
        return direct_sum(*mods) if mods else zero_module(A)

    X2, Y2, Z2 = build(xb, ax), build(yb, ay), build(zb, az)
    f2 = ModuleHom(X2, Y2, F[np.ix_(kx, ky)], check=False)
    g2 = ModuleHom(Y2, Z2, G[np.ix_(ky, kz)], check=False)
    out = ShortExactSeq(f2, g2)
    proj = (
        ModuleHom(s.X, X2, aX[:, kx], check=False),
        ModuleHom(s.Y, Y2, aY[:, ky], check=False),
        ModuleHom(s.Z, Z2, aZ[:, kz], check=False),
    )
    return SplitRemoval(out, proj, (aX, aY, aZ), left, right)


def ext1_vanishing_equiv(z: Module) -> dict:
    """Three checks that agree exactly when Ext^1(z, A) = 0.

    ``ext1_zero``: Ext^1(z, A) vanishes.  ``cover_perfect``: the cover sequence
    0 -> Omega z -> P -> z -> 0 is perfect.  ``all_extensions_perfect``: every
    basis class of Ext^1(z, A), realized as 0 -> A -> E -> z -> 0, is perfect.
    """
    from .homological import ext1_classes, ext_dim, syzygy

    A = z.algebra
    R = regular_module(A)
    ext0 = ext_dim(z, R, 1) == 0
    om, inc, epi = syzygy(z)
    cover = ShortExactSeq(inc, epi)
    cover_ok = is_perfect(cover)
    all_ok = all(is_perfect(e) for e in ext1_classes(z, R))
    out = {
        "ext1_zero": ext0,
        "cover_perfect": cover_ok,
        "all_extensions_perfect": all_ok,
    }
    out["equivalent"] = len({ext0, cover_ok, all_ok}) == 1
    return out
