"""Auslander-Reiten theory: translates, almost split sequences, knitting,
radical powers, depth and nodes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .algebra import Algebra, opposite
from .decompose import (
    block_offsets,
    decompose,
    end_radical,
    is_indecomposable,
    local_radical,
    registry,
)
from .homological import (
    _ext1_setup,
    dualD,
    indecomposable_injectives,
    indecomposable_projectives,
    is_injective,
    is_projective,
    realize_extension,
    stably_zero,
    transpose,
)
from .modules import (
    Module,
    ModuleError,
    ModuleHom,
    _block_diag,
    direct_sum,
    hom_matrices,
    zero_module,
)
from .sequences import ShortExactSeq, is_perfect

__all__ = [
    "ARError",
    "ARSequence",
    "ARQuiver",
    "tau",
    "tau_inv",
    "almost_split_starting",
    "sum_almost_split",
    "knit",
    "rad_basis",
    "rad_power",
    "depth",
    "Depth",
    "is_node",
    "nodes",
    "is_simple",
]


class ARError(ValueError):
    """Invalid input for an AR construction."""


def _strip(x: Module, keep) -> Module:
    dec = decompose(x)
    blocks = [b for b in dec.blocks if keep(b)]
    return direct_sum(*blocks) if blocks else zero_module(x.algebra)


def tau(x: Module) -> Module:
    """tau x = D Tr x, projective summands of x stripped first."""
    y = _strip(x, lambda b: not is_projective(b))
    if y.dim == 0:
        return zero_module(x.algebra)
    return dualD(transpose(y))


def tau_inv(x: Module) -> Module:
    """tau^-1 x = Tr D x, injective summands of x stripped first."""
    y = _strip(x, lambda b: not is_injective(b))
    if y.dim == 0:
        return zero_module(x.algebra)
    return transpose(dualD(y))


@dataclass
class ARSequence:
    """An almost split sequence 0 -> X -> E -> tau^-1 X -> 0.

    ``start`` and ``end`` are registry representatives; ``seq.Y`` is in
    canonical block form.
    """

    seq: ShortExactSeq
    start: Module
    end: Module

    @property
    def middle(self) -> Module:
        return self.seq.Y


def _ar_for_rep(w: Module) -> ARSequence:
    A = w.algebra
    cache = A._cache.setdefault("ar", {})
    if w.canon_id in cache:
        return cache[w.canon_id]
    p = w.p
    if is_injective(w):
        raise ARError("no almost split sequence starts at an injective module")
    z = tau_inv(w)
    zdec = decompose(z)
    if len(zdec.blocks) != 1:
        raise ARError("tau^-1 of an indecomposable is not indecomposable")
    zr = zdec.blocks[0]
    om, inc, epi, H, red = _ext1_setup(zr, w)
    n = om.dim * w.dim
    if H.shape[0] == 0:
        raise ARError("Ext^1(tau^-1 X, X) vanishes")
    flat = H.reshape(H.shape[0], n)
    conds = []
    P = epi.source
    HP = hom_matrices(P, P)
    lifts = (la.bmul(HP, epi.matrix, p)).reshape(HP.shape[0], -1)
    for r in end_radical(zr):
        target = la.mul(epi.matrix, r, p).reshape(1, -1)
        c = la.solve_left(lifts, target, p)
        if c is None:
            raise ARError("radical endomorphism does not lift to the cover")
        h = np.tensordot(c.ravel(), HP, axes=(0, 0)) % p
        r_om = la.solve_left(inc.matrix, la.mul(inc.matrix, h, p), p)
        pulled = la.bmul(r_om, H, p)
        conds.append(red.reduce(pulled.reshape(H.shape[0], n)))
    if conds:
        sol = la.left_kernel(np.hstack(conds), p)
    else:
        sol = la.eye(H.shape[0])
    chosen = None
    for c in sol:
        phi = np.tensordot(c, H, axes=(0, 0)) % p
        if np.any(red.reduce(phi.reshape(1, -1))):
            chosen = phi
            break
    if chosen is None:
        raise ARError("socle of Ext^1(tau^-1 X, X) is zero")
    raw = realize_extension(chosen, om, inc, epi, w)
    edec = decompose(raw.Y)
    f = ModuleHom(w, edec.canonical, la.mul(raw.f.matrix, edec.iso, p), check=False)
    g = ModuleHom(edec.canonical, zr, la.mul(edec.iso_inv, raw.g.matrix, p), check=False)
    ars = ARSequence(ShortExactSeq(f, g), w, zr)
    cache[w.canon_id] = ars
    return ars


def almost_split_starting(x: Module) -> ARSequence:
    """The almost split sequence starting at the indecomposable x."""
    dec = decompose(x)
    if len(dec.blocks) != 1:
        raise ARError("almost_split_starting needs an indecomposable module")
    rep = dec.blocks[0]
    ars = _ar_for_rep(rep)
    if x is rep:
        return ars
    f = ModuleHom(x, ars.middle, la.mul(dec.iso, ars.seq.f.matrix, x.p), check=False)
    return ARSequence(ShortExactSeq(f, ars.seq.g), x, ars.end)


def sum_almost_split(x: Module) -> ShortExactSeq:
    """Direct sum of the almost split sequences starting at the summands of x."""
    dec = decompose(x)
    if x.dim == 0:
        z = zero_module(x.algebra)
        return ShortExactSeq(ModuleHom(x, z, la.zeros(0, 0), check=False), ModuleHom(z, z, la.zeros(0, 0), check=False))
    seqs = []
    for b in dec.blocks:
        if is_injective(b):
            raise ARError(f"injective summand {b.dim_vector} has no almost split sequence")
        seqs.append(_ar_for_rep(b).seq)
    E = direct_sum(*[s.Y for s in seqs])
    T = direct_sum(*[s.Z for s in seqs])
    fm = la.mul(dec.iso, _block_diag([s.f.matrix for s in seqs]), x.p)
    gm = _block_diag([s.g.matrix for s in seqs])
    return ShortExactSeq(ModuleHom(x, E, fm, check=False), ModuleHom(E, T, gm, check=False))


# --- knitting ------------------------------------------------------------------


@dataclass
class ARQuiver:
    algebra: Algebra
    vertices: list[Module]
    tau_inv: dict[int, int]
    arrows: dict[tuple[int, int], int]
    complete: bool
    bound: int
    projective: dict[int, bool] = field(default_factory=dict)
    injective: dict[int, bool] = field(default_factory=dict)

    def index(self, m: Module) -> int:
        for i, v in enumerate(self.vertices):
            if v is m:
                return i
        raise KeyError("module not in the AR quiver")

    def to_json(self) -> dict:
        ids = {v.canon_id: i for i, v in enumerate(self.vertices)}
        return {
            "complete": self.complete,
            "bound": self.bound,
            "vertices": [
                {
                    "id": i,
                    "dim_vector": list(v.dim_vector),
                    "projective": self.projective[v.canon_id],
                    "injective": self.injective[v.canon_id],
                }
                for i, v in enumerate(self.vertices)
            ],
            "tau_inv": [[ids[a], ids[b]] for a, b in sorted(self.tau_inv.items()) if a in ids and b in ids],
            "arrows": [
                [ids[a], ids[b], m] for (a, b), m in sorted(self.arrows.items()) if a in ids and b in ids
            ],
        }


def knit(A: Algebra, bound: int = 20) -> ARQuiver:
    """Knit the AR quiver from projectives (tau^-1) and injectives (tau).

    Complete when the explored set is closed under tau, tau^-1 and AR middle
    summands within ``bound`` expansion rounds.
    """
    key = ("knit", bound)
    if key in A._cache:
        return A._cache[key]
    registry(A)
    seen: dict[int, Module] = {}
    level: dict[int, int] = {}
    queue: deque = deque()
    tau_inv_map: dict[int, int] = {}
    arrows: dict[tuple[int, int], int] = {}
    proj: dict[int, bool] = {}
    inj: dict[int, bool] = {}
    complete = True

    def add(m: Module, lev: int) -> None:
        nonlocal complete
        if m.canon_id in seen:
            return
        if lev > bound:
            complete = False
            return
        seen[m.canon_id] = m
        level[m.canon_id] = lev
        queue.append(m)

    from .modules import simple_module

    seeds = indecomposable_projectives(A) + indecomposable_injectives(A)
    seeds += [decompose(simple_module(A, i)).blocks[0] for i in range(A.n_vertices)]
    for m in seeds:
        add(m, 0)
    while queue:
        m = queue.popleft()
        lev = level[m.canon_id]
        proj[m.canon_id] = is_projective(m)
        inj[m.canon_id] = is_injective(m)
        if not inj[m.canon_id]:
            ars = _ar_for_rep(m)
            tau_inv_map[m.canon_id] = ars.end.canon_id
            for b, mult in decompose(ars.middle).summands:
                arrows[(m.canon_id, b.canon_id)] = mult
                arrows[(b.canon_id, ars.end.canon_id)] = mult
                add(b, lev + 1)
            add(ars.end, lev + 1)
        if not proj[m.canon_id]:
            t = decompose(tau(m)).blocks[0]
            add(t, lev + 1)
    verts = sorted(seen.values(), key=lambda v: v.canon_id)
    for v in verts:
        proj.setdefault(v.canon_id, is_projective(v))
        inj.setdefault(v.canon_id, is_injective(v))
    q = ARQuiver(A, verts, tau_inv_map, arrows, complete, bound, proj, inj)
    A._cache[key] = q
    return q


# --- radical powers and depth ---------------------------------------------------


def rad_basis(u: Module, v: Module) -> np.ndarray:
    """Basis of rad(u, v) for registered indecomposables u, v."""
    if u is v:
        return end_radical(u)
    return hom_matrices(u, v)


def _rad_power_indec(u: Module, v: Module, n: int, quiver: ARQuiver) -> np.ndarray:
    A = u.algebra
    cache = A._cache.setdefault(("cat_radpow", quiver.bound), {})
    key = (u.canon_id, v.canon_id, n)
    if key in cache:
        return cache[key]
    p = u.p
    if n == 0:
        out = hom_matrices(u, v)
    elif n == 1:
        out = rad_basis(u, v)
    else:
        prods = []
        for z in quiver.vertices:
            r1 = rad_basis(u, z)
            if r1.shape[0] == 0:
                continue
            rn = _rad_power_indec(z, v, n - 1, quiver)
            if rn.shape[0] == 0:
                continue
            prods.append((la.bmul(r1[:, None], rn[None], p)).reshape(-1, u.dim * v.dim))
        if prods:
            out = la.row_basis(np.vstack(prods), p).reshape(-1, u.dim, v.dim)
        else:
            out = np.zeros((0, u.dim, v.dim), dtype=np.int64)
    cache[key] = out
    return out


def rad_power(x: Module, y: Module, n: int, bound: int = 20) -> list[ModuleHom]:
    """Basis of rad^n(x, y), computed through decompositions."""
    q = knit(x.algebra, bound)
    dx, dy = decompose(x), decompose(y)
    p = x.p
    mats = []
    xo, yo = dx.offsets(), dy.offsets()
    for a, u in enumerate(dx.blocks):
        for b, v in enumerate(dy.blocks):
            for h in _rad_power_indec(u, v, n, q):
                m = np.zeros((dx.canonical.dim, dy.canonical.dim), dtype=np.int64)
                m[xo[a] : xo[a] + u.dim, yo[b] : yo[b] + v.dim] = h
                mats.append(la.mul(la.mul(dx.iso, m, p), dy.iso_inv, p))
    return [ModuleHom(x, y, m, check=False) for m in mats]


@dataclass(frozen=True)
class Depth:
    """Depth of a morphism: ``value`` or exceeded (depth >= bound).

    ``certified`` is False when knitting was incomplete, in which case a finite
    value is only a lower bound on the true depth.
    """

    value: int | None
    exceeded: bool
    certified: bool
    bound: int

    def to_json(self):
        return {"depth": "exceeded" if self.exceeded else self.value, "certified": self.certified, "bound": self.bound}


def _member(h: np.ndarray, basis: np.ndarray, p: int) -> bool:
    if not np.any(h):
        return True
    if basis.shape[0] == 0:
        return False
    return la.solve_left(basis.reshape(basis.shape[0], -1), h.reshape(1, -1), p) is not None


def depth(f: ModuleHom, bound: int = 20, knit_bound: int | None = None) -> Depth:
    """Largest n with f in rad^n, or exceeded when f lies in rad^bound."""
    if bound <= 0:
        raise ARError("depth needs a positive bound")
    A = f.source.algebra
    q = knit(A, knit_bound if knit_bound is not None else bound)
    p = f.p
    dx, dy = decompose(f.source), decompose(f.target)
    m = la.mul(la.mul(dx.iso_inv, f.matrix, p), dy.iso, p)
    xo, yo = dx.offsets(), dy.offsets()
    best = bound
    for a, u in enumerate(dx.blocks):
        for b, v in enumerate(dy.blocks):
            h = m[xo[a] : xo[a] + u.dim, yo[b] : yo[b] + v.dim]
            if not np.any(h):
                continue
            n = 0
            while n < best and _member(h, _rad_power_indec(u, v, n + 1, q), p):
                n += 1
            best = min(best, n)
    if best >= bound:
        return Depth(None, True, q.complete, bound)
    return Depth(best, False, q.complete, bound)


# --- nodes ---------------------------------------------------------------------


def is_simple(s: Module) -> bool:
    # zero radical means semisimple, and an indecomposable semisimple module is simple
    return s.dim > 0 and s.radical_rows.shape[0] == 0 and is_indecomposable(s)


def is_node(s: Module) -> bool:
    """Non-projective, non-injective simple with projective AR middle term.

    Cross-checked against the stable criterion: the inclusion of s into the
    AR middle term is stably zero.
    """
    if not is_simple(s):
        raise ARError("is_node expects a simple module")
    if is_projective(s) or is_injective(s):
        return False
    ars = almost_split_starting(s)
    by_middle = is_projective(ars.middle)
    by_stable = stably_zero(ars.seq.f)
    if by_middle != by_stable:
        raise ARError("node characterizations disagree")
    return by_middle


def nodes(A: Algebra) -> list[Module]:
    from .modules import simple_module

    return [s for s in (simple_module(A, i) for i in range(A.n_vertices)) if is_node(s)]
