"""Krull-Schmidt decomposition and canonical representatives.

Every algebra carries a registry of indecomposable modules.  ``decompose``
returns summands that are literally registry objects, so a module in
canonical form is a block-diagonal sum of registered representatives and
isomorphic copies share identical matrices.  That keeps Hom computations
blockwise and cached, and makes split-summand elimination a matter of
block Gaussian elimination.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor

from . import linalg as la
from .algebra import Algebra
from .modules import (
    Module,
    ModuleError,
    ModuleHom,
    direct_sum,
    hom_matrices,
    principal_projective,
    submodule,
    zero_module,
)

__all__ = [
    "Decomposition",
    "decompose",
    "canonical_form",
    "is_indecomposable",
    "isomorphic",
    "find_iso",
    "local_radical",
    "end_radical",
    "registry",
    "register",
    "default_seed",
    "block_offsets",
]

EXHAUSTIVE_LIMIT = 8  # dim End bound for the exhaustive fallback


def default_seed() -> int:
    return int(os.environ.get("FDREP_SEED", "0"))


# --- polynomial helpers ------------------------------------------------------


def minpoly(m: np.ndarray, p: int) -> list[int]:
    """Minimal polynomial of a square matrix, coefficients high to low, monic."""
    n = m.shape[0]
    powers = [la.eye(n).ravel()]
    cur = la.eye(n)
    while True:
        cur = la.mul(cur, m, p)
        sol = la.solve_left(np.array(powers), cur.ravel().reshape(1, -1), p)
        if sol is not None:
            # m^k = sum c_i m^i  ->  t^k - sum c_i t^i
            c = [int(v) for v in sol.ravel()]
            return [1] + [(-c[i]) % p for i in range(len(c) - 1, -1, -1)]
        powers.append(cur.ravel())


def poly_eval(coeffs: list[int], m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    out = la.zeros(n, n)
    for c in coeffs:
        out = (la.mul(out, m, p) + c * la.eye(n)) % p
    return out


def factor(coeffs: list[int], p: int) -> list[tuple[list[int], int]]:
    _, fs = gf_factor([ZZ(c) for c in coeffs], p, ZZ)
    return [([int(c) % p for c in f], e) for f, e in fs]


def matrix_power_stable(m: np.ndarray, p: int) -> np.ndarray:
    """m^N for N >= n, reached by repeated squaring until the rank stabilizes."""
    cur = m
    r = la.rank(cur, p)
    while True:
        nxt = la.mul(cur, cur, p)
        rn = la.rank(nxt, p)
        if rn == r:
            # rank(m^2) = rank(m): the image is the Fitting image
            return nxt
        cur, r = nxt, rn


def is_nilpotent(m: np.ndarray, p: int) -> bool:
    return not np.any(matrix_power_stable(m, p))


def is_invertible(m: np.ndarray, p: int) -> bool:
    return m.shape[0] == m.shape[1] and la.rank(m, p) == m.shape[0]


# --- endomorphism ring analysis ----------------------------------------------


class _Split(Exception):
    def __init__(self, element: np.ndarray):
        self.element = element


def _classify(x: np.ndarray, p: int, nil: list) -> int:
    """Record the nilpotent part of x; raise _Split if x is not primary."""
    if not np.any(x):
        return 0
    fs = factor(minpoly(x, p), p)
    if len(fs) > 1:
        q, e = fs[0]
        y = poly_eval(q, x, p)
        y = matrix_power_stable(y, p)
        # y kills one primary component and is invertible on the rest
        raise _Split(y)
    q, e = fs[0]
    if e > 1 or q == [1, 0]:
        y = poly_eval(q, x, p)
        if np.any(y):
            nil.append(y)
    return len(q) - 1


def _span_closure(gens: list[np.ndarray], basis: np.ndarray, p: int) -> np.ndarray:
    """Two-sided ideal of the algebra spanned by ``basis`` generated by gens."""
    n = basis.shape[1]
    if not gens:
        return np.zeros((0, n, n), dtype=np.int64)
    rows = la.row_basis(np.array([g.ravel() for g in gens]), p)
    while True:
        mats = rows.reshape(-1, n, n)
        prods = [rows]
        prods.append(la.bmul(basis[:, None], mats[None], p).reshape(-1, n * n))
        prods.append(la.bmul(mats[:, None], basis[None], p).reshape(-1, n * n))
        new = la.row_basis(np.vstack(prods), p)
        if new.shape[0] == rows.shape[0]:
            return new.reshape(-1, n, n)
        rows = new


def _nilpotent_ideal(J: np.ndarray, p: int) -> bool:
    if J.shape[0] == 0:
        return True
    n = J.shape[1]
    cur = J
    for _ in range(n + 1):
        prods = la.bmul(cur[:, None], J[None], p).reshape(-1, n * n)
        nxt = la.row_basis(prods, p)
        if nxt.shape[0] == 0:
            return True
        if nxt.shape[0] == cur.shape[0]:
            return False
        cur = nxt.reshape(-1, n, n)
    return False


@dataclass
class EndAnalysis:
    local: bool
    radical: np.ndarray | None = None  # (r, n, n) basis of rad End when local
    splitter: np.ndarray | None = None  # endomorphism neither nilpotent nor invertible


def local_radical(basis: np.ndarray, p: int, seed: int | None = None) -> EndAnalysis:
    """Decide whether the matrix algebra spanned by ``basis`` is local.

    ``basis`` must span a unital subalgebra of n x n matrices.  When local,
    returns a basis of its radical; otherwise returns a non-nilpotent,
    non-invertible element.  Locality is certified: the radical candidate J is
    a nilpotent ideal and the quotient is a field.
    """
    basis = np.asarray(basis, dtype=np.int64) % p
    d = basis.shape[0]
    n = basis.shape[1]
    if d == 1:
        return EndAnalysis(True, radical=np.zeros((0, n, n), dtype=np.int64))
    seed = default_seed() if seed is None else seed
    rng = np.random.default_rng(seed)
    nil: list = []
    try:
        for b in basis:
            _classify(b, p, nil)
        J = _span_closure(nil, basis, p)
        for j in J:
            _classify(j, p, [])
        if _nilpotent_ideal(J, p):
            r = d - J.shape[0]
            if r == 1:
                return EndAnalysis(True, radical=J)
            candidates = list(basis) + [
                np.tensordot(rng.integers(0, p, d), basis, axes=(0, 0)) % p for _ in range(16)
            ]
            for z in candidates:
                deg = _classify(z, p, nil)
                if deg == r:
                    return EndAnalysis(True, radical=J)
            J = _span_closure(nil, basis, p)
            if _nilpotent_ideal(J, p) and d - J.shape[0] == 1:
                return EndAnalysis(True, radical=J)
        # seeded search for a splitting element
        for _ in range(64):
            z = np.tensordot(rng.integers(0, p, d), basis, axes=(0, 0)) % p
            _classify(z, p, [])
        if d <= EXHAUSTIVE_LIMIT:
            nils = []
            for coeffs in itertools.product(range(p), repeat=d):
                z = np.tensordot(np.array(coeffs), basis, axes=(0, 0)) % p
                _classify(z, p, [])
                if is_nilpotent(z, p):
                    nils.append(z)
            J = _span_closure(nils, basis, p)
            return EndAnalysis(True, radical=J)
    except _Split as s:
        return EndAnalysis(False, splitter=s.element)
    raise ModuleError("endomorphism ring analysis failed to decide locality")


# --- registry ----------------------------------------------------------------


def registry(A: Algebra) -> list[Module]:
    reg = A._cache.get("registry")
    if reg is None:
        reg = []
        A._cache["registry"] = reg
        A._cache["registry_by_dv"] = {}
        A._cache["proj_rep"] = {}
        for i in range(A.n_vertices):
            P = principal_projective(A, i)
            hit = _lookup(A, P)
            if hit is None:
                _register_raw(A, P)
                A._cache["proj_rep"][i] = (P, la.eye(P.dim))
            else:
                A._cache["proj_rep"][i] = hit
    return reg


def _register_raw(A: Algebra, m: Module) -> Module:
    reg = A._cache["registry"]
    m.canon_id = len(reg)
    m.summands = (m,)
    reg.append(m)
    A._cache["registry_by_dv"].setdefault(m.dim_vector, []).append(m)
    return m


def find_iso(w: Module, r: Module) -> np.ndarray | None:
    """An isomorphism matrix w -> r for indecomposable w, or None.

    For indecomposable w, w and r are isomorphic iff some basis element of
    Hom(w, r) is invertible (a sum of non-units of a local ring is a non-unit).
    """
    if w.dim != r.dim or w.dim_vector != r.dim_vector:
        return None
    for h in hom_matrices(w, r):
        if is_invertible(h, w.p):
            return h
    return None


def _lookup(A: Algebra, w: Module) -> tuple[Module, np.ndarray] | None:
    for r in A._cache["registry_by_dv"].get(w.dim_vector, []):
        iso = find_iso(w, r)
        if iso is not None:
            return r, iso
    return None


def _vertex_adapted(w: Module) -> tuple[Module, np.ndarray]:
    """Rewrite w in a basis concatenating its vertex spaces."""
    bases = [b for b in w.vertex_bases if b.shape[0]]
    t = np.vstack(bases) if bases else la.zeros(0, 0)
    if t.shape[0] != w.dim:
        return w, la.eye(w.dim)
    tinv = la.inverse(t, w.p)
    act = la.bmul(la.bmul(t, w.action, w.p), tinv, w.p)
    return Module(w.algebra, act, check=False), tinv


def register(w: Module) -> tuple[Module, np.ndarray]:
    """Canonical representative of the indecomposable w and an iso w -> rep."""
    A = w.algebra
    registry(A)
    if w.canon_id is not None:
        return w, la.eye(w.dim)
    hit = _lookup(A, w)
    if hit is not None:
        return hit
    rep, iso = _vertex_adapted(w)
    _register_raw(A, rep)
    return rep, iso


# --- decomposition -----------------------------------------------------------


def _split_pieces(x: Module, seed: int) -> list[np.ndarray]:
    """Row bases (in x coordinates) of indecomposable pieces of x."""
    if x.dim == 0:
        return []
    ends = hom_matrices(x, x)
    ana = local_radical(ends, x.p, seed)
    if ana.local:
        x._cache["end_radical"] = ana.radical
        return [la.eye(x.dim)]
    y = ana.splitter
    img = la.row_basis(y, x.p)
    ker = la.left_kernel(y, x.p)
    out = []
    for rows in (img, ker):
        sub, inc = submodule(x, rows)
        for piece in _split_pieces(sub, seed):
            out.append(la.mul(piece, inc.matrix, x.p))
    return out


@dataclass
class Decomposition:
    """x ~ (+) summands, with the witnessing isomorphism.

    ``iso`` maps x onto ``canonical`` (a block sum of registry objects, equal
    copies adjacent); ``inclusions[k]`` and ``projections[k]`` are the
    structure maps of the k-th block.
    """

    module: Module
    canonical: Module
    iso: np.ndarray
    iso_inv: np.ndarray
    blocks: list[Module]

    @property
    def summands(self) -> list[tuple[Module, int]]:
        out: list[tuple[Module, int]] = []
        for b in self.blocks:
            if out and out[-1][0] is b:
                out[-1] = (b, out[-1][1] + 1)
            else:
                out.append((b, 1))
        return out

    def offsets(self) -> list[int]:
        return block_offsets(self.blocks)

    @property
    def inclusions(self) -> list[ModuleHom]:
        out = []
        for off, b in zip(self.offsets(), self.blocks):
            out.append(ModuleHom(b, self.module, self.iso_inv[off : off + b.dim], check=False))
        return out

    @property
    def projections(self) -> list[ModuleHom]:
        out = []
        for off, b in zip(self.offsets(), self.blocks):
            out.append(ModuleHom(self.module, b, self.iso[:, off : off + b.dim], check=False))
        return out

    def multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.blocks:
            out[b.canon_id] = out.get(b.canon_id, 0) + 1
        return out


def block_offsets(blocks) -> list[int]:
    out, o = [], 0
    for b in blocks:
        out.append(o)
        o += b.dim
    return out


def decompose(x: Module, seed: int | None = None) -> Decomposition:
    """Complete decomposition of x into registered indecomposables."""
    A, p = x.algebra, x.p
    registry(A)
    if x.summands is not None and all(s.canon_id is not None for s in x.summands):
        eye = la.eye(x.dim)
        return Decomposition(x, x, eye, eye, list(x.summands))
    cached = x._cache.get("decomposition")
    if cached is not None:
        return cached
    seed = default_seed() if seed is None else seed
    pieces = _split_pieces(x, seed)
    found = []
    for rows in pieces:
        sub, inc = submodule(x, rows)
        rep, iso = register(sub)
        # x-rows of this piece mapped into rep coordinates
        found.append((rep.canon_id, rows, inc.matrix, iso, rep))
    found.sort(key=lambda t: t[0])
    if found:
        t = np.vstack([f[2] for f in found])  # piece bases stacked (x coordinates)
        tinv = la.inverse(t, p)
        isos = [f[3] for f in found]
        from .modules import _block_diag

        bd = _block_diag(isos)
        bd_inv = _block_diag([la.inverse(i, p) for i in isos])
        iso = la.mul(tinv, bd, p)
        iso_inv = la.mul(bd_inv, t, p)
        blocks = [f[4] for f in found]
        canon = direct_sum(*blocks)
        if len(blocks) == 1:
            canon = blocks[0]
    else:
        iso = iso_inv = la.zeros(0, 0)
        blocks, canon = [], zero_module(A)
    dec = Decomposition(x, canon, iso, iso_inv, blocks)
    x._cache["decomposition"] = dec
    return dec


def canonical_form(x: Module) -> tuple[Module, ModuleHom]:
    """(canonical block module, isomorphism x -> it)."""
    dec = decompose(x)
    return dec.canonical, ModuleHom(x, dec.canonical, dec.iso, check=False)


def is_indecomposable(x: Module) -> bool:
    return x.dim > 0 and len(decompose(x).blocks) == 1


def isomorphic(x: Module, y: Module) -> bool:
    if x.algebra is not y.algebra or x.dim != y.dim:
        return False
    return decompose(x).multiset() == decompose(y).multiset()


def end_radical(w: Module) -> np.ndarray:
    """Basis (r, n, n) of rad End(w) for an indecomposable w."""
    if "end_radical" not in w._cache:
        ana = local_radical(hom_matrices(w, w), w.p)
        if not ana.local:
            raise ModuleError("end_radical requires an indecomposable module")
        w._cache["end_radical"] = ana.radical
    return w._cache["end_radical"]
