"""Right modules, homomorphisms and basic constructions.

A module of dimension n over an algebra of dimension d is a stack of
``d`` matrices of size n x n.  Elements are row vectors and ``x . b`` is
``x @ action[b]``.  A homomorphism ``f: X -> Y`` is a dim X x dim Y matrix
acting on the right, so the composite "f then g" is the product ``F @ G``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .algebra import Algebra

__all__ = [
    "Module",
    "ModuleHom",
    "ModuleError",
    "zero_module",
    "regular_module",
    "principal_projective",
    "simple_module",
    "direct_sum",
    "direct_sum_maps",
    "submodule",
    "quotient",
    "hom_space",
    "hom_dim",
    "same_module",
    "Presentation",
    "from_representation",
    "representation_data",
]


class ModuleError(ValueError):
    """Inconsistent module data."""


class Module:
    """A finite-dimensional right module.

    ``summands`` is set when the module is literally a block-diagonal direct
    sum of registered indecomposables (see :mod:`fdrep.decompose`).
    """

    def __init__(self, algebra: Algebra, action, *, check: bool = True, name: str | None = None, summands=None):
        self.algebra = algebra
        action = np.asarray(action, dtype=np.int64) % algebra.p
        if action.ndim != 3 or action.shape[0] != algebra.dim or action.shape[1] != action.shape[2]:
            raise ModuleError(f"action must be ({algebra.dim}, n, n), got {action.shape}")
        self.action = action
        self.action.setflags(write=False)
        self.dim = action.shape[1]
        self.name = name
        self.summands = tuple(summands) if summands is not None else None
        self.canon_id: int | None = None
        self._cache: dict = {}
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.algebra.p

    def validate(self) -> None:
        A, p, rho = self.algebra, self.p, self.action
        if not np.array_equal(self.act(A.unit), la.eye(self.dim)):
            raise ModuleError("unit does not act as the identity")
        lhs = la.bmul(rho[:, None], rho[None], p)
        rhs = np.einsum("ijk,kac->ijac", A.const, rho) % p
        if not np.array_equal(lhs, rhs):
            raise ModuleError("action is not multiplicative")

    def act(self, a) -> np.ndarray:
        """Matrix of right multiplication by the algebra element ``a``."""
        return np.tensordot(np.asarray(a, dtype=np.int64), self.action, axes=(0, 0)) % self.p

    def act_many(self, elems) -> np.ndarray:
        """Stack of action matrices for the rows of ``elems``."""
        elems = np.asarray(elems, dtype=np.int64).reshape(-1, self.algebra.dim)
        return la.tdot(elems, self.action, (1, 0), self.p)

    def projective_actions(self, i: int) -> np.ndarray:
        """Action matrices of the basis of e_i A, shape (dim e_iA, n, n)."""
        cache = self._cache.setdefault("proj_actions", {})
        if i not in cache:
            cache[i] = self.act_many(self.algebra.right_ideal(i))
        return cache[i]

    @cached_property
    def vertex_bases(self) -> tuple[np.ndarray, ...]:
        return tuple(la.row_basis(self.act(e), self.p) for e in self.algebra.idempotents)

    @cached_property
    def dim_vector(self) -> tuple[int, ...]:
        return tuple(int(b.shape[0]) for b in self.vertex_bases)

    @cached_property
    def radical_rows(self) -> np.ndarray:
        """Row basis of X . rad(A)."""
        A = self.algebra
        if A.radical.shape[0] == 0 or self.dim == 0:
            return np.zeros((0, self.dim), dtype=np.int64)
        mats = self.act_many(A.radical)
        return la.row_basis(mats.reshape(-1, self.dim), self.p)

    @cached_property
    def presentation(self) -> "Presentation":
        return Presentation.build(self)

    def is_zero(self) -> bool:
        return self.dim == 0

    def __repr__(self) -> str:
        nm = f"{self.name} " if self.name else ""
        return f"<Module {nm}dim {self.dim} {self.dim_vector}>"

    def identity(self) -> "ModuleHom":
        return ModuleHom(self, self, la.eye(self.dim), check=False)

    def zero_map(self, other: "Module") -> "ModuleHom":
        return ModuleHom(self, other, la.zeros(self.dim, other.dim), check=False)


def same_module(x: Module, y: Module) -> bool:
    return x is y or (
        x.algebra is y.algebra and x.dim == y.dim and np.array_equal(x.action, y.action)
    )


class ModuleHom:
    """A module homomorphism; ``matrix`` has shape (dim source, dim target)."""

    def __init__(self, source: Module, target: Module, matrix, *, check: bool = True):
        if source.algebra is not target.algebra:
            raise ModuleError("homomorphism between modules over different algebras")
        self.source = source
        self.target = target
        m = np.asarray(matrix, dtype=np.int64).reshape(source.dim, target.dim) % source.p
        self.matrix = m
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.source.p

    def validate(self) -> None:
        if not self.is_homomorphism(self.source, self.target, self.matrix):
            raise ModuleError("matrix does not intertwine the actions")

    @staticmethod
    def is_homomorphism(x: Module, y: Module, m: np.ndarray) -> bool:
        p = x.p
        lhs = la.bmul(x.action, m, p)
        rhs = la.bmul(m, y.action, p)
        return np.array_equal(lhs, rhs)

    def then(self, other: "ModuleHom") -> "ModuleHom":
        """The composite "self then other"."""
        if not same_module(self.target, other.source):
            raise ModuleError("composition of non-composable maps")
        return ModuleHom(self.source, other.target, la.mul(self.matrix, other.matrix, self.p), check=False)

    __matmul__ = then

    def __add__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, (self.matrix + other.matrix) % self.p, check=False)

    def __sub__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, (self.matrix - other.matrix) % self.p, check=False)

    def __neg__(self) -> "ModuleHom":
        return ModuleHom(self.source, self.target, (-self.matrix) % self.p, check=False)

    def scale(self, c: int) -> "ModuleHom":
        return ModuleHom(self.source, self.target, (c * self.matrix) % self.p, check=False)

    def rank(self) -> int:
        return la.rank(self.matrix, self.p)

    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()

    def inverse(self) -> "ModuleHom":
        return ModuleHom(self.target, self.source, la.inverse(self.matrix, self.p), check=False)

    def __repr__(self) -> str:
        return f"<ModuleHom {self.source.dim_vector} -> {self.target.dim_vector}>"


# --- distinguished modules ---------------------------------------------------


def zero_module(A: Algebra) -> Module:
    if "zero" not in A._cache:
        A._cache["zero"] = Module(A, np.zeros((A.dim, 0, 0), dtype=np.int64), check=False, summands=())
    return A._cache["zero"]


def regular_module(A: Algebra) -> Module:
    """A_A with its standard basis."""
    if "regular" not in A._cache:
        A._cache["regular"] = Module(A, A.const.transpose(1, 0, 2), check=False, name="A_A")
    return A._cache["regular"]


def _restrict(action: np.ndarray, rows: np.ndarray, p: int) -> np.ndarray:
    """Action on the invariant subspace spanned by independent ``rows``."""
    k = rows.shape[0]
    if k == 0:
        return np.zeros((action.shape[0], 0, 0), dtype=np.int64)
    rinv = la.solve(rows, la.eye(k), p)
    return la.bmul(la.bmul(rows, action, p), rinv, p)


def principal_projective(A: Algebra, i: int) -> Module:
    """e_i A with basis ``A.right_ideal(i)`` (rows in algebra coordinates)."""
    key = ("P", i)
    if key not in A._cache:
        rows = A.right_ideal(i)
        act = _restrict(regular_module(A).action, rows, A.p)
        A._cache[key] = Module(A, act, check=False, name=f"P{i}")
    return A._cache[key]


def simple_module(A: Algebra, i: int) -> Module:
    """Top of e_i A."""
    key = ("S", i)
    if key not in A._cache:
        P = principal_projective(A, i)
        S, _ = quotient(P, P.radical_rows)
        S.name = f"S{i}"
        A._cache[key] = S
    return A._cache[key]


# --- sums, sub and quotient modules ------------------------------------------


def _block_diag(mats: list[np.ndarray]) -> np.ndarray:
    r = sum(m.shape[0] for m in mats)
    c = sum(m.shape[1] for m in mats)
    out = np.zeros((r, c), dtype=np.int64)
    i = j = 0
    for m in mats:
        out[i : i + m.shape[0], j : j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def direct_sum(*mods: Module) -> Module:
    if not mods:
        raise ModuleError("direct_sum needs at least one module")
    A = mods[0].algebra
    if any(m.algebra is not A for m in mods):
        raise ModuleError("algebra mismatch in direct sum")
    if len(mods) == 1:
        return mods[0]
    n = sum(m.dim for m in mods)
    act = np.zeros((A.dim, n, n), dtype=np.int64)
    o = 0
    for m in mods:
        act[:, o : o + m.dim, o : o + m.dim] = m.action
        o += m.dim
    summands = None
    if all(m.summands is not None for m in mods):
        summands = tuple(s for m in mods for s in m.summands)
    return Module(A, act, check=False, summands=summands)


def direct_sum_maps(*maps: ModuleHom) -> ModuleHom:
    """Block-diagonal sum of homomorphisms."""
    src = direct_sum(*[f.source for f in maps])
    tgt = direct_sum(*[f.target for f in maps])
    return ModuleHom(src, tgt, _block_diag([f.matrix for f in maps]), check=False)


def submodule(x: Module, rows) -> tuple[Module, ModuleHom]:
    """Submodule spanned by ``rows`` (must be invariant) and its inclusion."""
    p = x.p
    rows = la.row_basis(np.asarray(rows, dtype=np.int64).reshape(-1, x.dim), p)
    act = _restrict(x.action, rows, p)
    sub = Module(x.algebra, act, check=False)
    inc = ModuleHom(sub, x, rows, check=False)
    if not ModuleHom.is_homomorphism(sub, x, rows):
        raise ModuleError("rows do not span a submodule")
    return sub, inc


def quotient(x: Module, rows) -> tuple[Module, ModuleHom]:
    """Quotient by the invariant span of ``rows``; returns (Q, projection).

    The projection's chosen section is stored as ``proj.section`` (rows of X
    lifting the basis of Q).
    """
    p = x.p
    w = la.row_basis(np.asarray(rows, dtype=np.int64).reshape(-1, x.dim), p)
    c = la.complement_rows(w, x.dim, p)
    t = np.vstack([w, c]) if w.shape[0] else c
    tinv = la.inverse(t, p)
    pr = tinv[:, w.shape[0] :].copy()
    act = la.bmul(la.bmul(c, x.action, p), pr, p)
    q = Module(x.algebra, act, check=False)
    proj = ModuleHom(x, q, pr, check=False)
    if not ModuleHom.is_homomorphism(x, q, pr):
        raise ModuleError("rows do not span a submodule")
    proj.section = c
    return q, proj


# --- presentations and Hom -----------------------------------------------------


@dataclass
class Presentation:
    """Top generators of X and the induced cover from principal projectives.

    ``gens`` lists (vertex, vector); ``cover`` maps P0 = (+) e_i A onto X;
    ``kernel`` holds rows of P0 spanning the kernel; ``section`` is a linear
    right inverse of ``cover``; ``blocks`` gives the P0 row range per generator.
    """

    module: Module
    gens: list
    p0: Module
    cover: np.ndarray
    kernel: np.ndarray
    section: np.ndarray
    blocks: list

    @classmethod
    def build(cls, x: Module) -> "Presentation":
        A, p = x.algebra, x.p
        n = x.dim
        gens: list = []
        rad = x.radical_rows
        if _is_basic(A):
            allrows = np.vstack([rad] + list(x.vertex_bases))
            picked = set(la.independent_rows(allrows, p))
            o = rad.shape[0]
            for i, basis in enumerate(x.vertex_bases):
                for j, v in enumerate(basis):
                    if o + j in picked:
                        gens.append((i, v.copy()))
                o += basis.shape[0]
            if len(picked) != n:
                raise ModuleError("top generators do not generate the module")
        else:
            # simples of dim > 1 meet several vertices: add one simple of the top at a time
            span = rad
            for i, basis in enumerate(x.vertex_bases):
                for v in basis:
                    red = la.Reducer(span, p, n)
                    if not np.any(red.reduce(v.reshape(1, -1))):
                        continue
                    gens.append((i, v.copy()))
                    gen = la.tdot(v, x.projective_actions(i), (0, 1), p)
                    span = la.row_basis(np.vstack([span, gen]), p)
            if span.shape[0] != n:
                raise ModuleError("top generators do not generate the module")
        pieces, blocks, cov_rows = [], [], []
        o = 0
        for i, v in gens:
            P = principal_projective(A, i)
            pieces.append(P)
            cov_rows.append(la.tdot(v, x.projective_actions(i), (0, 1), p))
            blocks.append((o, o + P.dim, i))
            o += P.dim
        if pieces:
            p0 = direct_sum(*pieces)
            cover = np.vstack(cov_rows)
        else:
            p0 = zero_module(A)
            cover = la.zeros(0, n)
        ker = la.left_kernel(cover, p) if cover.shape[0] else la.zeros(0, 0)
        sec = la.solve_left(cover, la.eye(n), p) if n else la.zeros(0, p0.dim)
        return cls(x, gens, p0, cover, ker, sec, blocks)


def _is_basic(A: Algebra) -> bool:
    """All simple modules one-dimensional (split basic over F_p)."""
    if "basic" not in A._cache:
        A._cache["basic"] = all(simple_module(A, i).dim == 1 for i in range(A.n_vertices))
    return A._cache["basic"]


def hom_space(x: Module, y: Module) -> list[ModuleHom]:
    """Basis of Hom_A(x, y)."""
    return [ModuleHom(x, y, m, check=False) for m in hom_matrices(x, y)]


def hom_dim(x: Module, y: Module) -> int:
    return len(hom_matrices(x, y))


def hom_matrices(x: Module, y: Module) -> np.ndarray:
    """Stack (k, dim x, dim y) of a basis of Hom(x, y)."""
    if x.algebra is not y.algebra:
        raise ModuleError("algebra mismatch")
    if x.dim == 0 or y.dim == 0:
        return np.zeros((0, x.dim, y.dim), dtype=np.int64)
    if x.summands is not None and y.summands is not None and (len(x.summands) > 1 or len(y.summands) > 1):
        return _hom_blocks(x, y)
    if x.canon_id is not None and y.canon_id is not None:
        key = ("hom", x.canon_id, y.canon_id)
        cache = x.algebra._cache
        if key not in cache:
            cache[key] = _hom_via_presentation(x, y)
        return cache[key]
    return _hom_via_presentation(x, y)


def _offsets(mods) -> list[int]:
    out, o = [], 0
    for m in mods:
        out.append(o)
        o += m.dim
    return out


def _hom_blocks(x: Module, y: Module) -> np.ndarray:
    xo, yo = _offsets(x.summands), _offsets(y.summands)
    mats = []
    for a, u in enumerate(x.summands):
        for b, v in enumerate(y.summands):
            for h in hom_matrices(u, v):
                m = np.zeros((x.dim, y.dim), dtype=np.int64)
                m[xo[a] : xo[a] + u.dim, yo[b] : yo[b] + v.dim] = h
                mats.append(m)
    if not mats:
        return np.zeros((0, x.dim, y.dim), dtype=np.int64)
    return np.array(mats)


def _hom_via_presentation(x: Module, y: Module) -> np.ndarray:
    A, p = x.algebra, x.p
    pres = x.presentation
    ny = y.dim
    k = pres.kernel
    rows, images = [], []
    for (lo, hi, i) in pres.blocks:
        B = y.vertex_bases[i]
        img = la.tdot(B, y.projective_actions(i), (1, 1), p)  # (s, dim e_iA, ny)
        images.append(img)
        if k.shape[0]:
            rel = la.tdot(k[:, lo:hi], img, (1, 1), p)  # (nk, s, ny)
            rows.append(rel.transpose(1, 0, 2).reshape(B.shape[0], k.shape[0] * ny))
        else:
            rows.append(np.zeros((B.shape[0], 0), dtype=np.int64))
    nunk = sum(r.shape[0] for r in rows)
    if nunk == 0:
        return np.zeros((0, x.dim, ny), dtype=np.int64)
    M = np.vstack(rows)
    sol = la.left_kernel(M, p) if M.shape[1] else la.eye(nunk)
    if sol.shape[0] == 0:
        return np.zeros((0, x.dim, ny), dtype=np.int64)
    # images of P0 basis for each solution: G[s] has shape (dim P0, ny)
    G = np.zeros((sol.shape[0], pres.p0.dim, ny), dtype=np.int64)
    u0 = 0
    for (lo, hi, i), img in zip(pres.blocks, images):
        m = img.shape[0]
        G[:, lo:hi, :] = la.tdot(sol[:, u0 : u0 + m], img, (1, 0), p)
        u0 += m
    return la.tdot(pres.section, G, (1, 1), p).transpose(1, 0, 2).copy()


def from_representation(A: Algebra, dims, arrows: dict, *, name: str | None = None) -> Module:
    """Module from quiver representation data.

    ``dims[i]`` is the dimension at vertex i and ``arrows[name]`` the matrix
    (dim src x dim tgt) through which row vectors are pushed along the arrow.
    """
    q = A.quiver
    if q is None or A.basis_paths is None:
        raise ModuleError("algebra has no quiver presentation")
    p = A.p
    vidx = {v: i for i, v in enumerate(q.vertices)}
    amap = {a[0]: a for a in q.arrows}
    dims = [int(d) for d in dims]
    if len(dims) != len(q.vertices):
        raise ModuleError("one dimension per vertex expected")
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    n = int(offs[-1])
    mats = {}
    for name_, (_, s_, t_) in amap.items():
        i, j = vidx[s_], vidx[t_]
        m = np.asarray(arrows.get(name_, np.zeros((dims[i], dims[j]))), dtype=np.int64).reshape(dims[i], dims[j]) % p
        mats[name_] = m
    act = np.zeros((A.dim, n, n), dtype=np.int64)
    for k, path in enumerate(A.basis_paths):
        if path[0] == "@":
            i = vidx[path[1]]
            act[k, offs[i] : offs[i + 1], offs[i] : offs[i + 1]] = la.eye(dims[i])
            continue
        i, j = vidx[amap[path[0]][1]], vidx[amap[path[-1]][2]]
        m = la.eye(dims[i])
        for a in path:
            m = la.mul(m, mats[a], p)
        act[k, offs[i] : offs[i + 1], offs[j] : offs[j + 1]] = m
    return Module(A, act, name=name)


def representation_data(x: Module) -> tuple[list[int], dict]:
    """Inverse of :func:`from_representation` in a vertex-adapted basis."""
    A = x.algebra
    q = A.quiver
    if q is None or A.basis_paths is None:
        raise ModuleError("algebra has no quiver presentation")
    p = x.p
    bases = x.vertex_bases
    vidx = {v: i for i, v in enumerate(q.vertices)}
    out = {}
    for name_, s_, t_ in q.arrows:
        k = A.basis_paths.index((name_,))
        i, j = vidx[s_], vidx[t_]
        img = la.mul(bases[i], x.action[k], p)
        coords = la.solve_left(bases[j], img, p) if bases[j].shape[0] else np.zeros((bases[i].shape[0], 0), dtype=np.int64)
        out[name_] = coords.tolist()
    return [b.shape[0] for b in bases], out
