"""Finite-dimensional algebras over F_p.

An algebra is stored by structure constants ``const[i, j, k]`` with
``b_i b_j = sum_k const[i, j, k] b_k``.  Elements are row vectors of
coordinates.  Quiver algebras use the convention that the path ``ab`` means
"first a, then b", so a right module ``X`` has vertex spaces ``X e_i`` and an
arrow ``a: i -> j`` maps ``X e_i`` to ``X e_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import linalg as la

__all__ = [
    "Algebra",
    "AlgebraError",
    "QuiverPresentation",
    "from_quiver",
    "opposite",
    "envelope",
    "dominant_dimension_at_least_one",
]


class AlgebraError(ValueError):
    """Malformed algebra data."""


@dataclass(frozen=True)
class QuiverPresentation:
    """Quiver with relations.

    ``arrows`` holds ``(name, src, tgt)``; each relation is a list of
    ``(coeff, path)`` with ``path`` a tuple of arrow names read left to right.
    """

    p: int
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...] = ()
    relations: tuple[tuple[tuple[int, tuple[str, ...]], ...], ...] = ()

    def __post_init__(self):
        if not la.is_prime(self.p):
            raise AlgebraError(f"characteristic {self.p} is not prime")
        verts = set(self.vertices)
        if len(verts) != len(self.vertices):
            raise AlgebraError("duplicate vertex names")
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate arrow names")
        for name, s, t in self.arrows:
            if s not in verts or t not in verts:
                raise AlgebraError(f"arrow {name} has unknown endpoint")
        amap = {a[0]: a for a in self.arrows}
        for rel in self.relations:
            ends = set()
            for _, path in rel:
                if len(path) < 2:
                    raise AlgebraError("relation monomials must have length >= 2")
                for x in path:
                    if x not in amap:
                        raise AlgebraError(f"unknown arrow {x} in relation")
                for x, y in zip(path, path[1:]):
                    if amap[x][2] != amap[y][1]:
                        raise AlgebraError(f"path {path} is not composable")
                ends.add((amap[path[0]][1], amap[path[-1]][2]))
            if len(ends) > 1:
                raise AlgebraError("relation mixes non-parallel paths")

    def reversed(self) -> "QuiverPresentation":
        return QuiverPresentation(
            self.p,
            self.vertices,
            tuple((n, t, s) for n, s, t in self.arrows),
            tuple(tuple((c, tuple(reversed(path))) for c, path in rel) for rel in self.relations),
        )


class Algebra:
    """A finite-dimensional algebra given by structure constants.

    Parameters
    ----------
    p : prime characteristic.
    const : array of shape (d, d, d).
    unit : coordinates of 1.
    idempotents : rows are primitive orthogonal idempotents summing to 1.
    radical : rows span the Jacobson radical.
    labels : optional basis labels.
    check : verify the axioms (full scan of basis triples).
    """

    def __init__(
        self,
        p: int,
        const,
        unit,
        idempotents,
        radical,
        labels=None,
        *,
        check: bool = True,
        name: str | None = None,
    ):
        if not la.is_prime(p):
            raise AlgebraError(f"characteristic {p} is not prime")
        self.p = p
        const = np.array(const, dtype=np.int64) % p
        d = const.shape[0] if const.ndim == 3 else 0
        if const.ndim != 3 or const.shape != (d, d, d):
            raise AlgebraError(f"structure constants must be (d,d,d), got {const.shape}")
        self.dim = d
        self.const = const
        self.const.setflags(write=False)
        self.unit = np.array(unit, dtype=np.int64).reshape(d) % p
        self.idempotents = np.array(idempotents, dtype=np.int64).reshape(-1, d) % p
        self.radical = la.row_basis(np.array(radical, dtype=np.int64).reshape(-1, d) % p, p)
        self.labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(d))
        if len(self.labels) != d:
            raise AlgebraError("label count differs from dimension")
        self.name = name
        self.quiver: QuiverPresentation | None = None
        self.basis_paths: tuple | None = None
        self._op: Algebra | None = None
        self._cache: dict = {}
        if check:
            self.validate()

    # --- arithmetic -----------------------------------------------------
    def mult(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.const) % self.p

    def right_mult(self, y) -> np.ndarray:
        """Matrix R with x @ R = x * y."""
        return np.einsum("j,ijk->ik", np.asarray(y, dtype=np.int64), self.const) % self.p

    def left_mult(self, y) -> np.ndarray:
        """Matrix L with x @ L = y * x."""
        return np.einsum("i,ijk->jk", np.asarray(y, dtype=np.int64), self.const) % self.p

    @property
    def n_vertices(self) -> int:
        return self.idempotents.shape[0]

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    # --- validation -----------------------------------------------------
    def validate(self) -> None:
        p, c, d = self.p, self.const, self.dim
        lhs = np.einsum("ijm,mkl->ijkl", c, c) % p
        rhs = np.einsum("jkm,iml->ijkl", c, c) % p
        if not np.array_equal(lhs, rhs):
            raise AlgebraError("structure constants are not associative")
        eye = la.eye(d)
        if not np.array_equal(self.right_mult(self.unit), eye) or not np.array_equal(
            self.left_mult(self.unit), eye
        ):
            raise AlgebraError("unit law fails")
        e = self.idempotents
        if e.shape[0] == 0 and d:
            raise AlgebraError("no idempotents supplied")
        for i in range(e.shape[0]):
            for j in range(e.shape[0]):
                want = e[i] if i == j else np.zeros(d, dtype=np.int64)
                if not np.array_equal(self.mult(e[i], e[j]), want):
                    raise AlgebraError("idempotents are not orthogonal idempotents")
        if d and not np.array_equal(e.sum(axis=0) % p, self.unit):
            raise AlgebraError("idempotents do not sum to 1")
        red = la.Reducer(self.radical, p, d)
        for r in self.radical:
            for b in range(d):
                bv = self.basis_vector(b)
                if not red.contains(self.mult(r, bv)) or not red.contains(self.mult(bv, r)):
                    raise AlgebraError("radical is not a two-sided ideal")
        if self.radical_power(d + 1).shape[0]:
            raise AlgebraError("radical is not nilpotent")

    # --- derived data ---------------------------------------------------
    def radical_power(self, n: int) -> np.ndarray:
        key = ("radpow", n)
        if key in self._cache:
            return self._cache[key]
        if n <= 0:
            out = la.eye(self.dim)
        elif n == 1:
            out = self.radical
        else:
            prev = self.radical_power(n - 1)
            if prev.shape[0] == 0:
                out = prev
            else:
                prods = np.einsum("ai,bj,ijk->abk", prev, self.radical, self.const) % self.p
                out = la.row_basis(prods.reshape(-1, self.dim), self.p)
        self._cache[key] = out
        return out

    def corner(self, i: int, j: int) -> np.ndarray:
        """Row basis of e_i A e_j."""
        key = ("corner", i, j)
        if key not in self._cache:
            m = la.mul(self.left_mult(self.idempotents[i]), self.right_mult(self.idempotents[j]), self.p)
            self._cache[key] = la.row_basis(m, self.p)
        return self._cache[key]

    def right_ideal(self, i: int) -> np.ndarray:
        """Row basis of e_i A."""
        key = ("eA", i)
        if key not in self._cache:
            self._cache[key] = la.row_basis(self.left_mult(self.idempotents[i]), self.p)
        return self._cache[key]

    def opposite(self) -> "Algebra":
        return opposite(self)

    def is_commutative(self) -> bool:
        return np.array_equal(self.const, self.const.transpose(1, 0, 2))

    def __repr__(self) -> str:
        nm = f" {self.name}" if self.name else ""
        return f"<Algebra{nm} over F_{self.p}, dim {self.dim}, {self.n_vertices} idempotents>"

    # --- equality used by serialization tests ---------------------------
    def same_data(self, other: "Algebra") -> bool:
        return (
            self.p == other.p
            and np.array_equal(self.const, other.const)
            and np.array_equal(self.unit, other.unit)
            and np.array_equal(self.idempotents, other.idempotents)
            and np.array_equal(self.radical, other.radical)
        )


def _paths_by_length(q: QuiverPresentation, max_len: int) -> list[list[tuple]]:
    """Paths grouped by length; a length-0 path is ('@', vertex)."""
    out: list[list[tuple]] = [[("@", v) for v in q.vertices]]
    if max_len == 0:
        return out
    amap = {a[0]: a for a in q.arrows}
    cur = [(a[0],) for a in q.arrows]
    for _ in range(1, max_len + 1):
        out.append(cur)
        nxt = []
        for path in cur:
            end = amap[path[-1]][2]
            for a in q.arrows:
                if a[1] == end:
                    nxt.append(path + (a[0],))
        cur = nxt
    return out


def _path_ends(q: QuiverPresentation, path: tuple) -> tuple[str, str]:
    if path[0] == "@":
        return path[1], path[1]
    amap = {a[0]: a for a in q.arrows}
    return amap[path[0]][1], amap[path[-1]][2]


def _concat(q, u: tuple, w: tuple):
    su, tu = _path_ends(q, u)
    sw, tw = _path_ends(q, w)
    if tu != sw:
        return None
    if u[0] == "@":
        return w
    if w[0] == "@":
        return u
    return u + w


def _truncated_quotient(q: QuiverPresentation, L: int):
    """kQ / (I + paths of length >= L): (paths, index, rref rows, pivots)."""
    groups = _paths_by_length(q, L - 1)
    # longest paths first so that normal forms prefer short paths
    paths = [path for g in reversed(groups) for path in reversed(g)]
    index = {path: i for i, path in enumerate(paths)}
    n = len(paths)
    p = q.p
    gens = []
    for rel in q.relations:
        for u in paths:
            for w in paths:
                v = np.zeros(n, dtype=np.int64)
                hit = False
                for coeff, mono in rel:
                    uw = _concat(q, u, mono)
                    if uw is None:
                        continue
                    uw = _concat(q, uw, w)
                    if uw is None:
                        continue
                    if uw in index:
                        v[index[uw]] = (v[index[uw]] + coeff) % p
                        hit = True
                if hit and np.any(v):
                    gens.append(v)
    if gens:
        r, piv = la.rref(np.array(gens), p)
        r = r[: len(piv)]
    else:
        r, piv = np.zeros((0, n), dtype=np.int64), []
    return paths, index, r, piv


def from_quiver(q: QuiverPresentation, max_degree: int = 64, name: str | None = None) -> Algebra:
    """Path algebra of ``q`` modulo its relations."""
    maxrel = max((len(path) for rel in q.relations for _, path in rel), default=1)
    L = maxrel + 1
    prev_dim = None
    while True:
        if L > max_degree:
            raise AlgebraError(f"quotient did not stabilize below degree {max_degree}")
        data = _truncated_quotient(q, L)
        dim = len(data[0]) - len(data[3])
        if prev_dim is not None and dim == prev_dim:
            break
        prev_dim, prev_data = dim, data
        L += 1
    paths, index, r, piv = prev_data
    p = q.p
    pset = set(piv)
    basis_cols = [i for i in range(len(paths)) if i not in pset]
    # present basis in the natural order: by length, then enumeration order
    basis_cols.sort(key=lambda i: (_plen(paths[i]), -i))
    basis = [paths[i] for i in basis_cols]
    d = len(basis)
    col_of = {c: k for k, c in enumerate(basis_cols)}

    def coords(path) -> np.ndarray:
        v = np.zeros(len(paths), dtype=np.int64)
        if path is not None and path in index:
            v[index[path]] = 1
        if piv:
            v = (v - v[piv] @ r) % p
        out = np.zeros(d, dtype=np.int64)
        for c, k in col_of.items():
            out[k] = v[c]
        return out

    const = np.zeros((d, d, d), dtype=np.int64)
    for i, u in enumerate(basis):
        for j, w in enumerate(basis):
            const[i, j] = coords(_concat(q, u, w))
    idem = np.zeros((len(q.vertices), d), dtype=np.int64)
    for k, v in enumerate(q.vertices):
        idem[k, basis.index(("@", v))] = 1
    rad = np.array([la.eye(d)[k] for k, b in enumerate(basis) if b[0] != "@"], dtype=np.int64).reshape(-1, d)
    labels = [f"e{b[1]}" if b[0] == "@" else "*".join(b) for b in basis]
    alg = Algebra(p, const, idem.sum(axis=0) % p, idem, rad, labels, name=name)
    alg.quiver = q
    alg.basis_paths = tuple(basis)
    return alg


def _plen(path) -> int:
    return 0 if path[0] == "@" else len(path)


def opposite(a: Algebra) -> Algebra:
    """A^op: c'_{ijk} = c_{jik}; opposite(opposite(a)) is a."""
    if a._op is None:
        op = Algebra(
            a.p,
            a.const.transpose(1, 0, 2),
            a.unit,
            a.idempotents,
            a.radical,
            a.labels,
            check=False,
            name=(a.name + "^op") if a.name else None,
        )
        if a.quiver is not None:
            op.quiver = a.quiver.reversed()
            op.basis_paths = tuple(
                b if b[0] == "@" else tuple(reversed(b)) for b in a.basis_paths
            )
        op._op = a
        a._op = op
    return a._op


_ENVELOPES: dict = {}


def envelope(a: Algebra, b: Algebra) -> Algebra:
    """A^op (x) B; basis index i * dim(B) + j for a_i (x) b_j."""
    if a.p != b.p:
        raise AlgebraError("characteristic mismatch")
    key = (id(a), id(b))
    hit = _ENVELOPES.get(key)
    if hit is not None and hit[0] is a and hit[1] is b:
        return hit[2]
    p = a.p
    aop = opposite(a)
    da, db = a.dim, b.dim
    const = np.einsum("ikm,jln->ijklmn", aop.const, b.const).reshape(da * db, da * db, da * db) % p
    unit = la.kron(aop.unit.reshape(1, -1), b.unit.reshape(1, -1), p).ravel()
    idem = np.array(
        [np.kron(e, f) for e in aop.idempotents for f in b.idempotents], dtype=np.int64
    ).reshape(-1, da * db)
    rad_rows = [np.kron(r, y) for r in aop.radical for y in la.eye(db)]
    rad_rows += [np.kron(x, r) for x in la.eye(da) for r in b.radical]
    rad = np.array(rad_rows, dtype=np.int64).reshape(-1, da * db)
    labels = [f"{x}|{y}" for x in aop.labels for y in b.labels]
    env = Algebra(p, const, unit, idem, rad, labels, check=False, name=f"env({a.name},{b.name})")
    env._cache["envelope_of"] = (a, b)
    _ENVELOPES[key] = (a, b, env)
    return env


def dominant_dimension_at_least_one(a: Algebra) -> bool:
    """True iff the injective hull of A_A is projective."""
    from .homological import injective_hull, is_projective
    from .modules import regular_module

    hull, _ = injective_hull(regular_module(a))
    return is_projective(hull)
