"""Exact linear algebra over a prime field F_p.

Matrices are numpy ``int64`` arrays whose entries are residues in ``[0, p)``.
Every routine is deterministic: Gaussian elimination always pivots on the
first nonzero entry of the current column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Scalar",
    "as_mat",
    "zeros",
    "eye",
    "rref",
    "rank",
    "kernel",
    "left_kernel",
    "solve",
    "solve_left",
    "inverse",
    "kron",
    "mul",
    "tdot",
    "bmul",
    "row_basis",
    "complement_rows",
    "in_rowspace",
    "is_prime",
]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Scalar:
    """A residue modulo a prime ``p``."""

    value: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, Scalar):
            if other.p != self.p:
                raise ValueError("characteristic mismatch")
            return other.value
        return int(other)

    def __add__(self, other):
        return Scalar(self.value + self._coerce(other), self.p)

    def __sub__(self, other):
        return Scalar(self.value - self._coerce(other), self.p)

    def __mul__(self, other):
        return Scalar(self.value * self._coerce(other), self.p)

    def __neg__(self):
        return Scalar(-self.value, self.p)

    def inverse(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return Scalar(pow(self.value, self.p - 2, self.p), self.p)

    def __int__(self):
        return self.value


def as_mat(m, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce nested lists or arrays to a reduced int64 matrix."""
    a = np.array(m, dtype=np.int64)
    if shape is not None:
        a = a.reshape(shape)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    return a % p


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def tdot(a: np.ndarray, b: np.ndarray, axes, p: int) -> np.ndarray:
    """``np.tensordot`` mod p, through float64 BLAS when the sums are exact."""
    ax_a, ax_b = axes
    ax_a = (ax_a,) if isinstance(ax_a, int) else tuple(ax_a)
    inner = int(np.prod([a.shape[i] for i in ax_a])) if ax_a else 1
    if inner * (p - 1) ** 2 < 2**52:
        r = np.tensordot(a.astype(np.float64), b.astype(np.float64), axes=axes)
        return np.rint(r).astype(np.int64) % p
    return np.tensordot(a, b, axes=axes) % p


def bmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Broadcast ``np.matmul`` mod p, through float64 when the sums are exact."""
    k = a.shape[-1]
    if k * (p - 1) ** 2 < 2**52:
        return np.rint(np.matmul(a.astype(np.float64), b.astype(np.float64))).astype(np.int64) % p
    return np.matmul(a, b) % p


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Matrix product mod p; chunks the inner dimension to avoid overflow."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    k = a.shape[1]
    if k * (p - 1) ** 2 < 2**52 and a.size and b.size:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    limit = max(1, (2**62) // max(1, (p - 1) ** 2))
    if k <= limit:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, k, limit):
        out = (out + a[:, s : s + limit] @ b[s : s + limit]) % p
    return out


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form and pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    inv = [0] + [pow(v, p - 2, p) for v in range(1, p)]
    for c in range(cols):
        if r == rows:
            break
        colv = a[r:, c]
        i = int(colv.argmax())
        if colv[i] == 0:
            continue
        piv = r + i
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = (a[r, c:] * inv[lead]) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    if m.shape[0] > m.shape[1]:
        m = m.T
    return len(rref(m, p)[1])


def kernel(m: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right null space {x : m x = 0}."""
    m = np.asarray(m, dtype=np.int64)
    rows, cols = m.shape
    if rows == 0:
        return eye(cols)
    r, piv = rref(m, p)
    pset = set(piv)
    free = [c for c in range(cols) if c not in pset]
    k = zeros(cols, len(free))
    for j, fc in enumerate(free):
        k[fc, j] = 1
        for i, pc in enumerate(piv):
            k[pc, j] = (-r[i, fc]) % p
    return k


def left_kernel(m: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {y : y m = 0}."""
    return kernel(np.asarray(m).T, p).T.copy()


def solve(m: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with m x = b, or None."""
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    if b.shape[0] != m.shape[0]:
        raise ValueError(f"dimension mismatch: {m.shape} vs rhs {b.shape}")
    cols = m.shape[1]
    if m.shape[0] == 0:
        x = zeros(cols, b.shape[1])
        return x.ravel() if vec else x
    r, piv = rref(np.hstack([m % p, b % p]), p)
    if any(c >= cols for c in piv):
        return None
    x = zeros(cols, b.shape[1])
    for i, pc in enumerate(piv):
        x[pc] = r[i, cols:]
    return x.ravel() if vec else x


def solve_left(m: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with x m = b, or None."""
    x = solve(np.asarray(m).T, np.asarray(b).T, p)
    return None if x is None else x.T.copy()


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, piv = rref(np.hstack([m % p, eye(n)]), p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return r[:, n:].copy()


def kron(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Kronecker product; row index = i_a * rows_b + i_b."""
    return np.kron(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p


def row_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Rows of the rref basis of the row space."""
    m = np.asarray(m, dtype=np.int64)
    if m.shape[0] == 0:
        return m.reshape(0, m.shape[1])
    r, piv = rref(m, p)
    return r[: len(piv)].copy()


def complement_rows(basis: np.ndarray, n: int, p: int) -> np.ndarray:
    """Standard unit rows completing ``basis`` (any spanning rows) to F_p^n."""
    if n == 0:
        return eye(0)
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, n)
    _, piv = rref(basis, p) if basis.shape[0] else (None, [])
    taken = set(piv)
    return eye(n)[[c for c in range(n) if c not in taken]]


def in_rowspace(v: np.ndarray, basis: np.ndarray, p: int) -> bool:
    return solve_left(basis, v.reshape(1, -1), p) is not None if basis.shape[0] else not np.any(v % p)


def independent_rows(m: np.ndarray, p: int) -> list[int]:
    """Indices of the greedily chosen (first-come) independent rows of ``m``."""
    m = np.asarray(m, dtype=np.int64)
    if m.shape[0] == 0 or m.shape[1] == 0:
        return []
    return rref(m.T, p)[1]


class Reducer:
    """Normal forms modulo a fixed subspace of row vectors.

    ``reduce(v)`` is linear and vanishes exactly on the subspace.
    """

    def __init__(self, rows: np.ndarray, p: int, n: int | None = None):
        rows = np.asarray(rows, dtype=np.int64)
        if n is not None:
            rows = rows.reshape(rows.shape[0] if rows.ndim == 2 and n == 0 else -1, n)
        self.p = p
        self.n = rows.shape[1]
        if rows.shape[0]:
            r, piv = rref(rows, p)
            self.basis = r[: len(piv)].copy()
        else:
            self.basis = rows.reshape(0, self.n)
            piv = []
        self.pivots = list(piv)
        self.dim = len(piv)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Reduce a vector or the rows of a matrix."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if not self.dim:
            return v
        if v.ndim == 1:
            return (v - v[self.pivots] @ self.basis) % self.p
        return (v - mul(v[:, self.pivots], self.basis, self.p)) % self.p

    def contains(self, v: np.ndarray) -> bool:
        return not np.any(self.reduce(v))
