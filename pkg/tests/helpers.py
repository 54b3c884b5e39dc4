"""Shared generators for the property and acceptance suites."""

from __future__ import annotations

import itertools

import numpy as np

from fdrep import linalg as la
from fdrep.ar import almost_split_starting, knit, tau
from fdrep.decompose import find_iso
from fdrep.homological import ext1_basis, hom_matrices, is_injective, is_projective, realize_extension
from fdrep.modules import ModuleHom, direct_sum
from fdrep.sequences import (
    ShortExactSeq,
    is_perfect,
    merge_left,
    merge_right,
    splice_snake_1,
    splice_snake_2,
)
from fdrep.zoo import by_name

ZOO = ["A2", "A3", "A3rad2", "F2[x]/(x^2)", "F3[x]/(x^3)", "Nak2", "Kronecker"]
FINITE = ["A2", "A3", "A3rad2", "F2[x]/(x^2)", "F3[x]/(x^3)", "Nak2"]


def split_seq(x, z) -> ShortExactSeq:
    y = direct_sum(x, z)
    f = ModuleHom(x, y, np.hstack([la.eye(x.dim), la.zeros(x.dim, z.dim)]))
    g = ModuleHom(y, z, np.vstack([la.zeros(x.dim, z.dim), la.eye(z.dim)]))
    return ShortExactSeq(f, g)


def _factor(targets: np.ndarray, H: np.ndarray, want: np.ndarray, p: int):
    """c with sum_i c_i targets_i = want, mapped to sum_i c_i H_i."""
    if H.shape[0] == 0:
        return None
    c = la.solve_left(targets.reshape(H.shape[0], -1), want.reshape(1, -1), p)
    return None if c is None else la.tdot(c.ravel(), H, (0, 0), p)


def merge_instances(name: str, rng: np.random.Generator, count: int, knit_bound: int = 8, max_dim: int = 8):
    """Random (s, t, alpha, side) with t almost split.

    For non-split s starting at a non-injective indecomposable, f factors
    through the left almost split map (side "left"); dually g factors
    through the right almost split map ending at Z (side "right").
    """
    A = by_name(name)
    p = A.p
    verts = [v for v in knit(A, knit_bound).vertices if v.dim <= max_dim]
    out = []
    tries = 0
    while len(out) < count and tries < 60 * count:
        tries += 1
        x, z = verts[rng.integers(len(verts))], verts[rng.integers(len(verts))]
        basis, (om, inc, epi, _) = ext1_basis(z, x)
        if basis.shape[0] == 0:
            continue
        coeff = rng.integers(0, p, basis.shape[0])
        if not coeff.any():
            coeff[rng.integers(basis.shape[0])] = 1
        s = realize_extension(la.tdot(coeff, basis, (0, 0), p), om, inc, epi, x)
        if rng.integers(2) == 0:
            if is_injective(x):
                continue
            t = almost_split_starting(s.X).seq
            H = hom_matrices(t.Y, s.Y)
            a = _factor(la.bmul(t.f.matrix, H, p), H, s.f.matrix, p) if H.shape[0] else None
            if a is None:
                continue
            out.append((s, t, ModuleHom(t.Y, s.Y, a), "left"))
        else:
            if is_projective(z):
                continue
            t = almost_split_starting(tau(s.Z)).seq
            iso = find_iso(s.Z, t.Z)
            s = ShortExactSeq(s.f, ModuleHom(s.Y, t.Z, la.mul(s.g.matrix, iso, p)))
            H = hom_matrices(s.Y, t.Y)
            a = _factor(la.bmul(H, t.g.matrix, p), H, s.g.matrix, p) if H.shape[0] else None
            if a is None:
                continue
            out.append((s, t, ModuleHom(s.Y, t.Y, a), "right"))
    return out


def check_merge_instance(s, t, alpha, side) -> tuple[bool, str]:
    """Merge, then splice back with t; certify exactness, perfectness
    propagation and exact recovery of s."""
    p = s.p
    both = is_perfect(s) and is_perfect(t)
    if side == "left":
        out = merge_left(s, t, alpha)
        out.certify()
        if both and not is_perfect(out):
            return False, "merge_left lost perfectness"
        back = splice_snake_1(t, out)
    else:
        out = merge_right(s, t, alpha)
        out.certify()
        if both and not is_perfect(out):
            return False, "merge_right lost perfectness"
        # reorder the middle U (+) Y as Y (+) U for the second snake form
        nu = t.X.dim
        mid = direct_sum(s.Y, t.X)
        f2 = np.hstack([out.f.matrix[:, nu:], out.f.matrix[:, :nu]])
        g2 = np.vstack([out.g.matrix[nu:], out.g.matrix[:nu]])
        out = ShortExactSeq(ModuleHom(out.X, mid, f2, check=False), ModuleHom(mid, out.Z, g2, check=False))
        back = splice_snake_2(t, out)
    back.certify()
    if is_perfect(t) and is_perfect(out) and not is_perfect(back):
        return False, "splice lost perfectness"
    if not (np.array_equal(back.f.matrix % p, s.f.matrix % p) and np.array_equal(back.g.matrix % p, s.g.matrix % p)):
        return False, "splice does not recover s"
    return True, ""


def _sums(verts, max_sum: int) -> list:
    out = []
    for r in range(1, max_sum + 1):
        for combo in itertools.combinations_with_replacement(range(len(verts)), r):
            out.append(direct_sum(*[verts[i] for i in combo]) if r > 1 else verts[combo[0]])
    return out


def extension_universe(name: str, max_start: int = 3, max_end: int = 2, max_classes: int = 8, rng=None):
    """Extensions 0 -> X -> E -> Z -> 0 with X a sum of at most ``max_start``
    and Z a sum of at most ``max_end`` indecomposables; all nonzero classes
    when Ext^1 is small, otherwise ``max_classes`` random ones."""
    A = by_name(name)
    p = A.p
    rng = rng if rng is not None else np.random.default_rng(0)
    verts = knit(A, 20).vertices
    starts, ends = _sums(verts, max_start), _sums(verts, max_end)
    for x in starts:
        for z in ends:
            basis, (om, inc, epi, _) = ext1_basis(z, x)
            n = basis.shape[0]
            if n == 0:
                continue
            if p**n - 1 <= max_classes:
                coeffs = [np.array(c) for c in itertools.product(range(p), repeat=n) if any(c)]
            else:
                coeffs = []
                while len(coeffs) < max_classes:
                    c = rng.integers(0, p, n)
                    if c.any():
                        coeffs.append(c)
            for c in coeffs:
                yield realize_extension(la.tdot(c, basis, (0, 0), p), om, inc, epi, x)
