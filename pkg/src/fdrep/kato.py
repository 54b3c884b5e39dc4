"""Complexes of projectives on finite windows, Kato complexes, the category
L_A checked degreewise, Gorenstein projectives and Yoshino's sequence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .algebra import opposite
from .decompose import decompose, isomorphic
from .homological import (
    ext_dim,
    is_projective,
    minimal_resolution,
    projective_cover,
    projective_injectives,
    reflexive,
    star,
    star_basis,
    star_map,
    strip_projectives,
    syzygy,
    torsionless,
)
from .modules import (
    Module,
    ModuleError,
    ModuleHom,
    direct_sum,
    hom_matrices,
    quotient,
    regular_module,
    submodule,
    zero_module,
)

__all__ = [
    "ComplexWindow",
    "KatoComplex",
    "kato_complex",
    "cohomology",
    "cohomology_dim",
    "dual_homology_dim",
    "in_L_window",
    "shift_in_L",
    "GprojResult",
    "is_gorenstein_projective",
    "totally_acyclic_window",
    "yoshino_consequences",
    "perp_check",
    "random_window",
]


class WindowError(ValueError):
    pass


@dataclass
class ComplexWindow:
    """Terms F^lo .. F^hi with d^k: F^k -> F^{k+1} for lo <= k < hi."""

    lo: int
    hi: int
    terms: dict[int, Module]
    diffs: dict[int, ModuleHom]

    def __post_init__(self):
        if self.lo > self.hi:
            raise WindowError("empty window")
        for k in range(self.lo, self.hi):
            d = self.diffs[k]
            if d.source is not self.terms[k] or d.target is not self.terms[k + 1]:
                raise WindowError(f"d^{k} has the wrong source or target")
        for k in range(self.lo, self.hi - 1):
            p = self.terms[k].p
            if np.any(la.mul(self.diffs[k].matrix, self.diffs[k + 1].matrix, p)):
                raise WindowError(f"d^{k} d^{k + 1} != 0")

    @property
    def algebra(self):
        return self.terms[self.lo].algebra

    def certify_projective(self) -> bool:
        return all(is_projective(t) for t in self.terms.values())

    def shift(self, n: int) -> "ComplexWindow":
        """(F[n])^k = F^{k+n}; differentials negated for odd n."""
        sign = -1 if n % 2 else 1
        terms = {k - n: t for k, t in self.terms.items()}
        diffs = {
            k - n: ModuleHom(d.source, d.target, (sign * d.matrix) % d.p, check=False) for k, d in self.diffs.items()
        }
        return ComplexWindow(self.lo - n, self.hi - n, terms, diffs)

    def dual(self) -> dict:
        """(F^k)* and (d^k)*: (F^{k+1})* -> (F^k)*."""
        if "_dual" not in self.__dict__:
            self.__dict__["_dual"] = (
                {k: star(t) for k, t in self.terms.items()},
                {k: star_map(d) for k, d in self.diffs.items()},
            )
        return self.__dict__["_dual"]

    def to_json(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "terms": {str(k): list(t.dim_vector) for k, t in sorted(self.terms.items())},
            "differentials": {str(k): d.matrix.tolist() for k, d in sorted(self.diffs.items())},
        }


def _rank(m: np.ndarray, p: int) -> int:
    return la.rank(m, p) if m.size else 0


def cohomology_dim(c: ComplexWindow, k: int) -> int:
    """dim_k H^k(c) for lo < k < hi."""
    if not c.lo < k < c.hi:
        raise WindowError(f"degree {k} is not interior to [{c.lo}, {c.hi}]")
    p = c.terms[k].p
    n = c.terms[k].dim
    return n - _rank(c.diffs[k].matrix, p) - _rank(c.diffs[k - 1].matrix, p)


def cohomology(c: ComplexWindow, k: int) -> Module:
    """H^k(c) = Ker d^k / Im d^{k-1} as a module."""
    if not c.lo < k < c.hi:
        raise WindowError(f"degree {k} is not interior to [{c.lo}, {c.hi}]")
    p = c.terms[k].p
    if c.terms[k].dim == 0:
        return c.terms[k]
    ker_rows = la.left_kernel(c.diffs[k].matrix, p)
    K, inc = submodule(c.terms[k], ker_rows)
    img = la.row_basis(c.diffs[k - 1].matrix, p)
    if K.dim == 0:
        return K
    coords = la.solve_left(inc.matrix, img, p) if img.shape[0] else la.zeros(0, K.dim)
    if coords is None:
        raise WindowError("image not inside kernel")
    H, _ = quotient(K, coords)
    return H


def dual_homology_dim(c: ComplexWindow, k: int) -> int:
    """dim H_k(c*) = dim Ker (d^{k-1})* - rank (d^k)* at (F^k)*, lo < k < hi."""
    if not c.lo < k < c.hi:
        raise WindowError(f"degree {k} is not interior to [{c.lo}, {c.hi}]")
    terms, diffs = c.dual()
    p = c.terms[k].p
    n = terms[k].dim
    return n - _rank(diffs[k - 1].matrix, p) - _rank(diffs[k].matrix, p)


# --- Kato complexes ----------------------------------------------------------------


def _eval_map(x: Module) -> ModuleHom:
    """Evaluation x -> x**."""
    p = x.p
    xs = star(x)
    xss = star(xs)
    H = star_basis(x)  # (k, n, d): basis of x*
    H2 = star_basis(xs)  # (m, k, d): basis of x**
    if H.shape[0] == 0 or H2.shape[0] == 0:
        return ModuleHom(x, xss, la.zeros(x.dim, xss.dim), check=False)
    # ev(v) has rows v @ H_k
    ev = np.transpose(H, (1, 0, 2))  # (n, k, d)
    coords = la.solve_left(H2.reshape(H2.shape[0], -1), ev.reshape(x.dim, -1), p)
    if coords is None:
        raise ModuleError("evaluation map does not land in x**")
    return ModuleHom(x, xss, coords, check=False)


@dataclass
class KatoComplex:
    window: ComplexWindow
    base: Module
    certificates: dict = field(default_factory=dict)


def kato_complex(x: Module, lo: int = -3, hi: int = 3) -> KatoComplex:
    """F_x on [lo, hi]: the minimal resolution of x in degrees <= 0 spliced
    with the dual of the minimal resolution of x* in degrees >= 1."""
    if not lo <= 0 <= hi:
        raise WindowError("window must contain degree 0")
    A, p = x.algebra, x.p
    terms: dict[int, Module] = {}
    diffs: dict[int, ModuleHom] = {}
    left = minimal_resolution(x, max(0, -lo))
    cover = left[0]
    terms[0] = cover.source
    for j in range(1, -lo + 1):
        d = left[j]  # P_j -> P_{j-1}
        terms[-j] = d.source
        diffs[-j] = d
    xs = star(x)
    if hi >= 1:
        right = minimal_resolution(xs, max(0, hi - 1))
        qcov = right[0]  # Q_1 -> x*
        dual_cover = star_map(qcov)  # x** -> Q_1*
        terms[1] = dual_cover.target
        d0 = la.mul(la.mul(cover.matrix, _eval_map(x).matrix, p), dual_cover.matrix, p)
        diffs[0] = ModuleHom(terms[0], terms[1], d0, check=False)
        for j in range(2, hi + 1):
            dq = star_map(right[j - 1])  # Q_{j-1}* -> Q_j*
            if dq.source is not terms[j - 1]:
                dq = ModuleHom(terms[j - 1], dq.target, dq.matrix, check=False)
            terms[j] = dq.target
            diffs[j - 1] = dq
    w = ComplexWindow(lo, hi, terms, diffs)
    cert = {"projective_terms": w.certify_projective(), "h0_truncation_dim": cover.target.dim}
    return KatoComplex(w, x, cert)


def in_L_window(c: ComplexWindow) -> dict:
    """H^k(c) = 0 for interior k < 0 and H_k(c*) = 0 for interior k >= 0."""
    viol, checked, unchecked = [], [], []
    for k in range(c.lo, c.hi + 1):
        interior = c.lo < k < c.hi
        side = "cohomology" if k < 0 else "dual"
        if not interior:
            unchecked.append([k, side])
            continue
        dim = cohomology_dim(c, k) if k < 0 else dual_homology_dim(c, k)
        checked.append([k, side])
        if dim:
            viol.append({"degree": k, "side": side, "dim": dim})
    return {"ok": not viol, "violations": viol, "checked": checked, "unchecked": unchecked}


def shift_in_L(x: Module, k: int) -> bool:
    """Whether F_x[k] lies in L_A, for k = +1 or -1.

    k = -1 reduces to Ext^1(x, A) = 0 (only H_{-1}(F*) is new);
    k = +1 reduces to H^0(F_x) = 0, i.e. x torsionless.  Both are
    cross-checked against the window computation.
    """
    if k not in (1, -1):
        raise ValueError("shift must be +1 or -1")
    F = kato_complex(x, -2, 2).window
    R = regular_module(x.algebra)
    if k == -1:
        closed = ext_dim(x, R, 1) == 0
        window = dual_homology_dim(F, -1) == 0
    else:
        closed = torsionless(x)
        window = cohomology_dim(F, 0) == 0
    if closed != window:
        raise WindowError("closed form and window computation disagree")
    return closed


# --- Gorenstein projectives ---------------------------------------------------------


@dataclass
class GprojResult:
    verdict: str  # Yes | No | Unknown
    certificate: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict == "Yes"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, **self.certificate}


def _omega_cycle(x: Module, bound: int) -> tuple[int, int] | None:
    """(i, j) with Omega^i x ~ Omega^j x, i < j <= bound, projectives stripped."""
    seen = [strip_projectives(x)]
    cur = seen[0]
    for j in range(1, bound + 1):
        if cur.dim == 0:
            return (j - 1, j - 1)
        cur = strip_projectives(syzygy(cur)[0])
        for i, m in enumerate(seen):
            if isomorphic(m, cur):
                return (i, j)
        seen.append(cur)
    return None


def _ext_side(x: Module, bound: int) -> int | None:
    R = regular_module(x.algebra)
    for i in range(1, bound + 1):
        if ext_dim(x, R, i):
            return i
    return None


def is_gorenstein_projective(x: Module, bound: int = 6) -> GprojResult:
    """Yes when Ext^i(x, A) and Ext^i(x*, A) vanish, x is reflexive and both
    syzygy orbits cycle within ``bound``; No with a witness; Unknown otherwise."""
    if is_projective(x):
        return GprojResult("Yes", {"reason": "projective"})
    bad = _ext_side(x, bound)
    if bad is not None:
        return GprojResult("No", {"witness": f"Ext^{bad}(x, A) != 0"})
    if not reflexive(x):
        return GprojResult("No", {"witness": "x -> x** is not an isomorphism"})
    xs = star(x)
    bad = _ext_side(xs, bound)
    if bad is not None:
        return GprojResult("No", {"witness": f"Ext^{bad}(x*, A) != 0"})
    cyc = _omega_cycle(x, bound)
    cyc_s = _omega_cycle(xs, bound)
    if cyc is not None and cyc_s is not None and cyc[1] <= bound and cyc_s[1] <= bound:
        return GprojResult("Yes", {"omega_cycle": list(cyc), "dual_omega_cycle": list(cyc_s), "bound": bound})
    return GprojResult("Unknown", {"bound": bound})


def totally_acyclic_window(c: ComplexWindow) -> bool:
    for k in range(c.lo + 1, c.hi):
        if cohomology_dim(c, k) or dual_homology_dim(c, k):
            return False
    return True


# --- Yoshino -----------------------------------------------------------------------


def _hom_complex_maps(c: ComplexWindow, m: Module, k: int):
    """Bases of Hom(F^k, m) and the induced maps from degree k+1 and to k-1."""
    p = m.p
    Hk = hom_matrices(c.terms[k], m)
    Hk1 = hom_matrices(c.terms[k + 1], m)
    out_down = la.bmul(c.diffs[k - 1].matrix, Hk, p).reshape(Hk.shape[0], -1) if Hk.shape[0] else None
    into = la.bmul(c.diffs[k].matrix, Hk1, p) if Hk1.shape[0] else None
    return Hk, out_down, into


def hom_complex_cohomology_dim(c: ComplexWindow, m: Module, k: int) -> int:
    """dim H^k(Hom(c, m)) = dim Ker Hom(d^{k-1}, m) - rank Hom(d^k, m)."""
    if not c.lo < k < c.hi:
        raise WindowError(f"degree {k} is not interior to [{c.lo}, {c.hi}]")
    p = m.p
    Hk, down, into = _hom_complex_maps(c, m, k)
    if Hk.shape[0] == 0:
        return 0
    ker = Hk.shape[0] - (_rank(down, p) if down is not None else 0)
    img = 0
    if into is not None:
        coords = la.solve_left(Hk.reshape(Hk.shape[0], -1), into.reshape(into.shape[0], -1), p)
        img = _rank(coords, p)
    return ker - img


def yoshino_consequences(c: ComplexWindow, m: Module, k: int) -> dict:
    """Dimension consequences of 0 -> Ext^1(Cok d^k, m) -> H^k(Hom(F, m)) ->
    Hom(H^k F, m) -> Ext^2(Cok d^k, m)."""
    if not c.lo < k < c.hi:
        raise WindowError(f"degree {k} is not interior to [{c.lo}, {c.hi}]")
    p = m.p
    d = c.diffs[k]
    cok, _ = quotient(d.target, d.matrix) if d.target.dim else (d.target, None)
    e1 = ext_dim(cok, m, 1) if cok.dim else 0
    e2 = ext_dim(cok, m, 2) if cok.dim else 0
    h = hom_complex_cohomology_dim(c, m, k)
    Hk = cohomology(c, k)
    hom_h = len(hom_matrices(Hk, m)) if Hk.dim else 0
    out = {
        "degree": k,
        "ext1_cok": e1,
        "ext2_cok": e2,
        "h_hom": h,
        "hom_h": hom_h,
        "inequality": e1 <= h,
        "equality_if_hom_zero": (hom_h != 0) or e1 == h,
        "vanishing": bool(e1 or hom_h) or h == 0,
        "four_term_bound": h <= e1 + hom_h,
    }
    out["ok"] = bool(out["inequality"] and out["equality_if_hom_zero"] and out["vanishing"] and out["four_term_bound"])
    return out


def perp_check(c: ComplexWindow) -> bool:
    """Hom(H^k(c), Z) = 0 for interior k >= 0 and projective-injective Z."""
    pis = projective_injectives(c.algebra)
    if not pis:
        return True
    for k in range(max(0, c.lo + 1), c.hi):
        H = cohomology(c, k)
        if H.dim == 0:
            continue
        if any(len(hom_matrices(H, z)) for z in pis):
            return False
    return True


# --- fuzzing -----------------------------------------------------------------------


def random_window(A, lo: int, hi: int, rng: np.random.Generator, max_summands: int = 2) -> ComplexWindow:
    """Random complex of projectives with d^{k-1} d^k = 0, built degree by degree."""
    from .homological import indecomposable_projectives

    projs = indecomposable_projectives(A)
    p = A.p
    terms: dict[int, Module] = {}
    for k in range(lo, hi + 1):
        n = int(rng.integers(0, max_summands + 1))
        picks = sorted(rng.choice(len(projs), size=n).tolist()) if n else []
        terms[k] = direct_sum(*[projs[i] for i in picks]) if picks else zero_module(A)
    diffs: dict[int, ModuleHom] = {}
    prev = None
    for k in range(lo, hi):
        H = hom_matrices(terms[k], terms[k + 1])
        src, tgt = terms[k], terms[k + 1]
        if H.shape[0] == 0:
            mat = la.zeros(src.dim, tgt.dim)
        else:
            if prev is not None and prev.shape[0] and src.dim:
                cond = la.bmul(prev, H, p).reshape(H.shape[0], -1)
                sol = la.left_kernel(cond, p)
            else:
                sol = la.eye(H.shape[0])
            if sol.shape[0] == 0:
                mat = la.zeros(src.dim, tgt.dim)
            else:
                c = rng.integers(0, p, size=sol.shape[0])
                coeff = la.mul(c.reshape(1, -1), sol, p).ravel()
                mat = la.tdot(coeff, H, (0, 0), p)
        diffs[k] = ModuleHom(src, tgt, mat, check=False)
        prev = mat
    return ComplexWindow(lo, hi, terms, diffs)
