"""The eta-chain: reduce a perfect exact sequence to a sum of almost split
sequences, and transport the result along a tensor functor."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .ar import _ar_for_rep, depth, is_node, is_simple
from .decompose import decompose
from .homological import is_injective, is_projective
from .modules import Module, ModuleHom, _block_diag, direct_sum, hom_matrices, zero_module
from .sequences import (
    SequenceError,
    ShortExactSeq,
    SplitRemoval,
    canonical_sequence,
    is_perfect,
    merge_left,
    remove_split_summands,
)

__all__ = [
    "ChainError",
    "ChainStatus",
    "EtaStep",
    "EtaChain",
    "ar_sum_blocks",
    "eta_tilde",
    "almost_split_certificate",
    "run_chain",
    "depth_hypothesis",
    "TransportError",
    "TransportResult",
    "transport",
]


class ChainError(ValueError):
    """Hypothesis of the chain construction violated."""


@dataclass(frozen=True)
class ChainStatus:
    kind: str  # TerminatedAlmostSplit | BoundExceeded | SplitInput
    value: int | None = None

    def __str__(self) -> str:
        return self.kind if self.value is None else f"{self.kind}({self.value})"


@dataclass
class ARSum:
    """0 -> X -s-> E -t-> T -> 0 built blockwise over the summands of X."""

    seq: ShortExactSeq
    parts: list  # ARSequence per X-summand

    @property
    def s(self) -> ModuleHom:
        return self.seq.f

    @property
    def t(self) -> ModuleHom:
        return self.seq.g


def ar_sum_blocks(x: Module) -> ARSum:
    """Sum of almost split sequences over the registered summands of x.

    x must be in canonical block form; the maps are block diagonal.
    """
    dec = decompose(x)
    if dec.canonical is not x:
        raise ChainError("ar_sum_blocks expects a canonical block module")
    parts = []
    for b in dec.blocks:
        if is_injective(b):
            raise ChainError(f"summand {b.dim_vector} is injective")
        parts.append(_ar_for_rep(b))
    if not parts:
        z = zero_module(x.algebra)
        return ARSum(ShortExactSeq(ModuleHom(x, z, la.zeros(0, 0), check=False), ModuleHom(z, z, la.zeros(0, 0), check=False)), [])
    E = direct_sum(*[a.middle for a in parts])
    T = direct_sum(*[a.end for a in parts])
    s = ModuleHom(x, E, _block_diag([a.seq.f.matrix for a in parts]), check=False)
    t = ModuleHom(E, T, _block_diag([a.seq.g.matrix for a in parts]), check=False)
    return ARSum(ShortExactSeq(s, t, check=False), parts)


def _factor_tables(ars, yrep: Module):
    """Hom(E_a, Y_b) basis H and the flattened products s_a H, cached per pair."""
    A = yrep.algebra
    cache = A._cache.setdefault("eta_factor", {})
    key = (ars.start.canon_id, yrep.canon_id)
    if key not in cache:
        H = hom_matrices(ars.middle, yrep)
        p = yrep.p
        if H.shape[0]:
            S = la.bmul(ars.seq.f.matrix, H, p).reshape(H.shape[0], -1)
        else:
            S = la.zeros(0, ars.start.dim * yrep.dim)
        cache[key] = (H, S)
    return cache[key]


def _left_inverse(ars) -> np.ndarray:
    cache = ars.start.algebra._cache.setdefault("eta_tinv", {})
    k = ars.start.canon_id
    if k not in cache:
        t = ars.seq.g.matrix
        cache[k] = la.solve_left(t, la.eye(t.shape[1]), ars.start.p)
    return cache[k]


def _offsets(mods) -> list[int]:
    out, o = [], 0
    for m in mods:
        out.append(o)
        o += m.dim
    return out


def eta_tilde(eta: ShortExactSeq, arsum: ARSum | None = None) -> tuple[ShortExactSeq, ModuleHom, ARSum, np.ndarray]:
    """(tilde eta, v, AR sum, w) with f = s v and tilde eta = merge_left.

    eta must have canonical block terms.
    """
    p = eta.p
    X, Y = eta.X, eta.Y
    if arsum is None:
        arsum = ar_sum_blocks(X)
    ys = decompose(Y).blocks
    if decompose(Y).canonical is not Y:
        raise ChainError("eta_tilde expects canonical block terms")
    E = arsum.s.target
    xo = _offsets([a.start for a in arsum.parts])
    eo = _offsets([a.middle for a in arsum.parts])
    yo = _offsets(ys)
    V = np.zeros((E.dim, Y.dim), dtype=np.int64)
    F = eta.f.matrix
    for a, ars in enumerate(arsum.parts):
        xa = slice(xo[a], xo[a] + ars.start.dim)
        ea = slice(eo[a], eo[a] + ars.middle.dim)
        for b, yb in enumerate(ys):
            sl = slice(yo[b], yo[b] + yb.dim)
            target = F[xa, sl]
            if not np.any(target):
                continue
            H, S = _factor_tables(ars, yb)
            c = la.solve_left(S, target.reshape(1, -1), p) if S.shape[0] else None
            if c is None:
                raise ChainError("f does not factor through the almost split sum (split summand present)")
            V[ea, sl] = la.tdot(c.ravel(), H, (0, 0), p)
    v = ModuleHom(E, Y, V, check=False)
    rhs = (-la.mul(V, eta.g.matrix, p)) % p
    T = arsum.t.target
    to = _offsets([a.end for a in arsum.parts])
    W = np.zeros((T.dim, eta.Z.dim), dtype=np.int64)
    for a, ars in enumerate(arsum.parts):
        ea = slice(eo[a], eo[a] + ars.middle.dim)
        ta = slice(to[a], to[a] + ars.end.dim)
        W[ta] = la.mul(_left_inverse(ars), rhs[ea], p)
    tilde = merge_left(eta, arsum.seq, v, beta=W)
    return tilde, v, arsum, W


def almost_split_certificate(eta: ShortExactSeq, v: ModuleHom, arsum: ARSum) -> dict | None:
    """Isomorphism (id, v, chi) from the AR sum onto eta, when v is invertible.

    chi solves t chi = v g; returns None when eta is not isomorphic to the sum.
    """
    p = eta.p
    if v.source.dim != v.target.dim or la.rank(v.matrix, p) != v.source.dim:
        return None
    vg = la.mul(v.matrix, eta.g.matrix, p)
    chi = la.solve(arsum.t.matrix, vg, p)
    if chi is None or la.rank(chi, p) != chi.shape[0] or chi.shape[0] != chi.shape[1]:
        return None
    return {"v": v.matrix, "chi": chi}


@dataclass
class EtaStep:
    eta: ShortExactSeq
    tilde: ShortExactSeq | None = None
    arsum: ARSum | None = None
    v: ModuleHom | None = None
    w: np.ndarray | None = None
    removal: SplitRemoval | None = None

    @property
    def pi(self) -> ModuleHom | None:
        return None if self.removal is None else self.removal.projections[2]

    @property
    def s(self) -> ModuleHom | None:
        return None if self.arsum is None else self.arsum.s

    @property
    def t(self) -> ModuleHom | None:
        return None if self.arsum is None else self.arsum.t


@dataclass
class EtaChain:
    steps: list[EtaStep]
    status: ChainStatus
    certificate: dict | None = None
    input_iso: tuple | None = field(default=None, repr=False)

    @property
    def final(self) -> ShortExactSeq:
        return self.steps[-1].eta

    def summary(self) -> list[dict]:
        out = []
        for k, st in enumerate(self.steps):
            out.append(
                {
                    "k": k,
                    "X": _summand_list(st.eta.X),
                    "Y": _summand_list(st.eta.Y),
                    "Z": _summand_list(st.eta.Z),
                }
            )
        return out


def _summand_list(m: Module) -> list:
    return [[list(b.dim_vector), mult] for b, mult in decompose(m).summands]


def _node_witness(x: Module) -> Module | None:
    for b in decompose(x).blocks:
        if b.dim == 1 or (is_simple(b) if b.radical_rows.shape[0] == 0 else False):
            if is_simple(b) and is_node(b):
                return b
    return None


def run_chain(eta0: ShortExactSeq, bound: int = 10, check_perfect: bool = True) -> EtaChain:
    """Iterate eta_k -> eta_{k+1} until eta_l is a sum of almost split
    sequences (certified by an isomorphism of sequences) or k reaches bound."""
    cs, isos = canonical_sequence(eta0)
    rem = remove_split_summands(cs)
    if rem.removed_left or rem.removed_right:
        return EtaChain([EtaStep(cs)], ChainStatus("SplitInput"), None, isos)
    node = _node_witness(cs.X)
    if node is not None:
        raise ChainError(f"X_0 has the node {node.dim_vector} as a summand")
    steps: list[EtaStep] = []
    eta = cs
    for k in range(bound + 1):
        step = EtaStep(eta)
        steps.append(step)
        arsum = ar_sum_blocks(eta.X)
        tilde, v, arsum, w = eta_tilde(eta, arsum)
        step.tilde, step.v, step.arsum, step.w = tilde, v, arsum, w
        cert = almost_split_certificate(eta, v, arsum)
        if cert is not None:
            return EtaChain(steps, ChainStatus("TerminatedAlmostSplit", k), cert, isos)
        if check_perfect and not is_perfect(eta):
            raise ChainError(f"eta_{k} is not perfect exact")
        if k == bound:
            break
        step.removal = remove_split_summands(tilde)
        nxt = step.removal.seq
        if nxt.is_zero():
            raise ChainError("split tilde sequence without an invertible v")
        node = _node_witness(nxt.X)
        if node is not None:
            raise ChainError(f"X_{k + 1} has the node {node.dim_vector} as a summand")
        eta = nxt
    return EtaChain(steps, ChainStatus("BoundExceeded", bound), None, isos)


def depth_hypothesis(eta: ShortExactSeq, bound: int = 10) -> dict:
    """depth(f p) and depth(g pi) for projections onto indecomposable summands."""
    p = eta.p
    dy, dz = decompose(eta.Y), decompose(eta.Z)
    rows = []
    for kind, mod, dec, m in (("f", eta.X, dy, eta.f.matrix), ("g", eta.Y, dz, eta.g.matrix)):
        for b, proj in zip(dec.blocks, dec.projections):
            comp = ModuleHom(mod, b, la.mul(m, proj.matrix, p), check=False)
            d = depth(comp, bound)
            rows.append({"map": kind, "summand": list(b.dim_vector), **d.to_json()})
    return {
        "entries": rows,
        "all_finite": all(r["depth"] != "exceeded" for r in rows),
    }


# --- transport along a tensor functor ---------------------------------------------


class TransportError(ValueError):
    """Transport failed at a recorded degree."""

    def __init__(self, msg: str, degree: int | None = None):
        super().__init__(msg if degree is None else f"degree {degree}: {msg}")
        self.degree = degree


@dataclass
class TransportResult:
    seq: ShortExactSeq  # B-side sequence rebuilt down the chain
    reduced: ShortExactSeq  # same, canonical with split summands removed
    degrees: list[dict]
    direct: ShortExactSeq  # - (x) M applied to eta_0 directly
    matches_direct: bool
    stable_dims: dict

    def to_json(self) -> dict:
        return {
            "X": _summand_list(self.reduced.X),
            "Y": _summand_list(self.reduced.Y),
            "Z": _summand_list(self.reduced.Z),
            "perfect": is_perfect(self.seq),
            "matches_direct": self.matches_direct,
            "degrees": self.degrees,
            "stable_dims": self.stable_dims,
        }


def _b_side_ar_check(s: ShortExactSeq) -> bool:
    """Whether s, after removing split summands, is a certified sum of almost
    split sequences over B."""
    cs, _ = canonical_sequence(s)
    red = remove_split_summands(cs).seq
    if red.is_zero():
        return False
    for b in decompose(red.X).blocks:
        if is_projective(b) or is_injective(b):
            return False
    arsum = ar_sum_blocks(red.X)
    try:
        _, v, _, _ = eta_tilde(red, arsum)
    except (ChainError, SequenceError):
        return False
    return almost_split_certificate(red, v, arsum) is not None


def _nonprojective_multiset(x: Module) -> dict:
    out: dict = {}
    for b in decompose(x).blocks:
        if not is_projective(b):
            out[b.canon_id] = out.get(b.canon_id, 0) + 1
    return out


def _is_morphism(a: ShortExactSeq, b: ShortExactSeq, hx, hy, hz, p) -> bool:
    return np.array_equal(la.mul(a.f.matrix, hy, p), la.mul(hx, b.f.matrix, p)) and np.array_equal(
        la.mul(a.g.matrix, hz, p), la.mul(hy, b.g.matrix, p)
    )


def transport(chain: EtaChain, m) -> TransportResult:
    """Rebuild a perfect exact sequence over B from a terminated chain.

    Degree l: the image of eta_l must be a sum of almost split sequences
    over B (certified).  Degree k < l: the images of the almost split sum
    sigma_k and of tilde eta_k are spliced (snake lemma, first form); the
    recorded split-removal maps must induce a morphism onto the degree k+1
    result.  Every output is checked to be perfect exact.
    """
    from .homological import stably_zero
    from .morita import stable_dims_preserved, tensor_map, tensor_sequence
    from .sequences import splice_snake_1

    if chain.status.kind != "TerminatedAlmostSplit":
        raise TransportError(f"chain status is {chain.status}, expected TerminatedAlmostSplit")
    if not is_perfect(chain.steps[0].eta):
        raise TransportError("eta_0 is not perfect exact", 0)
    l = len(chain.steps) - 1
    degrees: list[dict] = [dict() for _ in range(l + 1)]
    final = chain.steps[l]
    cur = tensor_sequence(final.eta, m)
    if not _b_side_ar_check(cur):
        raise TransportError("image is not a sum of almost split sequences over B", l)
    if not is_perfect(cur):
        raise TransportError("image of eta_l is not perfect", l)
    degrees[l] = {"k": l, "ar_sum_certified": True, "perfect": True}
    for k in range(l - 1, -1, -1):
        st = chain.steps[k]
        p = st.eta.p
        sigma_b = tensor_sequence(st.arsum.seq, m)
        tilde_b = tensor_sequence(st.tilde, m)
        ar_ok = _b_side_ar_check(sigma_b)
        if not ar_ok:
            raise TransportError("image of the almost split sum is not almost split over B", k)
        hx, hy, hz = (tensor_map(h, m).matrix for h in st.removal.projections)
        if not _is_morphism(tilde_b, cur, hx, hy, hz, p):
            raise TransportError("recorded split removal does not map onto the next degree", k)
        nxt = splice_snake_1(sigma_b, tilde_b)
        if not is_perfect(nxt):
            raise TransportError("rebuilt sequence is not perfect", k)
        ff = tensor_map(st.eta.f, m)
        gg = tensor_map(st.eta.g, m)
        df = ModuleHom(nxt.X, nxt.Y, (nxt.f.matrix - ff.matrix) % p, check=False)
        dg = ModuleHom(nxt.Y, nxt.Z, (nxt.g.matrix - gg.matrix) % p, check=False)
        if not (stably_zero(df) and stably_zero(dg)):
            raise TransportError("rebuilt maps are not stably equal to the images", k)
        degrees[k] = {"k": k, "ar_sum_certified": True, "removal_morphism": True, "perfect": True, "stable_identity": True}
        cur = nxt
    direct = tensor_sequence(chain.steps[0].eta, m)
    matches = all(
        _nonprojective_multiset(a) == _nonprojective_multiset(b)
        for a, b in ((cur.X, direct.X), (cur.Y, direct.Y), (cur.Z, direct.Z))
    )
    eta0 = chain.steps[0].eta
    mods = [b for t in (eta0.X, eta0.Y, eta0.Z) for b in decompose(t).blocks]
    uniq = list({id(b): b for b in mods}.values())[:4]
    stable = stable_dims_preserved(m, [(a, b) for a in uniq for b in uniq])
    red = remove_split_summands(canonical_sequence(cur)[0]).seq
    return TransportResult(cur, red, degrees, direct, matches, stable)
