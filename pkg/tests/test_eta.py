import itertools

import numpy as np
import pytest

from fdrep.ar import almost_split_starting, knit
from fdrep.decompose import decompose, isomorphic
from fdrep.eta import ChainError, TransportError, depth_hypothesis, eta_tilde, run_chain, transport
from fdrep.homological import ext1_classes, is_injective, is_projective
from fdrep.modules import principal_projective, simple_module
from fdrep.morita import morita_context, regular_bimodule
from fdrep.sequences import canonical_sequence, is_perfect, remove_split_summands
from fdrep.zoo import by_name, kronecker_chain1, kronecker_chain2
from helpers import split_seq


def summ(m):
    return sorted((b.dim_vector, k) for b, k in decompose(m).summands)


def test_eta_tilde_of_ar_sequence_splits():
    A = by_name("A3")
    for x in knit(A, 10).vertices:
        if is_injective(x) or is_projective(x):
            continue
        cs, _ = canonical_sequence(almost_split_starting(x).seq)
        tilde, v, ars, w = eta_tilde(cs)
        assert v.is_iso()
        rem = remove_split_summands(tilde)
        assert rem.seq.is_zero()


def test_chain_on_ar_sequence_is_immediate():
    A = by_name("A2")
    s = almost_split_starting(principal_projective(A, 1)).seq
    assert s.dims() == ((0, 1), (1, 1), (1, 0))
    ch = run_chain(s, 3, check_perfect=False)
    assert str(ch.status) == "TerminatedAlmostSplit(0)"
    assert ch.certificate is not None


def test_kronecker_chain1_prefix():
    ch = run_chain(kronecker_chain1(), 3)
    assert ch.status.kind == "BoundExceeded"
    for n, st in enumerate(ch.steps):
        e = st.eta
        assert summ(e.X) == [((n + 2, n + 3), n + 1)]
        want = sorted([((3, 3), 1)] + ([((n + 3, n + 4), n)] if n else []))
        assert summ(e.Y) == want
        assert summ(e.Z) == [((1, 0), 1)]
        assert is_perfect(e)


def test_kronecker_chain2_prefix():
    ch = run_chain(kronecker_chain2(), 3)
    for n, st in enumerate(ch.steps):
        e = st.eta
        assert summ(e.X) == [((n + 2, n + 3), 1)]
        assert summ(e.Y) == [((n + 3, n + 4), 1)]
        assert summ(e.Z) == [((1, 1), 1)]


def test_split_input_reported():
    A = by_name("A2")
    ch = run_chain(split_seq(simple_module(A, 1), simple_module(A, 0)), 3)
    assert ch.status.kind == "SplitInput"


def test_node_start_rejected():
    F = by_name("F2[x]/(x^2)")
    s = almost_split_starting(simple_module(F, 0)).seq
    with pytest.raises(ChainError):
        run_chain(s, 3)


def _finite_chains(name, limit=None):
    A = by_name(name)
    q = knit(A, 20)
    n = len(q.vertices)
    out = []
    for z, x in itertools.product(q.vertices, q.vertices):
        for s in ext1_classes(z, x):
            try:
                ch = run_chain(s, n * n)
            except ChainError:
                continue
            out.append((s, ch))
            if limit and len(out) >= limit:
                return out
    return out


@pytest.mark.parametrize("name", ["A3", "F3[x]/(x^3)"])
def test_chain_invariants_finite_type(name):
    from fdrep.ar import is_node, is_simple

    for s, ch in _finite_chains(name):
        if ch.status.kind == "SplitInput":
            continue
        assert ch.status.kind == "TerminatedAlmostSplit"
        for st in ch.steps:
            for b in decompose(st.eta.X).blocks:
                assert not (is_simple(b) and is_node(b))


def test_depth_hypothesis():
    r = depth_hypothesis(almost_split_starting(simple_module(by_name("A3"), 1)).seq, 10)
    assert r["all_finite"]
    assert all(e["depth"] == 1 for e in r["entries"])
    cs, _ = canonical_sequence(kronecker_chain1())
    r = depth_hypothesis(cs, 3)
    assert not r["all_finite"]


def test_transport_identity_and_morita():
    A = by_name("F3[x]/(x^3)")
    I = regular_bimodule(A)
    B, M, _ = morita_context(A)
    done = 0
    for s, ch in _finite_chains("F3[x]/(x^3)"):
        if ch.status.kind != "TerminatedAlmostSplit" or not is_perfect(s):
            continue
        r = transport(ch, I)
        assert r.matches_direct and is_perfect(r.seq)
        assert isomorphic(r.seq.Y, s.Y)
        r2 = transport(ch, M)
        assert r2.matches_direct and r2.stable_dims["ok"] and is_perfect(r2.seq)
        assert r2.seq.algebra is B and r2.seq.X.dim == 2 * s.X.dim
        done += 1
    assert done >= 2


def test_transport_rejects_unterminated():
    ch = run_chain(kronecker_chain1(), 1)
    with pytest.raises(TransportError):
        transport(ch, regular_bimodule(by_name("Kronecker")))
