import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdrep import linalg as la
from fdrep.ar import knit
from fdrep.decompose import isomorphic
from fdrep.homological import ext1_classes, is_projective
from fdrep.modules import hom_space, simple_module
from fdrep.morita import (
    Bimodule,
    BimoduleError,
    condition_report,
    dual_bimodule,
    dual_condition,
    hom_right_dual,
    l_equivalence_probe,
    matrix_algebra_2,
    morita_context,
    morita_type_check,
    natiso_check,
    nu_condition,
    regular_bimodule,
    simple_image_analysis,
    stable_dims_preserved,
    tensor_bimodules,
    tensor_k_bimodule,
    tensor_map,
    tensor_right,
    tensor_sequence,
    top_bimodule,
)
from fdrep.sequences import is_perfect
from fdrep.zoo import by_name

F3 = "F3[x]/(x^3)"


@pytest.fixture(scope="module")
def ctx():
    A = by_name(F3)
    B, M, N = morita_context(A)
    return A, B, M, N


def test_matrix_algebra(ctx):
    A, B, M, N = ctx
    assert B.dim == 4 * A.dim
    B.validate()
    assert matrix_algebra_2(A).dim == B.dim


def test_identity_bimodule():
    A = by_name(F3)
    I = regular_bimodule(A)
    r = morita_type_check(I)
    assert r["ok"]
    assert r["M_tensor_N"]["error_term_dims"] == [] and r["N_tensor_M"]["error_term_dims"] == []
    assert natiso_check(I)["ok"] and nu_condition(I)["ok"] and dual_condition(I)["ok"]
    for x in knit(A, 6).vertices:
        assert isomorphic(tensor_right(x, I), x)


def test_morita_context(ctx):
    A, B, M, N = ctx
    assert isomorphic(hom_right_dual(M).env, N.env)
    r = morita_type_check(M, N)
    assert r["ok"]
    assert r["M_tensor_N"]["error_term_dims"] == [] and r["N_tensor_M"]["error_term_dims"] == []
    assert natiso_check(M, N)["ok"]
    assert nu_condition(M)["ok"] and dual_condition(M)["ok"]
    si = simple_image_analysis(simple_module(A, 0), M)
    assert si["simple_plus_projective"] and si["indecomposable"]
    assert l_equivalence_probe(M)["verdict"] == "consistent"
    rep = condition_report(M)
    for key in ("ii", "iii", "iv", "v", "vii", "ext1_transfer"):
        assert rep[key]["ok"], key
    assert rep["iii_iff_iv"]


def test_tensor_k_fails():
    A = by_name("A2")
    K = tensor_k_bimodule(A)
    assert not morita_type_check(K)["ok"]
    assert not nu_condition(K)["ok"]
    assert not dual_condition(K)["ok"]
    # the natural isomorphism holds without hypotheses
    assert natiso_check(K)["ok"]
    assert l_equivalence_probe(K)["verdict"] == "refuted"


def test_top_bimodule_refuted():
    A = by_name("A2")
    r = l_equivalence_probe(top_bimodule(A))
    assert r["verdict"] == "refuted"


@pytest.mark.parametrize("name", ["A2", "Nak2", "F2[x]/(x^2)", "Kronecker"])
def test_regular_bimodule_conditions(name):
    I = regular_bimodule(by_name(name))
    assert morita_type_check(I)["ok"]
    assert nu_condition(I)["ok"] == dual_condition(I)["ok"]


def test_op_involution(ctx):
    A, B, M, N = ctx
    Mo = M.op()
    assert Mo.A.dim == B.dim and Mo.B.dim == A.dim
    assert np.array_equal(Mo.op().env.action, M.env.action)


def test_dual_bimodule_dimension(ctx):
    A, B, M, N = ctx
    D = dual_bimodule(M)
    assert D.dim == M.dim and D.A is B and D.B is A


def test_from_actions_rejects_noncommuting():
    A = by_name("A2")
    I = regular_bimodule(A)
    left = I.left.copy()
    right = I.right.copy()
    right = right[:, ::-1, :].copy()
    with pytest.raises(BimoduleError):
        Bimodule.from_actions(A, A, left, right)


def test_tensor_bimodules_associative_dims(ctx):
    A, B, M, N = ctx
    MN = tensor_bimodules(M, N)
    assert MN.dim == A.dim
    NM = tensor_bimodules(N, M)
    assert NM.dim == B.dim


@pytest.mark.parametrize("which", ["identity", "row"])
def test_tensor_functor_laws(ctx, which):
    A, B, M, N = ctx
    m = regular_bimodule(A) if which == "identity" else M
    vs = knit(A, 6).vertices
    p = A.p
    for x, y, z in itertools.product(vs, vs, vs):
        for f in hom_space(x, y)[:2]:
            for g in hom_space(y, z)[:2]:
                lhs = tensor_map(f.then(g), m).matrix
                rhs = la.mul(tensor_map(f, m).matrix, tensor_map(g, m).matrix, p)
                assert np.array_equal(lhs, rhs)
    for x in vs:
        assert np.array_equal(tensor_map(x.identity(), m).matrix, la.eye(tensor_right(x, m).dim))


@settings(max_examples=20)
@given(seed=st.integers(0, 2**31))
def test_tensor_exact_and_perfect_preserving(seed):
    A = by_name(F3)
    B, M, N = morita_context(A)
    vs = knit(A, 6).vertices
    rng = np.random.default_rng(seed)
    z, x = vs[rng.integers(len(vs))], vs[rng.integers(len(vs))]
    cls = ext1_classes(z, x)
    if not cls:
        return
    s = cls[rng.integers(len(cls))]
    t = tensor_sequence(s, M)
    t.certify()
    assert is_perfect(t) == is_perfect(s)


def test_stable_dims_preserved(ctx):
    A, B, M, N = ctx
    vs = knit(A, 6).vertices
    assert stable_dims_preserved(M, [(a, b) for a in vs for b in vs])["ok"]
    K = tensor_k_bimodule(by_name("A2"))
    vs2 = knit(by_name("A2"), 6).vertices
    assert not stable_dims_preserved(K, [(a, b) for a in vs2 for b in vs2])["ok"]


def test_simple_images_under_morita(ctx):
    A, B, M, N = ctx
    img = tensor_right(simple_module(A, 0), M)
    assert not is_projective(img)
    assert img.dim == 2
