import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdrep import linalg as la
from fdrep.algebra import AlgebraError, QuiverPresentation, dominant_dimension_at_least_one, envelope, from_quiver, opposite
from fdrep.decompose import decompose
from fdrep.homological import indecomposable_projectives
from fdrep.modules import Module, regular_module
from fdrep.zoo import by_name, zoo

ZOO = sorted(zoo())


def _proj_dims(A):
    return sorted(P.dim_vector for P in indecomposable_projectives(A))


@pytest.mark.parametrize("name", ZOO)
def test_zoo_associative_unital(name):
    A = by_name(name)
    A.validate()
    p = A.p
    one = A.unit
    for i in range(A.dim):
        e = A.basis_vector(i)
        assert np.array_equal(A.mult(one, e), e)
        assert np.array_equal(A.mult(e, one), e)


@pytest.mark.parametrize("name", ZOO)
def test_radical_nilpotent_and_top_semisimple(name):
    A = by_name(name)
    assert A.radical_power(A.dim + 1).shape[0] == 0
    top = [b for b, _ in decompose(regular_module(A)).summands]
    assert len(top) == A.n_vertices


def test_kronecker_dims():
    K = by_name("Kronecker")
    assert K.dim == 4
    assert _proj_dims(K) == [(0, 1), (1, 2)]


def test_point_algebra():
    A = from_quiver(QuiverPresentation(5, ("1",)))
    assert A.dim == 1 and A.p == 5


def test_rad_square_zero_a3_dim():
    assert by_name("A3rad2").dim == 5


def test_opposite_involution_and_reversal():
    A = by_name("A2")
    assert opposite(opposite(A)) is A
    assert _proj_dims(A) == [(0, 1), (1, 1)]
    assert _proj_dims(opposite(A)) == [(1, 0), (1, 1)]
    rev = from_quiver(A.quiver.reversed())
    assert _proj_dims(rev) == _proj_dims(opposite(A))


def test_opposite_commutative():
    A = by_name("F3[x]/(x^3)")
    assert A.is_commutative()
    assert np.array_equal(opposite(A).const % 3, A.const % 3)


@pytest.mark.parametrize("name", ["A2", "Kronecker", "F2[x]/(x^2)"])
def test_envelope_dims(name):
    A = by_name(name)
    E = envelope(A, A)
    assert E.dim == A.dim**2
    assert len(E.idempotents) == A.n_vertices**2
    E.validate()


def test_envelope_with_field():
    B = by_name("A2")
    F = from_quiver(QuiverPresentation(2, ("1",)))
    E = envelope(F, B)
    assert E.dim == B.dim
    assert np.array_equal(E.const, B.const)


@given(st.integers(0, 2**31))
def test_envelope_restriction_recovers_actions(seed):
    """A random bimodule (direct sums of regular pieces with a random basis
    change) restricts along A^op and B to its two one-sided actions."""
    from fdrep.morita import Bimodule, regular_bimodule

    A = by_name("A2")
    R = regular_bimodule(A)
    rng = np.random.default_rng(seed)
    n = R.env.dim
    while True:
        T = rng.integers(0, 2, (n, n))
        if la.rank(T, 2) == n:
            break
    Ti = la.inverse(T, 2)
    act = np.einsum("ra,iab,bs->irs", T, R.env.action, Ti) % 2
    M = Bimodule(A, A, Module(R.env.algebra, act))
    E = M.env.algebra
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = M.env.act(E.basis_vector(i * A.dim + j))
            assert np.array_equal(lhs, la.mul(M.left[i], M.right[j], 2))
    ea = np.zeros(A.dim, dtype=np.int64)
    one = A.unit
    for i in range(A.dim):
        e = np.kron(A.basis_vector(i), one)
        assert np.array_equal(M.env.act(e), M.left[i])
        e = np.kron(one, A.basis_vector(i))
        assert np.array_equal(M.env.act(e), M.right[i])
    del ea


@pytest.mark.parametrize(
    "name,expected",
    [("F2[x]/(x^2)", True), ("Kronecker", False), ("Nak2", True), ("A2", True), ("A3rad2", True)],
)
def test_dominant_dimension(name, expected):
    assert dominant_dimension_at_least_one(by_name(name)) is expected


def test_bad_quiver_rejected():
    with pytest.raises(AlgebraError):
        QuiverPresentation(4, ("1",))
    with pytest.raises(AlgebraError):
        QuiverPresentation(2, ("1", "1"))
    with pytest.raises(AlgebraError):
        QuiverPresentation(2, ("1",), (("x", "1", "2"),))


def test_infinite_dimensional_rejected():
    q = QuiverPresentation(2, ("1",), (("x", "1", "1"),))
    with pytest.raises(AlgebraError):
        from_quiver(q, max_degree=8)
