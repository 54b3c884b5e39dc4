"""Small named algebras used by tests, examples and the CLI."""

from __future__ import annotations

from .algebra import Algebra, QuiverPresentation, from_quiver

__all__ = [
    "path_A2",
    "path_A3",
    "a3_rad2",
    "truncated_poly",
    "cyclic_nakayama_rad2",
    "kronecker",
    "zoo",
    "by_name",
    "kronecker_chain1",
    "kronecker_chain2",
]


def path_A2(p: int = 2) -> Algebra:
    return from_quiver(QuiverPresentation(p, ("1", "2"), (("a", "1", "2"),)), name="A2")


def path_A3(p: int = 2) -> Algebra:
    q = QuiverPresentation(p, ("1", "2", "3"), (("a", "1", "2"), ("b", "2", "3")))
    return from_quiver(q, name="A3")


def a3_rad2(p: int = 2) -> Algebra:
    """Linear A_3 with the composite of its two arrows set to zero."""
    q = QuiverPresentation(p, ("1", "2", "3"), (("a", "1", "2"), ("b", "2", "3")), (((1, ("a", "b")),),))
    return from_quiver(q, name="A3rad2")


def truncated_poly(p: int, n: int) -> Algebra:
    """F_p[x]/(x^n)."""
    q = QuiverPresentation(p, ("1",), (("x", "1", "1"),), (((1, ("x",) * n),),))
    return from_quiver(q, name=f"F{p}[x]/(x^{n})")


def cyclic_nakayama_rad2(p: int = 2) -> Algebra:
    """Two-cycle 1 -> 2 -> 1 with all length two paths zero."""
    q = QuiverPresentation(
        p,
        ("1", "2"),
        (("a", "1", "2"), ("b", "2", "1")),
        (((1, ("a", "b")),), ((1, ("b", "a")),)),
    )
    return from_quiver(q, name="Nak2")


def kronecker(p: int = 2) -> Algebra:
    q = QuiverPresentation(p, ("1", "2"), (("a", "1", "2"), ("b", "1", "2")))
    return from_quiver(q, name="Kronecker")


_BUILDERS = {
    "A2": lambda: path_A2(2),
    "A3": lambda: path_A3(2),
    "A3rad2": lambda: a3_rad2(2),
    "F2[x]/(x^2)": lambda: truncated_poly(2, 2),
    "F3[x]/(x^3)": lambda: truncated_poly(3, 3),
    "Nak2": lambda: cyclic_nakayama_rad2(2),
    "Kronecker": lambda: kronecker(2),
}
_CACHE: dict[str, Algebra] = {}


def by_name(name: str) -> Algebra:
    """Shared instance of a zoo algebra (caches are reused across calls)."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown zoo algebra {name!r}; choose from {sorted(_BUILDERS)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


def zoo() -> dict[str, Algebra]:
    return {n: by_name(n) for n in _BUILDERS}


# --- Kronecker example sequences ---------------------------------------------


def _shift(n: int) -> list[list[int]]:
    return [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)]


def _ses_from_sub(y, rows):
    from .modules import quotient, submodule
    from .sequences import ShortExactSeq

    x, inc = submodule(y, rows)
    z, proj = quotient(y, inc.matrix)
    return ShortExactSeq(inc, proj)


def kronecker_chain1(A: Algebra | None = None):
    """0 -> (2,3) -> (3,3) -> (1,0) -> 0 with (3,3) regular (a = 1, b nilpotent)."""
    from .modules import from_representation

    A = A or by_name("Kronecker")
    eye3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    y = from_representation(A, [3, 3], {"a": eye3, "b": _shift(3)})
    # vertex 1 sits in coordinates 0..2, vertex 2 in 3..5
    rows = [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]]
    return _ses_from_sub(y, rows)


def kronecker_chain2(A: Algebra | None = None):
    """0 -> (2,3) -> (3,4) -> (1,1) -> 0 with an irreducible first map."""
    from .modules import from_representation

    A = A or by_name("Kronecker")
    a = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
    b = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    y = from_representation(A, [3, 4], {"a": a, "b": b})
    rows = [[1 if j == i else 0 for j in range(7)] for i in (0, 1, 3, 4, 5)]
    return _ses_from_sub(y, rows)
