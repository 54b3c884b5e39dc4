"""JSON formats for algebras, modules, sequences, bimodules, windows and chains.

Matrices are row-major integer arrays; every document carries the
characteristic.  Algebra references inside other documents are either an
inline algebra document, a path to one (relative to the referencing file),
or ``"zoo:<name>"``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import Algebra, AlgebraError, QuiverPresentation, from_quiver
from .modules import Module, ModuleError, ModuleHom, from_representation, representation_data
from .sequences import SequenceError, ShortExactSeq

__all__ = [
    "FormatError",
    "algebra_to_json",
    "algebra_from_json",
    "module_to_json",
    "module_from_json",
    "sequence_to_json",
    "sequence_from_json",
    "bimodule_to_json",
    "bimodule_from_json",
    "window_to_json",
    "chain_to_json",
    "load_json",
    "dumps",
]


class FormatError(ValueError):
    """Malformed or inconsistent input document."""


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serializable: {type(o)}")


def load_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise FormatError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top level must be an object")
    doc.setdefault("_base", str(path.parent))
    return doc


def _mat(m) -> list:
    return np.asarray(m, dtype=np.int64).tolist()


def _arr(x, p: int, shape=None) -> np.ndarray:
    try:
        a = np.array(x, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise FormatError(f"expected an integer array: {e}") from e
    if shape is not None:
        try:
            a = a.reshape(shape)
        except ValueError as e:
            raise FormatError(f"array has the wrong shape, expected {shape}") from e
    return a % p


# --- algebras -----------------------------------------------------------------------


_LOADED: dict[str, Algebra] = {}


def algebra_to_json(A: Algebra) -> dict:
    if A.quiver is not None:
        q = A.quiver
        return {
            "char": A.p,
            "name": A.name,
            "quiver": {
                "vertices": list(q.vertices),
                "arrows": [{"name": n, "src": s, "tgt": t} for n, s, t in q.arrows],
                "relations": [[{"coeff": int(c), "path": list(path)} for c, path in rel] for rel in q.relations],
            },
        }
    return {
        "char": A.p,
        "name": A.name,
        "dim": A.dim,
        "structure_constants": _mat(A.const),
        "unit": _mat(A.unit),
        "idempotents": _mat(A.idempotents),
        "radical": _mat(A.radical),
        "labels": list(A.labels),
    }


def _resolve(ref, base: str | None) -> dict | str:
    if isinstance(ref, str):
        if ref.startswith("zoo:"):
            return ref
        path = Path(ref)
        if not path.is_absolute() and base:
            path = Path(base) / path
        return load_json(path)
    if isinstance(ref, dict):
        if base and "_base" not in ref:
            ref = dict(ref, _base=base)
        return ref
    raise FormatError("algebra reference must be an object, a path or 'zoo:<name>'")


_ZOO_KEYS: dict[str, str] = {}


def _zoo_keys() -> dict[str, str]:
    """Canonical documents of the zoo algebras, so files naming them share instances."""
    from .zoo import zoo

    if not _ZOO_KEYS:
        for name, A in zoo().items():
            _ZOO_KEYS[json.dumps(algebra_to_json(A), sort_keys=True)] = name
    return _ZOO_KEYS


def algebra_from_json(doc, base: str | None = None) -> Algebra:
    """Build (or reuse) the algebra described by doc.

    Identical documents give the identical Algebra object, so modules loaded
    from different files can be combined.
    """
    from .zoo import by_name

    doc = _resolve(doc, base)
    if isinstance(doc, str):
        try:
            return by_name(doc[4:])
        except KeyError as e:
            raise FormatError(str(e)) from e
    if "zoo" in doc:
        try:
            return by_name(doc["zoo"])
        except KeyError as e:
            raise FormatError(str(e)) from e
    if "matrix_algebra_2" in doc:
        from .morita import matrix_algebra_2

        inner = algebra_from_json(doc["matrix_algebra_2"], doc.get("_base"))
        key = f"M2:{id(inner)}"
        if key not in _LOADED:
            _LOADED[key] = matrix_algebra_2(inner)
        return _LOADED[key]
    clean = {k: v for k, v in doc.items() if not k.startswith("_")}
    key = json.dumps(clean, sort_keys=True)
    if key in _LOADED:
        return _LOADED[key]
    hit = _zoo_keys().get(key)
    if hit is not None:
        return by_name(hit)
    try:
        p = int(doc["char"])
        if "quiver" in doc:
            q = doc["quiver"]
            pres = QuiverPresentation(
                p,
                tuple(str(v) for v in q["vertices"]),
                tuple((a["name"], str(a["src"]), str(a["tgt"])) for a in q.get("arrows", [])),
                tuple(tuple((int(t["coeff"]), tuple(t["path"])) for t in rel) for rel in q.get("relations", [])),
            )
            A = from_quiver(pres, name=doc.get("name"))
        else:
            d = int(doc["dim"])
            A = Algebra(
                p,
                _arr(doc["structure_constants"], p, (d, d, d)),
                _arr(doc["unit"], p, (d,)),
                _arr(doc["idempotents"], p, (-1, d)),
                _arr(doc.get("radical", []), p, (-1, d)),
                doc.get("labels"),
                name=doc.get("name"),
            )
    except KeyError as e:
        raise FormatError(f"algebra document lacks the field {e}") from e
    except AlgebraError as e:
        raise FormatError(f"invalid algebra: {e}") from e
    _LOADED[key] = A
    return A


# --- modules ---------------------------------------------------------------------------


def module_to_json(x: Module, form: str = "action", with_algebra: bool = False) -> dict:
    """``form='action'`` keeps the basis; ``form='rep'`` uses quiver data
    in a vertex-adapted basis."""
    out: dict = {"char": x.p, "dim": x.dim, "dim_vector": list(x.dim_vector)}
    if form == "rep":
        dims, arrows = representation_data(x)
        out["dims"] = dims
        out["arrows"] = {k: _mat(v) for k, v in arrows.items()}
    else:
        out["action"] = _mat(x.action)
    if with_algebra:
        out["algebra"] = algebra_to_json(x.algebra)
    return out


def module_from_json(doc: dict, A: Algebra | None = None, base: str | None = None) -> Module:
    base = doc.get("_base", base)
    if A is None:
        if "algebra" not in doc:
            raise FormatError("module document needs an algebra")
        A = algebra_from_json(doc["algebra"], base)
    if "char" in doc and int(doc["char"]) != A.p:
        raise FormatError("module characteristic differs from the algebra")
    try:
        if "action" in doc:
            act = np.array(doc["action"], dtype=np.int64)
            if act.ndim != 3:
                n = int(doc.get("dim", 0))
                act = act.reshape(A.dim, n, n)
            return Module(A, act % A.p, name=doc.get("name"))
        if "dims" in doc:
            return from_representation(A, doc["dims"], doc.get("arrows", {}), name=doc.get("name"))
        if "simple" in doc or "projective" in doc:
            from .modules import principal_projective, simple_module

            v = doc.get("simple", doc.get("projective"))
            i = _vertex_index(A, v)
            return simple_module(A, i) if "simple" in doc else principal_projective(A, i)
    except (ModuleError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"invalid module: {e}") from e
    raise FormatError("module document needs 'action', 'dims' or 'simple'/'projective'")


def _vertex_index(A: Algebra, v) -> int:
    if A.quiver is not None and str(v) in A.quiver.vertices:
        return A.quiver.vertices.index(str(v))
    try:
        i = int(v)
    except (TypeError, ValueError) as e:
        raise FormatError(f"unknown vertex {v!r}") from e
    if not 0 <= i < A.n_vertices:
        raise FormatError(f"vertex index {i} out of range")
    return i


# --- sequences -------------------------------------------------------------------------


def sequence_to_json(s: ShortExactSeq, with_algebra: bool = True) -> dict:
    out = {
        "char": s.p,
        "X": module_to_json(s.X),
        "Y": module_to_json(s.Y),
        "Z": module_to_json(s.Z),
        "f": _mat(s.f.matrix),
        "g": _mat(s.g.matrix),
    }
    if with_algebra:
        out["algebra"] = algebra_to_json(s.algebra)
    return out


def sequence_from_json(doc: dict, A: Algebra | None = None, base: str | None = None) -> ShortExactSeq:
    base = doc.get("_base", base)
    if A is None:
        if "algebra" not in doc:
            raise FormatError("sequence document needs an algebra")
        A = algebra_from_json(doc["algebra"], base)
    if "example" in doc:
        from . import zoo

        ex = {"kronecker_chain1": zoo.kronecker_chain1, "kronecker_chain2": zoo.kronecker_chain2}
        if doc["example"] not in ex:
            raise FormatError(f"unknown example {doc['example']!r}")
        return ex[doc["example"]](A)
    try:
        X = module_from_json(doc["X"], A)
        Y = module_from_json(doc["Y"], A)
        Z = module_from_json(doc["Z"], A)
        f = ModuleHom(X, Y, _arr(doc["f"], A.p, (X.dim, Y.dim)))
        g = ModuleHom(Y, Z, _arr(doc["g"], A.p, (Y.dim, Z.dim)))
        return ShortExactSeq(f, g)
    except KeyError as e:
        raise FormatError(f"sequence document lacks the field {e}") from e
    except (ModuleError, SequenceError) as e:
        raise FormatError(f"invalid sequence: {e}") from e


# --- bimodules -------------------------------------------------------------------------


def bimodule_to_json(m) -> dict:
    return {
        "char": m.p,
        "A": algebra_to_json(m.A),
        "B": algebra_to_json(m.B),
        "dim": m.dim,
        "left": _mat(m.left),
        "right": _mat(m.right),
    }


def bimodule_from_json(doc: dict, base: str | None = None):
    """Bimodule from explicit actions, an envelope action, or a builtin.

    Builtins: ``regular``, ``dual``, ``top``, ``tensor_k``, ``morita_row``,
    ``morita_column``, ``hom_dual`` (of a nested ``of`` document).
    """
    from . import morita as mo
    from .algebra import envelope

    base = doc.get("_base", base)
    kind = doc.get("builtin")
    try:
        if kind is not None:
            if kind in ("morita_row", "morita_column"):
                A = algebra_from_json(doc["A"], base)
                B = algebra_from_json({"matrix_algebra_2": doc["A"]}, base)
                _, M, N = mo.morita_context(A, B)
                return M if kind == "morita_row" else N
            if kind == "hom_dual":
                return mo.hom_right_dual(bimodule_from_json(_resolve(doc["of"], base), base))
            A = algebra_from_json(doc["A"], base)
            if kind == "regular":
                return mo.regular_bimodule(A)
            if kind == "dual":
                return mo.dual_bimodule(mo.regular_bimodule(A))
            if kind == "top":
                return mo.top_bimodule(A)
            if kind == "tensor_k":
                return mo.tensor_k_bimodule(A)
            raise FormatError(f"unknown builtin bimodule {kind!r}")
        A = algebra_from_json(doc["A"], base)
        B = algebra_from_json(doc["B"], base)
        if "left" in doc:
            n = int(doc["dim"])
            return mo.Bimodule.from_actions(
                A, B, _arr(doc["left"], A.p, (A.dim, n, n)), _arr(doc["right"], A.p, (B.dim, n, n))
            )
        env = envelope(A, B)
        return mo.Bimodule(A, B, module_from_json(doc, env))
    except KeyError as e:
        raise FormatError(f"bimodule document lacks the field {e}") from e
    except mo.BimoduleError as e:
        raise FormatError(f"invalid bimodule: {e}") from e


# --- windows and chains --------------------------------------------------------------------


def window_to_json(c) -> dict:
    return {"char": c.algebra.p, **c.to_json()}


def chain_to_json(chain, with_matrices: bool = True) -> dict:
    steps = []
    for k, st in enumerate(chain.steps):
        row: dict = {"k": k, "eta": sequence_to_json(st.eta, with_algebra=False) if with_matrices else None}
        row["dims"] = [list(st.eta.X.dim_vector), list(st.eta.Y.dim_vector), list(st.eta.Z.dim_vector)]
        if with_matrices and st.v is not None:
            row["v"] = _mat(st.v.matrix)
            row["w"] = _mat(st.w)
            row["s"] = _mat(st.s.matrix)
            row["t"] = _mat(st.t.matrix)
        if with_matrices and st.removal is not None:
            row["pi"] = [_mat(h.matrix) for h in st.removal.projections]
        if not with_matrices:
            row.pop("eta")
        steps.append(row)
    out = {
        "char": chain.final.p,
        "status": chain.status.kind,
        "value": chain.status.value,
        "summary": chain.summary(),
        "steps": steps,
    }
    if chain.certificate is not None and with_matrices:
        out["certificate"] = {k: _mat(v) for k, v in chain.certificate.items()}
    return out
