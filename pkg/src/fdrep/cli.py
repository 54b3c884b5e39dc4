"""Command-line front end.

Exit codes: 0 success, 1 a mathematical "No" or violation, 2 input errors.
Output is deterministic JSON (default) or a plain table.
"""

from __future__ import annotations

import argparse
import hashlib
import io as _io
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .io import (
    FormatError,
    algebra_from_json,
    algebra_to_json,
    bimodule_from_json,
    chain_to_json,
    dumps,
    load_json,
    module_from_json,
    sequence_from_json,
    sequence_to_json,
    window_to_json,
)

__all__ = ["main", "run"]

EXIT_OK, EXIT_NO, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# --- helpers -------------------------------------------------------------------------------


def _dv(m) -> str:
    return "(" + ",".join(str(d) for d in m.dim_vector) + ")"


def _summands(m) -> list:
    from .decompose import decompose

    return [[list(b.dim_vector), mult] for b, mult in decompose(m).summands]


def _fmt_summands(rows) -> str:
    if not rows:
        return "0"
    parts = []
    for dv, mult in rows:
        s = "(" + ",".join(str(d) for d in dv) + ")"
        parts.append(s if mult == 1 else f"{s}^{mult}")
    return " + ".join(parts)


def _algebra(ref: str | None):
    if ref is None:
        raise InputError("--algebra is required")
    if ref.startswith("zoo:"):
        return algebra_from_json(ref)
    return algebra_from_json(load_json(ref))


def _vertex(A, v: str) -> int:
    from .io import _vertex_index

    return _vertex_index(A, v)


def _module(ref: str | None, A=None):
    """A module from a JSON file or one of simple:V, projective:V, injective:V."""
    from .homological import dualD
    from .modules import principal_projective, simple_module

    if ref is None:
        raise InputError("--module is required")
    kind, _, v = ref.partition(":")
    if kind in ("simple", "projective", "injective") and v:
        if A is None:
            raise InputError("--algebra is required for the shorthand module syntax")
        i = _vertex(A, v)
        if kind == "simple":
            return simple_module(A, i)
        if kind == "projective":
            return principal_projective(A, i)
        from .algebra import opposite

        return dualD(principal_projective(opposite(A), i))
    doc = load_json(ref)
    if A is None and "algebra" not in doc:
        raise InputError("module file names no algebra; pass --algebra")
    return module_from_json(doc, None if "algebra" in doc else A)


def _sequence(ref: str | None, A=None):
    if ref is None:
        raise InputError("--seq is required")
    doc = load_json(ref)
    return sequence_from_json(doc, None if "algebra" in doc else A)


def _bimodule(ref: str | None):
    if ref is None:
        raise InputError("a bimodule file is required")
    return bimodule_from_json(load_json(ref))


def _simple_name(A, s) -> str:
    i = s.dim_vector.index(1)
    name = A.quiver.vertices[i] if A.quiver is not None else str(i)
    return f"S_{name}"


# --- commands -------------------------------------------------------------------------------


def cmd_algebra(a) -> tuple[dict, int]:
    from .algebra import dominant_dimension_at_least_one

    A = _algebra(a.algebra)
    if a.action == "save":
        return algebra_to_json(A), EXIT_OK
    from .ar import nodes

    return {
        "name": A.name,
        "char": A.p,
        "dim": A.dim,
        "vertices": list(A.quiver.vertices) if A.quiver is not None else list(range(A.n_vertices)),
        "radical_dim": int(A.radical.shape[0]),
        "dominant_dimension_ge_1": dominant_dimension_at_least_one(A),
        "nodes": [_simple_name(A, s) for s in nodes(A)],
    }, EXIT_OK


def cmd_module(a) -> tuple[dict, int]:
    from .homological import is_injective, is_projective
    from .io import module_to_json

    A = _algebra(a.algebra) if a.algebra else None
    x = _module(a.module, A)
    if a.action == "save":
        return module_to_json(x, form=a.form, with_algebra=True), EXIT_OK
    return {
        "dim": x.dim,
        "dim_vector": list(x.dim_vector),
        "summands": _summands(x),
        "projective": is_projective(x),
        "injective": is_injective(x),
    }, EXIT_OK


def cmd_hom(a) -> tuple[dict, int]:
    from .homological import phom_dim, stable_hom_dim
    from .modules import hom_matrices

    A = _algebra(a.algebra) if a.algebra else None
    x = _module(a.source, A)
    y = _module(a.target, x.algebra)
    H = hom_matrices(x, y)
    out = {"dim": int(H.shape[0]), "projective_factoring_dim": phom_dim(x, y), "stable_dim": stable_hom_dim(x, y)}
    if a.basis:
        out["basis"] = H.tolist()
    return out, EXIT_OK


def cmd_ar(a) -> tuple[dict, int]:
    from .ar import almost_split_starting, knit, nodes, tau, tau_inv

    A = _algebra(a.algebra) if a.algebra else None
    if a.action == "knit":
        return knit(A, a.bound).to_json(), EXIT_OK
    if a.action == "nodes":
        return {"nodes": [_simple_name(A, s) for s in nodes(A)]}, EXIT_OK
    x = _module(a.module, A)
    if a.action == "tau":
        return {"tau": _summands(tau(x)), "tau_inv": _summands(tau_inv(x))}, EXIT_OK
    from .sequences import is_perfect

    ars = almost_split_starting(x)
    return {
        "start": list(ars.start.dim_vector),
        "middle": _summands(ars.middle),
        "end": list(ars.end.dim_vector),
        "perfect": is_perfect(ars.seq),
        "sequence": sequence_to_json(ars.seq, with_algebra=False) if a.matrices else None,
    }, EXIT_OK


def cmd_perfect(a) -> tuple[dict, int]:
    from .sequences import canonical_sequence, dual_sequence_exact, ext1_vanishing_equiv, is_perfect, remove_split_summands

    A = _algebra(a.algebra) if a.algebra else None
    if a.action == "ext1":
        x = _module(a.module, A)
        r = ext1_vanishing_equiv(x)
        return r, EXIT_OK if r["equivalent"] else EXIT_NO
    s = _sequence(a.seq, A)
    if a.action == "remove-split":
        rem = remove_split_summands(canonical_sequence(s)[0])
        return {
            "X": _summands(rem.seq.X),
            "Y": _summands(rem.seq.Y),
            "Z": _summands(rem.seq.Z),
            "removed_left": len(rem.removed_left),
            "removed_right": len(rem.removed_right),
            "sequence": sequence_to_json(rem.seq) if a.matrices else None,
        }, EXIT_OK
    perf = is_perfect(s)
    return {
        "perfect": perf,
        "dual_exact": dual_sequence_exact(s),
        "X": _summands(s.X),
        "Y": _summands(s.Y),
        "Z": _summands(s.Z),
        "certificate": s.certify(),
    }, EXIT_OK if perf else EXIT_NO


def cmd_eta(a) -> tuple[dict, int]:
    from .eta import ChainError, TransportError, run_chain, transport

    A = _algebra(a.algebra) if a.algebra else None
    s = _sequence(a.seq, A)
    try:
        chain = run_chain(s, bound=a.bound)
    except ChainError as e:
        return {"error": str(e), "status": "HypothesisViolated"}, EXIT_NO
    if a.action == "run":
        out = chain_to_json(chain, with_matrices=a.matrices)
        out["almost_split"] = [
            chain.status.kind == "TerminatedAlmostSplit" and k == chain.status.value for k in range(len(chain.steps))
        ]
        return out, EXIT_OK if chain.status.kind != "SplitInput" else EXIT_NO
    m = _bimodule(a.bimodule)
    try:
        r = transport(chain, m)
    except TransportError as e:
        return {"error": str(e), "degree": e.degree}, EXIT_NO
    out = r.to_json()
    if a.matrices:
        out["sequence"] = sequence_to_json(r.seq)
    return out, EXIT_OK if r.matches_direct else EXIT_NO


def cmd_kato(a) -> tuple[dict, int]:
    from .kato import in_L_window, kato_complex

    A = _algebra(a.algebra) if a.algebra else None
    x = _module(a.module, A)
    kc = kato_complex(x, a.lo, a.hi)
    if a.action == "window":
        return {"window": window_to_json(kc.window), "certificates": kc.certificates}, EXIT_OK
    r = in_L_window(kc.window)
    r["projective_terms"] = kc.window.certify_projective()
    return r, EXIT_OK if r["ok"] and r["projective_terms"] else EXIT_NO


def cmd_gproj(a) -> tuple[dict, int]:
    from .kato import is_gorenstein_projective

    A = _algebra(a.algebra) if a.algebra else None
    x = _module(a.module, A)
    r = is_gorenstein_projective(x, a.bound)
    return r.to_json(), EXIT_NO if r.verdict == "No" else EXIT_OK


def cmd_morita(a) -> tuple[dict, int]:
    from . import morita as mo

    m = _bimodule(a.m)
    if a.action == "check":
        n = _bimodule(a.n) if a.n else None
        r = mo.morita_type_check(m, n)
        return r, EXIT_OK if r["ok"] else EXIT_NO
    if a.action == "simple-images":
        from .modules import simple_module

        rows = [mo.simple_image_analysis(simple_module(m.A, i), m) for i in range(m.A.n_vertices)]
        return {"simple_images": rows}, EXIT_OK
    if a.action == "probe":
        r = mo.l_equivalence_probe(m, window=(a.lo, a.hi))
        return r, EXIT_NO if r["verdict"] in ("contradiction", "refuted") else EXIT_OK
    mods = [_module(f, m.A) for f in a.modules] if a.modules else None
    r = mo.condition_report(m, mods, window=(a.lo, a.hi))
    return r, EXIT_OK


def cmd_depth(a) -> tuple[dict, int]:
    from .eta import depth_hypothesis

    A = _algebra(a.algebra) if a.algebra else None
    s = _sequence(a.seq, A)
    r = depth_hypothesis(s, a.bound)
    return r, EXIT_OK if r["all_finite"] else EXIT_NO


# --- table output -------------------------------------------------------------------------


def _table(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if "summary" in obj and isinstance(obj["summary"], list):
            lines = [f"{pad}status: {obj.get('status')} {obj.get('value')}"]
            lines.append(f"{pad}{'k':>3}  {'X':<24} {'Y':<32} {'Z':<12}")
            for row in obj["summary"]:
                lines.append(
                    f"{pad}{row['k']:>3}  {_fmt_summands(row['X']):<24} {_fmt_summands(row['Y']):<32} {_fmt_summands(row['Z']):<12}"
                )
            return "\n".join(lines)
        lines = []
        for k, v in obj.items():
            if v is None:
                continue
            if isinstance(v, (dict, list)) and v and isinstance(v, dict):
                lines.append(f"{pad}{k}:")
                lines.append(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True, default=str)}")
        return "\n".join(lines)
    return pad + json.dumps(obj, default=str)


# --- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--table", dest="fmt", action="store_const", const="table", help="plain table output")
    common.add_argument("--seed", type=int, default=None, help="decomposition seed (overrides FDREP_SEED)")
    common.add_argument("--out", default=None, help="write output to this file")
    common.add_argument("--log", default=None, help="append this invocation to a session log")
    common.add_argument("--algebra", default=None, help="algebra JSON file or zoo:<name>")

    ap = argparse.ArgumentParser(prog="fdrep", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fdrep {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("algebra", parents=[common], help="algebra summary or canonical JSON")
    p.add_argument("action", choices=["info", "save"])
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("module", parents=[common], help="module summary or JSON")
    p.add_argument("action", choices=["info", "save"])
    p.add_argument("--module", required=True)
    p.add_argument("--form", choices=["action", "rep"], default="action")
    p.set_defaults(func=cmd_module)

    p = sub.add_parser("hom", parents=[common], help="Hom and stable Hom dimensions")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--basis", action="store_true")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("ar", parents=[common], help="almost split sequences, knitting, nodes")
    p.add_argument("action", choices=["seq", "knit", "nodes", "tau"])
    p.add_argument("--module")
    p.add_argument("--bound", type=int, default=12)
    p.add_argument("--matrices", action="store_true")
    p.set_defaults(func=cmd_ar)

    p = sub.add_parser("perfect", parents=[common], help="perfect exact sequences")
    p.add_argument("action", choices=["check", "remove-split", "ext1"])
    p.add_argument("--seq")
    p.add_argument("--module")
    p.add_argument("--matrices", action="store_true")
    p.set_defaults(func=cmd_perfect)

    p = sub.add_parser("eta", parents=[common], help="eta-chain and transport")
    p.add_argument("action", choices=["run", "transport"])
    p.add_argument("--seq", required=True)
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--bimodule")
    p.add_argument("--matrices", action="store_true", help="include all intermediate matrices")
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("kato", parents=[common], help="Kato complexes and L membership")
    p.add_argument("action", choices=["window", "check-L"])
    p.add_argument("--module", required=True)
    p.add_argument("--lo", type=int, default=-3)
    p.add_argument("--hi", type=int, default=3)
    p.set_defaults(func=cmd_kato)

    p = sub.add_parser("gproj", parents=[common], help="Gorenstein-projective test")
    p.add_argument("--module", required=True)
    p.add_argument("--bound", type=int, default=6)
    p.set_defaults(func=cmd_gproj)

    p = sub.add_parser("morita", parents=[common], help="Morita-type checks")
    p.add_argument("action", choices=["check", "report", "simple-images", "probe"])
    p.add_argument("--m", required=True, help="A-B bimodule file")
    p.add_argument("--n", help="B-A bimodule file (default Hom_B(M, B))")
    p.add_argument("--modules", nargs="*", default=None)
    p.add_argument("--lo", type=int, default=-3)
    p.add_argument("--hi", type=int, default=3)
    p.set_defaults(func=cmd_morita)

    p = sub.add_parser("depth", parents=[common], help="depth hypothesis of a sequence")
    p.add_argument("--seq", required=True)
    p.add_argument("--bound", type=int, default=10)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("replay", parents=[common], help="re-run a session log and compare outputs")
    p.add_argument("logfile")
    p.set_defaults(func=None)
    return ap


# --- driver -----------------------------------------------------------------------------------


@contextmanager
def _seed_env(seed: int | None):
    old = os.environ.get("FDREP_SEED")
    if seed is not None:
        os.environ["FDREP_SEED"] = str(seed)
    try:
        yield
    finally:
        if seed is not None:
            if old is None:
                os.environ.pop("FDREP_SEED", None)
            else:
                os.environ["FDREP_SEED"] = old


def _strip_log(argv: list[str]) -> list[str]:
    out, skip = [], False
    for i, t in enumerate(argv):
        if skip:
            skip = False
            continue
        if t == "--log":
            skip = True
            continue
        if t.startswith("--log="):
            continue
        out.append(t)
    return out


def run(argv: list[str]) -> tuple[int, str]:
    """Execute one invocation; returns (exit code, output text)."""
    ap = build_parser()
    err = _io.StringIO()
    try:
        old_err, sys.stderr = sys.stderr, err
        try:
            a = ap.parse_args(argv)
        finally:
            sys.stderr = old_err
    except SystemExit as e:
        code = int(e.code or 0)
        return (EXIT_OK if code == 0 else EXIT_INPUT), err.getvalue()
    if a.cmd == "replay":
        return _replay(a.logfile)
    seed = a.seed
    with _seed_env(seed):
        from .decompose import default_seed

        try:
            payload, code = a.func(a)
        except (InputError, FormatError) as e:
            return EXIT_INPUT, dumps({"error": str(e)}) if a.fmt != "table" else f"error: {e}\n"
        except (ValueError, KeyError) as e:
            return EXIT_INPUT, dumps({"error": f"{type(e).__name__}: {e}"}) if a.fmt != "table" else f"error: {e}\n"
        payload = dict(payload)
        payload["meta"] = {"seed": default_seed(), "version": __version__, "command": a.cmd}
    text = _table(payload) + "\n" if a.fmt == "table" else dumps(payload)
    return code, text


def _replay(logfile: str) -> tuple[int, str]:
    path = Path(logfile)
    if not path.exists():
        return EXIT_INPUT, dumps({"error": f"no such log: {logfile}"})
    entries = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    for i, e in enumerate(entries):
        cwd = os.getcwd()
        try:
            if e.get("cwd"):
                os.chdir(e["cwd"])
            code, text = run(e["argv"])
        finally:
            os.chdir(cwd)
        if code != e["exit"] or hashlib.sha256(text.encode()).hexdigest() != e["sha256"]:
            return EXIT_NO, dumps({"ok": False, "first_divergence": i, "argv": e["argv"]})
    return EXIT_OK, dumps({"ok": True, "steps": len(entries)})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, text = run(argv)
    ns = _peek(argv)
    if ns.get("out"):
        Path(ns["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    if ns.get("log"):
        entry = {
            "argv": _strip_log(argv),
            "cwd": os.getcwd(),
            "exit": code,
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
        }
        with open(ns["log"], "a") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return code


def _peek(argv: list[str]) -> dict:
    out: dict = {}
    for i, t in enumerate(argv):
        for key in ("out", "log"):
            if t == f"--{key}" and i + 1 < len(argv):
                out[key] = argv[i + 1]
            elif t.startswith(f"--{key}="):
                out[key] = t.split("=", 1)[1]
    return out


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
