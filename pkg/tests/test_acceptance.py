"""Acceptance criteria 1-8.

Each criterion prints one ``CRITERION n PASS|FAIL`` line with its runtime.
The lines are also collected into the terminal summary (see conftest.py).
Run standalone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import FINITE, ZOO, check_merge_instance, extension_universe, merge_instances  # noqa: E402

from fdrep import io  # noqa: E402
from fdrep import linalg as la  # noqa: E402
from fdrep.ar import almost_split_starting, is_node, is_simple, knit  # noqa: E402
from fdrep.decompose import decompose  # noqa: E402
from fdrep.eta import almost_split_certificate, run_chain, transport  # noqa: E402
from fdrep.homological import is_injective, is_projective, syzygy  # noqa: E402
from fdrep.kato import is_gorenstein_projective, kato_complex, random_window, totally_acyclic_window, yoshino_consequences  # noqa: E402
from fdrep.morita import (  # noqa: E402
    dual_condition,
    l_equivalence_probe,
    morita_context,
    morita_type_check,
    natiso_check,
    nu_condition,
    regular_bimodule,
    simple_image_analysis,
    tensor_k_bimodule,
)
from fdrep.modules import simple_module  # noqa: E402
from fdrep.sequences import ext1_vanishing_equiv, is_perfect, remove_split_summands  # noqa: E402
from fdrep.zoo import by_name  # noqa: E402

DATA = Path(io.__file__).parent / "data"
RESULTS: dict[int, str] = {}


def summ(m):
    return sorted((b.dim_vector, k) for b, k in decompose(m).summands)


def record(n: int, ok: bool, elapsed: float, limit: float, detail: str) -> None:
    within = elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    line = f"CRITERION {n} {status} ({elapsed:.1f}s, limit {limit:.0f}s) {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line
    assert within, line


def _load_seq(name: str):
    return io.sequence_from_json(io.load_json(DATA / name), base=str(DATA))


# --- 1 -----------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    ch = run_chain(_load_seq("kronecker-eta0.json"), bound=8)
    errs = []
    if ch.status.kind != "BoundExceeded" or len(ch.steps) != 9:
        errs.append(f"status {ch.status}, {len(ch.steps)} steps")
    for n, st in enumerate(ch.steps):
        e = st.eta
        want_y = sorted([((3, 3), 1)] + ([((n + 3, n + 4), n)] if n else []))
        if summ(e.X) != [((n + 2, n + 3), n + 1)] or summ(e.Y) != want_y or summ(e.Z) != [((1, 0), 1)]:
            errs.append(f"eta_{n} terms {summ(e.X)} {summ(e.Y)} {summ(e.Z)}")
        if almost_split_certificate(e, st.v, st.arsum) is not None:
            errs.append(f"eta_{n} is almost split")
    return not errs, time.perf_counter() - t0, 30, "; ".join(errs) or "eta_0..eta_8 match, BoundExceeded, none almost split"


def test_criterion_1():
    record(1, *criterion_1())


# --- 2 -----------------------------------------------------------------------------


def criterion_2():
    t0 = time.perf_counter()
    ch = run_chain(_load_seq("kronecker-eta0-chain2.json"), bound=8)
    errs = []
    if len(ch.steps) != 9:
        errs.append(f"only {len(ch.steps)} steps ({ch.status})")
    for n, st in enumerate(ch.steps):
        e = st.eta
        if summ(e.X) != [((n + 2, n + 3), 1)] or summ(e.Y) != [((n + 3, n + 4), 1)] or summ(e.Z) != [((1, 1), 1)]:
            errs.append(f"eta_{n} terms {summ(e.X)} {summ(e.Y)} {summ(e.Z)}")
    return not errs, time.perf_counter() - t0, 30, "; ".join(errs) or f"eta_0..eta_8 match ({ch.status})"


def test_criterion_2():
    record(2, *criterion_2())


# --- 3 -----------------------------------------------------------------------------


def criterion_3():
    t0 = time.perf_counter()
    K = by_name("Kronecker")
    from fdrep.homological import indecomposable_projectives

    # preprojectives (n, n+1): the two projectives, then tau^-1 iterates
    verts = {P.dim_vector: P for P in indecomposable_projectives(K)}
    for n in range(2, 5):
        verts[(n, n + 1)] = almost_split_starting(verts[(n - 2, n - 1)]).end
    errs = []
    for n in range(0, 5):
        x = verts[(n, n + 1)]
        s = almost_split_starting(x).seq
        if summ(s.Y) != [((n + 1, n + 2), 2)] or s.Z.dim_vector != (n + 2, n + 3):
            errs.append(f"n={n}: {summ(s.Y)} -> {s.Z.dim_vector}")
        if not is_perfect(s):
            why = " (start is projective)" if is_projective(x) else ""
            errs.append(f"n={n}: not perfect{why}")
    return not errs, time.perf_counter() - t0, 10, "; ".join(errs) or "n = 0..4 shapes match, all perfect"


def test_criterion_3():
    record(3, *criterion_3())


# --- 4 -----------------------------------------------------------------------------


def criterion_4():
    t0 = time.perf_counter()
    errs = []
    n_ar = n_ext = 0
    for name in ZOO:
        A = by_name(name)
        verts = knit(A, 8).vertices
        for x in verts:
            r = ext1_vanishing_equiv(x)
            n_ext += 1
            if not r["equivalent"]:
                errs.append(f"(b) {name} {x.dim_vector}: {r}")
            if is_injective(x):
                continue
            s = almost_split_starting(x).seq
            n_ar += 1
            if is_perfect(s) != (not is_projective(x)):
                errs.append(f"(a) {name} {x.dim_vector}")
            for b in decompose(s.Y).blocks:
                if is_simple(b) and is_node(b):
                    errs.append(f"(d) {name} {x.dim_vector}: node {b.dim_vector} in the middle term")
    rng = np.random.default_rng(2026)
    n_fuzz = 0
    for name in ZOO:
        for inst in merge_instances(name, rng, 32):
            n_fuzz += 1
            ok, why = check_merge_instance(*inst)
            if not ok:
                errs.append(f"(c) {name}: {why}")
    if n_fuzz < 200:
        errs.append(f"(c) only {n_fuzz} instances")
    detail = f"(a,d) {n_ar} AR sequences, (b) {n_ext} modules, (c) {n_fuzz} merge/splice instances"
    return not errs, time.perf_counter() - t0, 120, "; ".join(errs[:5]) or detail


def test_criterion_4():
    record(4, *criterion_4())


# --- 5 -----------------------------------------------------------------------------


def _certified_terminal(ch) -> bool:
    st = ch.steps[-1]
    cert = ch.certificate
    if cert is None:
        return False
    p = st.eta.p
    v, chi = cert["v"], cert["chi"]
    s, t = st.arsum.s.matrix, st.arsum.t.matrix
    return (
        la.rank(v, p) == v.shape[0] == v.shape[1]
        and la.rank(chi, p) == chi.shape[0] == chi.shape[1]
        and np.array_equal(la.mul(s, v, p), st.eta.f.matrix % p)
        and np.array_equal(la.mul(t, chi, p), la.mul(v, st.eta.g.matrix, p))
    )


def criterion_5():
    t0 = time.perf_counter()
    errs = []
    counts = {}
    for name in FINITE:
        A = by_name(name)
        q = knit(A, 20)
        bound = len(q.vertices) ** 2
        kept = 0
        for s in extension_universe(name):
            rem = remove_split_summands(s)
            if rem.removed_left or rem.removed_right:
                continue
            if any(is_simple(b) and is_node(b) for b in decompose(s.X).blocks):
                continue
            if not is_perfect(s):
                continue
            kept += 1
            ch = run_chain(s, bound)
            if ch.status.kind != "TerminatedAlmostSplit":
                errs.append(f"{name} {s}: {ch.status}")
            elif not _certified_terminal(ch):
                errs.append(f"{name} {s}: terminal certificate fails")
        counts[name] = kept
    detail = "sequences per algebra " + ", ".join(f"{k}:{v}" for k, v in counts.items())
    if sum(counts.values()) == 0:
        errs.append("no qualifying sequences")
    return not errs, time.perf_counter() - t0, 120, "; ".join(errs[:5]) or detail


def test_criterion_5():
    record(5, *criterion_5())


# --- 6 -----------------------------------------------------------------------------


def criterion_6():
    t0 = time.perf_counter()
    errs = []
    n_yes = 0
    for name in ZOO:
        for x in knit(by_name(name), 8).vertices:
            r = is_gorenstein_projective(x)
            if name in ("F2[x]/(x^2)", "F3[x]/(x^3)") and r.verdict != "Yes":
                errs.append(f"{name} {x.dim_vector}: {r.verdict}")
            if name in ("A2", "Kronecker") and (r.verdict == "Yes") != is_projective(x):
                errs.append(f"{name} {x.dim_vector}: {r.verdict}")
            if r.verdict != "Yes":
                continue
            n_yes += 1
            om = syzygy(x)[0]
            if om.dim and is_gorenstein_projective(om).verdict != "Yes":
                errs.append(f"{name} Omega {x.dim_vector} lost Yes")
            if not totally_acyclic_window(kato_complex(x, -4, 4).window):
                errs.append(f"{name} {x.dim_vector}: window not totally acyclic")
    return not errs, time.perf_counter() - t0, 60, "; ".join(errs[:5]) or f"{n_yes} Yes-modules checked"


def test_criterion_6():
    record(6, *criterion_6())


# --- 7 -----------------------------------------------------------------------------


def _verdicts(m, n=None, simple=None):
    mt = morita_type_check(m, n)
    out = {
        "morita": mt["ok"],
        "P_Q_zero": not mt["M_tensor_N"]["error_term_dims"] and not mt["N_tensor_M"]["error_term_dims"],
        "natiso": natiso_check(m, n)["ok"],
        "iii": nu_condition(m)["ok"],
        "iv": dual_condition(m)["ok"],
        "probe": l_equivalence_probe(m)["verdict"],
    }
    if simple is not None:
        out["simple_image"] = simple_image_analysis(simple, m)["simple_plus_projective"]
    return out


def criterion_7():
    t0 = time.perf_counter()
    errs = []
    A = by_name("F3[x]/(x^3)")
    B, M, N = morita_context(A)
    S = simple_module(A, 0)
    cases = {
        "identity": _verdicts(regular_bimodule(A), None, S),
        "morita_context": _verdicts(M, N, S),
        "A(x)_kA": _verdicts(tensor_k_bimodule(by_name("A2"))),
    }
    for label in ("identity", "morita_context"):
        v = cases[label]
        for key in ("morita", "P_Q_zero", "natiso", "iii", "iv", "simple_image"):
            if not v[key]:
                errs.append(f"{label}: {key} fails")
        if v["probe"] != "consistent":
            errs.append(f"{label}: probe {v['probe']}")
    bad = cases["A(x)_kA"]
    if bad["morita"] or bad["iii"] or bad["iv"] or bad["probe"] != "refuted":
        errs.append(f"A(x)_kA: {bad}")
    for label, v in cases.items():
        if not (v["morita"] == v["iii"] == v["iv"]):
            errs.append(f"{label}: (iii) <=> (iv) <=> Morita type broken")
    # transport along terminated chains over A
    q = knit(A, 8)
    n_tr = 0
    for z, x in itertools.product(q.vertices, q.vertices):
        from fdrep.homological import ext1_classes

        for s in ext1_classes(z, x):
            rem = remove_split_summands(s)
            if rem.removed_left or rem.removed_right or not is_perfect(s):
                continue
            ch = run_chain(s, len(q.vertices) ** 2)
            if ch.status.kind != "TerminatedAlmostSplit":
                continue
            for bm in (regular_bimodule(A), M):
                r = transport(ch, bm)
                n_tr += 1
                if not (r.matches_direct and is_perfect(r.seq) and r.stable_dims["ok"]):
                    errs.append(f"transport mismatch for {s}")
    if n_tr == 0:
        errs.append("no transport instances")
    detail = f"3 bimodules cross-agree, {n_tr} transports match direct tensoring"
    return not errs, time.perf_counter() - t0, 120, "; ".join(errs[:5]) or detail


def test_criterion_7():
    record(7, *criterion_7())


# --- 8 -----------------------------------------------------------------------------


def criterion_8():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    errs = []
    checks = eq_cases = 0
    names = ZOO
    for i in range(100):
        A = by_name(names[i % len(names)])
        c = random_window(A, -2, 2, rng)
        verts = knit(A, 6).vertices
        for k in (-1, 0, 1):
            m = verts[rng.integers(len(verts))]
            r = yoshino_consequences(c, m, k)
            checks += 1
            if r["hom_h"] == 0:
                eq_cases += 1
            if not r["inequality"] or not r["equality_if_hom_zero"]:
                errs.append(f"window {i} {A.name} k={k} m={m.dim_vector}: {r}")
    detail = f"100 windows, {checks} (window, degree, module) checks, {eq_cases} equality cases"
    return not errs, time.perf_counter() - t0, 60, "; ".join(errs[:3]) or detail


def test_criterion_8():
    record(8, *criterion_8())


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, el, lim, det = fn()
        good = ok and el < lim
        failed += not good
        print(f"CRITERION {i} {'PASS' if good else 'FAIL'} ({el:.1f}s, limit {lim:.0f}s) {det}", flush=True)
    sys.exit(1 if failed else 0)
