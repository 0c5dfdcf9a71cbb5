"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import json
import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from cubedescent import complexes
from cubedescent.axioms import verify_descent_axioms
from cubedescent.cli import kind_of, run
from cubedescent.cube import Cube
from cubedescent.generate import random_tower_diagram
from cubedescent.kweight import (BlowupData, HyperresolutionDoc, assemble_compact_support, assemble_kd,
                                 blowup_doc, blowup_model, compact_pair_from_json, compare_hyperresolutions,
                                 corpus_documents, f2_corpus, nodal_cubic, p2_at_point,
                                 p3_along_line, square_sequence)
from cubedescent.spectral import SpectralSequence, weight_filtered
from cubedescent.towers import comparison_lemma, f2_tower_criterion
from cubedescent.zmod import FgAbGroup

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def show(number: int, title: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return show


def oracle_homology(rows):
    """Degree-0 and degree-(-1) homology of a two-term complex Z^cols -> Z^rows via sympy."""
    m = sympy.Matrix(rows)
    d = smith_normal_form(m, domain=sympy.ZZ)
    diag = [abs(int(d[i, i])) for i in range(min(d.shape)) if d[i, i] != 0]
    return (FgAbGroup(m.shape[1] - len(diag)), FgAbGroup.from_diagonal(diag, m.shape[0]))


def kd_rows(name):
    rep, out, _ = run(["kd", name, "--range", "-3..1", "--format", "json"])
    js = json.loads(out)
    rows = {r["n"]: r for r in js["results"]["kd"]["rows"]}
    return rep.exit_code, rows


def as_group(obj):
    return FgAbGroup(obj["rank"], tuple(obj["torsion"]))


def pure(row, p):
    return all(as_group(g).is_trivial == (int(q) != p) for q, g in row["weights"].items()) \
        and as_group(row["weights"][str(p)]) == as_group(row["group"])


def test_criterion_1_descent_axioms(verdict):
    rep = verify_descent_axioms(seed=7, trials=200, max_cube=2)
    counts = ", ".join(f"{k} {v}/{rep.trials}" for k, v in sorted(rep.passed.items()))
    verdict(1, "descent-axiom suite", rep.ok and not rep.failures and rep.trials == 200, counts)


def test_criterion_2_nodal_cubic(verdict):
    code, rows = kd_rows("nodal")
    h0, h1 = oracle_homology([[1, 1, -1], [1, 1, -1]])
    ok = (code == 0 and as_group(rows[0]["group"]) == h0 == FgAbGroup(2)
          and as_group(rows[-1]["group"]) == h1 == FgAbGroup(1)
          and pure(rows[0], 0) and pure(rows[-1], 1)
          and all(as_group(rows[n]["group"]).is_trivial for n in (-2, -3)))
    verdict(2, "nodal cubic KD and weights", ok, f"oracle H0={h0}, H-1={h1}")


def test_criterion_3_cuspidal_cubic(verdict):
    code, rows = kd_rows("cusp")
    h0, h1 = oracle_homology([[1, 1, -1]])
    ok = (code == 0 and as_group(rows[0]["group"]) == h0 == FgAbGroup(2)
          and as_group(rows[-1]["group"]) == h1 == FgAbGroup(0))
    verdict(3, "cuspidal cubic KD", ok, f"oracle H0={h0}, H-1={h1}")


@pytest.mark.parametrize("build, ranks", [(p2_at_point, (3, 5, 2)), (p3_along_line, (4, 8, 4))])
def test_criterion_4_blowup_exactness(verdict, build, ranks):
    rep = blowup_model(build())
    seq = square_sequence(rep.square)
    groups = tuple(n.group for n in seq.nodes if n.degree == 0)
    ok = (rep.ok and rep.commutes and rep.cube_acyclic and rep.front_acyclic and rep.exact
          and seq.ok and groups == tuple(FgAbGroup(r) for r in ranks))
    verdict(4, f"blow-up exactness, {rep.data.name}", ok, " -> ".join(map(str, groups)))


def test_criterion_5_tower_comparison(verdict):
    rng = random.Random(2024)
    failures = []
    for i in range(100):
        x = random_tower_diagram(rng, Cube(rng.randint(1, 2)), rng.randint(0, 3))
        rep = comparison_lemma(x)
        if not rep.ok:
            failures.append((i, rep.failures()))
    verdict(5, "tower comparison on 100 diagrams", not failures, f"{len(failures)} failures")


def test_criterion_6_f2_equivalence(verdict):
    corpus = f2_corpus(seed=0, count=50)
    verdicts = [(name, f2_tower_criterion(sq)) for name, sq in corpus]
    bad = [name for name, v in verdicts if not v.agree]
    acyclic = sum(v.acyclic for _, v in verdicts)
    ok = len(corpus) == 50 and not bad and 0 < acyclic < 50
    verdict(6, "F2 criterion on 50 squares", ok, f"{acyclic} acyclic, disagreements {bad}")


def test_criterion_7_hyperresolution_independence(verdict):
    inflated = HyperresolutionDoc.from_json(corpus_documents()["nodal_inflated.json"])
    assert inflated.cube == 2
    rep = compare_hyperresolutions(nodal_cubic(), inflated, range(1, -3, -1))
    verdict(7, "nodal square vs inflated cube", rep.all_isomorphic and not rep.mismatches(),
            f"mismatches {rep.mismatches()}")


def test_criterion_8_compact_support(verdict):
    hbar, hy, f = compact_pair_from_json(corpus_documents()["a1.json"])
    kc = assemble_compact_support(hbar, hy, f)
    y0 = assemble_compact_support(hbar, None, None)
    kd = assemble_kd(hbar)
    same = all(y0.group(n) == complexes.homology(kd, n) for n in range(-3, 2))
    ok = (kc.group(0) == FgAbGroup(1) and kc.group(-1) == FgAbGroup(0)
          and kc.sequence.ok and all(kc.sequence.exact) and y0.sequence.ok and same)
    verdict(8, "compact support of A1 and Y empty", ok,
            f"Kc_0={kc.group(0)}, Kc_-1={kc.group(-1)}, LES nodes {len(kc.sequence.nodes)}")


def test_criterion_9_convergence(verdict):
    docs = []
    for fname, obj in sorted(corpus_documents().items()):
        kind = kind_of(obj)
        if kind == "hyperresolution":
            try:
                docs.append((fname, HyperresolutionDoc.from_json(obj).diagram))
            except Exception:
                continue        # the deliberately invalid document
        elif kind == "compact-support":
            hbar, hy, _ = compact_pair_from_json(obj)
            docs.append((fname + ":ambient", hbar.diagram))
            if hy is not None:
                docs.append((fname + ":closed", hy.diagram))
        elif kind == "blowup":
            docs.append((fname, blowup_doc(BlowupData.from_json(obj)).diagram))
    bad, checked = [], 0
    for fname, x in docs:
        ss = SpectralSequence(weight_filtered(x))
        for n in range(ss.c.lo - 1, ss.c.hi + 2):
            checked += 1
            if not all(ok for _, _, ok in ss.convergence(n).values()):
                bad.append((fname, n))
    verdict(9, "convergence on every corpus document", not bad and len(docs) >= 15,
            f"{len(docs)} diagrams, {checked} degrees, failures {bad}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
