"""The fourteen acceptance criteria, one test each.

Each test records a PASS/FAIL line (printed in the terminal summary and to stdout)
before asserting. Reference data comes from the bundled fixtures; everything else is
computed from scratch (or loaded from the session cache).
"""

import math
import time

import numpy as np
import pytest

from conftest import RESULTS
from youngmod import combinat as cb
from youngmod.cli import completed_correspondence, fixtures, fmt
from youngmod.homspace import derive_rng, fitting_decompose, iso_test
from youngmod.modrep import dual
from youngmod.schuralg import (
    correspondence_aligns,
    decomposition_matrix,
    injectivity_check,
)
from youngmod.structure import ext1_dim, heart, is_projective, radical_series, simples_for

P = cb.parse_partition
FX = fixtures()
NS = range(1, 8)


def record(k, ok, detail=""):
    RESULTS[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def labels(lay):
    return [[fmt(p) for p in layer] for layer in lay.labels()]


@pytest.fixture(scope="module")
def timed(bench):
    """Catalog build (or cache load) times per n."""
    out = {}
    for n in NS:
        t = time.perf_counter()
        bench.catalog(n)
        out[n] = time.perf_counter() - t
    return out


def test_01_kostka_tables(bench, timed):
    bad = [n for n in NS if bench.catalog(n).kostka_matrix().tolist() != FX["kostka"][str(n)]["matrix"]
           or [fmt(p) for p in bench.catalog(n).partitions] != FX["kostka"][str(n)]["partitions"]]
    limits = {n: 30 for n in range(1, 6)} | {6: 300, 7: 1800}
    slow = [n for n in NS if timed[n] > limits[n]]
    times = " ".join(f"n{n}={timed[n]:.1f}s" for n in NS)
    record(1, not bad and not slow, f"mismatch={bad} slow={slow} {times}")


def test_02_composition_factors(bench):
    bad = []
    for n in NS:
        for a in bench.catalog(n).partitions:
            got = {fmt(p): k for p, k in bench.young_layers(n, a).total().items()}
            if got != FX["young"][str(n)][fmt(a)]["factors"]:
                bad.append((n, fmt(a)))
    y23 = {fmt(p): k for p, k in bench.young_layers(6, P("2^3")).total().items()}
    record(2, not bad and y23 == {"4,2": 4, "6": 6, "5,1": 2}, f"{sum(len(cb.partitions_desc(n)) for n in NS)} modules, mismatches {bad}")


def test_03_uniserial(bench):
    cases = [(5, "3,1^2", 6), (6, "4,1^2", 9), (5, "2,1^3", 2), (7, "4,3", 3)]
    bad = []
    for n, lam, length in cases:
        lay = bench.young_layers(n, P(lam))
        want = FX["young"][str(n)][lam]["layers"]
        if not (lay.is_uniserial() and len(lay) == length and labels(lay) == want):
            bad.append((n, lam, labels(lay)))
    record(3, not bad, f"{len(cases)} cases, mismatches {bad}")


def _heart_summands(bench, n, lam, seed_tag):
    simples = simples_for(n)
    h = heart(bench.catalog(n).young(P(lam)), simples)
    pieces = fitting_decompose(h, derive_rng(0, "heart", seed_tag))
    return sorted(labels(radical_series(pc.module, simples)[0]) for pc in pieces)


def test_04_hearts(bench):
    h4 = _heart_summands(bench, 4, "1^4", "4")
    ok4 = len(h4) == 2 and all(len(s) == 2 and all(len(layer) == 1 for layer in s) for s in h4)
    h7 = _heart_summands(bench, 7, "2,1^5", "7")
    # the two columns of the drawn direct sum, top to bottom
    want7 = sorted([[["4,3"], ["6,1"], ["6,1"], ["4,3"], ["6,1"]], [["6,1"], ["4,3"], ["6,1"], ["6,1"], ["4,3"]]])
    record(4, ok4 and h7 == want7, f"n=4 {h4}; n=7 {h7}")


def test_05_self_duality(bench):
    bad, count = [], 0
    for n in NS:
        cat = bench.catalog(n)
        for a in cat.partitions:
            y = cat.young(a)
            count += 1
            if iso_test(y, dual(y), derive_rng(0, "dual", cb.file_token(a))) is None:
                bad.append((n, fmt(a)))
    record(5, not bad and count == 44, f"{count} Young modules, not self-dual: {bad}")


def test_06_projectivity(bench):
    bad = []
    for n in NS:
        cat = bench.catalog(n)
        got = {a for a in cat.partitions if is_projective(cat.young(a))}
        want = {a for a in cat.partitions if cb.is_column_2_regular(a)}
        if got != want:
            bad.append(n)
    record(6, not bad, f"mismatch at n={bad}")


def test_07_ext(bench):
    y = bench.catalog(7).young(P("2^2,1^3"))
    e = ext1_dim(P("5,2"), P("5,2"), y, simples_for(7))
    record(7, e == 2, f"dim Ext^1(D[5,2], D[5,2]) = {e}")


def test_08_schur_projectives(bench):
    bad = []
    for n in range(1, 6):
        for a in bench.algebra(n).parts:
            lay = bench.projective_layers(n, a)
            want = FX["projectives"][str(n)][fmt(a)]["layers"]
            if [sorted(x) for x in labels(lay)] != [sorted(x) for x in want]:
                bad.append((n, fmt(a)))
    socles = {}
    for n in NS:
        rep = injectivity_check(bench.algebra(n), bench.catalog(n))
        socles[n] = rep.ok
    record(8, not bad and all(socles.values()), f"layer mismatches {bad}; simple socles {socles}")


def test_09_weyl(bench):
    bad, count = [], 0
    for n in (6, 7):
        for lam, rec in FX["weyl"][str(n)].items():
            count += 1
            lay = bench.weyl_layers(n, P(lam))
            got = {fmt(p): k for p, k in lay.total().items()}
            if got != rec["factors"]:
                bad.append((n, lam, "factors"))
            chain = all(len(layer) == 1 for layer in rec["layers"])
            if chain and labels(lay) != rec["layers"]:
                bad.append((n, lam, "layers"))
    record(9, not bad and count == 21, f"{count} Weyl modules, mismatches {bad}")


def test_10_matrix_identities(bench):
    bad = []
    for n in range(4, 8):
        alg = bench.algebra(n)
        c, d = alg.cartan(), decomposition_matrix(alg, check=False)
        parts = alg.parts
        unitri = all(d[i, i] == 1 for i in range(len(parts))) and all(
            cb.dominates(parts[i], parts[j]) for i in range(len(parts)) for j in range(len(parts)) if d[i, j])
        if not (np.array_equal(d.T @ d, c) and np.array_equal(c, c.T) and unitri):
            bad.append(n)
    record(10, not bad, f"failures at n={bad}")


def test_11_quivers(bench):
    out = {}
    for n, key in ((6, "6"), (7, "7-block1")):
        rec = FX["quivers"][key]
        q = bench.quiver(n).restrict([P(v) for v in rec["vertices"]])
        out[key] = q.edge_list() == sorted(rec["arrows"]) and len(q.vertices) == len(rec["vertices"])
    record(11, all(out.values()), str(out))


def test_12_morita(bench):
    b4, b5, b6, b7 = (bench.blocks(n) for n in (4, 5, 6, 7))

    def principal(blocks):
        return max(blocks, key=lambda b: len(b.partitions))

    corr = FX["blocks"]["correspondence"]
    mapping = {P(a) for a in corr["map"]}
    b7_2 = next(b for b in b7 if mapping <= set(b.partitions))
    b7_1 = next(b for b in b7 if b is not b7_2)
    p5 = principal(b5)
    full = completed_correspondence(b7_2, p5, corr["map"])
    same = p5.fingerprint == b7_2.fingerprint and correspondence_aligns(b7_2, p5, full)
    p4 = principal(b4)
    differ4 = p4.fingerprint != p5.fingerprint and p4.fingerprint != b7_2.fingerprint
    differ6 = principal(b6).fingerprint != b7_1.fingerprint
    record(12, same and differ4 and differ6,
           f"S(5,5)~S(7,7)b2 {same}; S(4,4) differs {differ4}; S(6,6) vs S(7,7)b1 differ {differ6}")


def test_13_dimensions(bench):
    bad = []
    for n in NS:
        alg = bench.algebra(n)
        d = decomposition_matrix(alg, check=False)
        simples = simples_for(n)
        for j, a in enumerate(alg.parts):
            if alg.dims[a] != sum(int(d[i, j]) * cb.hook_length_count(b) for i, b in enumerate(alg.parts)):
                bad.append((n, fmt(a)))
        total = sum(simples[cb.conjugate(a)].dim * alg.dims[a] for a in alg.parts if cb.is_column_2_regular(a))
        if total != math.factorial(n):
            bad.append((n, "regular", total))
    record(13, not bad, f"failures {bad}")


def test_14_oracle_properties():
    import test_properties

    failures = []
    for suite in test_properties.PROPERTY_SUITES:
        try:
            suite()
        except Exception as e:  # noqa: BLE001 - report and fail below
            failures.append(f"{suite.__name__}: {type(e).__name__}")
    record(14, not failures, f"{len(test_properties.PROPERTY_SUITES)} suites x {test_properties.EXAMPLES} examples; failures {failures}")
