import itertools
from collections import Counter

import numpy as np
import pytest

from youngmod import combinat as cb
from youngmod.schuralg import (
    AModule,
    Block,
    SchurError,
    basic_algebra,
    blocks_and_fingerprint,
    cartan_matrix,
    correspondence_aligns,
    decomposition_matrix,
    fingerprint,
    generated_submodule,
    injectivity_check,
    module_socle,
    projective_A,
    quotient,
    radical,
    radical_and_quiver,
    radical_chain,
    radical_layers,
    specht_filtration_multiplicities,
    structure_product,
    weyl_module,
)
from youngmod.youngcat import build_catalog

P = cb.parse_partition


@pytest.fixture(scope="module")
def alg5():
    return basic_algebra(build_catalog(5))


@pytest.fixture(scope="module")
def alg4():
    return basic_algebra(build_catalog(4))


def _mul(alg, a, b, c, x, y):
    return np.einsum("i,j,ijk->k", x.astype(np.int64), y.astype(np.int64), alg.mult[(a, b, c)].astype(np.int64)) % 2


def test_identities_are_orthogonal_idempotents(alg5):
    for a in alg5.parts:
        e = alg5.identity(a)
        assert np.array_equal(_mul(alg5, a, a, a, e, e), e)
        for b in alg5.parts:
            for i in range(alg5.k(a, b)):
                x = np.zeros(alg5.k(a, b), dtype=np.uint8)
                x[i] = 1
                assert np.array_equal(_mul(alg5, a, a, b, e, x), x)
                assert np.array_equal(_mul(alg5, a, b, b, x, alg5.identity(b)), x)
                assert structure_product(alg5, a, a, b, 0, i).shape == (alg5.k(a, b),)


def test_cartan_and_dimension(alg5):
    c = alg5.cartan()
    assert np.array_equal(c, c.T)
    assert np.array_equal(cartan_matrix(alg5), c)
    assert alg5.dim == int(c.sum())


def test_radical_is_nilpotent_of_codimension_parts(alg5):
    rad = radical(alg5)
    assert sum(v.shape[0] for v in rad.values()) == alg5.dim - len(alg5.parts)
    chain = radical_chain(alg5)
    assert sum(v.shape[0] for v in chain[-1].values()) == 0
    _, q = radical_and_quiver(alg5)
    assert (np.diag(q) == 0).all()
    assert np.array_equal(q, q.T)   # the Schur algebra has a duality


def test_projectives(alg5):
    rng = np.random.default_rng(0)
    c = alg5.cartan()
    for i, a in enumerate(alg5.parts):
        p = projective_A(alg5, a)
        assert p.check(rng, 30)
        layers = radical_layers(p)
        assert layers[0] == Counter({a: 1})
        total = sum(layers, Counter())
        assert [total[b] for b in alg5.parts] == list(c[i])
        soc = module_socle(p)
        assert sum(v.shape[0] for v in soc.values()) >= 1


def test_weyl_and_decomposition(alg5):
    d = decomposition_matrix(alg5)
    assert np.array_equal(d.T @ d, alg5.cartan())
    for i, a in enumerate(alg5.parts):
        w = weyl_module(alg5, a)
        assert w.dims[a] == 1
        assert all(cb.dominates(a, b) for b, k in w.dims.items() if k)
        # dim Y^a = sum over Specht factors of dim S^b
        mult = specht_filtration_multiplicities(alg5, a, d)
        assert sum(k * cb.hook_length_count(b) for b, k in mult.items()) == alg5.dims[a]


def test_submodules_and_quotients(alg5):
    a = P("3,1,1")
    p = projective_A(alg5, a)
    gens = {P("5"): np.eye(p.dims[P("5")], dtype=np.uint8)}
    sub = generated_submodule(p, gens)
    q = quotient(p, sub, "q")
    assert isinstance(q, AModule)
    assert q.dim == p.dim - sum(v.shape[0] for v in sub.values())
    assert q.check(np.random.default_rng(1), 30)


def test_fingerprint_is_relabelling_invariant(alg5):
    (principal, small) = sorted(blocks_and_fingerprint(alg5), key=lambda b: -len(b.partitions))
    assert small.partitions == (P("4,1"), P("2,1^3")) and small.weight == 1
    f = principal.fingerprint
    k = len(principal.partitions)
    c = np.array(f.cartan)
    q = np.array(f.quiver)
    layers = [[Counter(layer) for layer in proj] for proj in f.layers]
    for perm in list(itertools.permutations(range(k)))[::17]:
        inv = {old: new for new, old in enumerate(perm)}
        c2 = c[np.ix_(perm, perm)]
        q2 = q[np.ix_(perm, perm)]
        l2 = [[Counter({inv[x]: m for x, m in layer.items()}) for layer in layers[old]] for old in perm]
        assert fingerprint(c2, q2, l2) == f
    # identity correspondence aligns, a transposition of distinguishable vertices does not
    ident = {p: p for p in principal.partitions}
    assert correspondence_aligns(principal, principal, ident)
    swapped = dict(ident)
    swapped[P("5")], swapped[P("1^5")] = P("1^5"), P("5")
    assert not correspondence_aligns(principal, principal, swapped)
    assert not correspondence_aligns(principal, small, ident)
    assert isinstance(principal, Block)
    assert principal.canonical_partitions()[0] in principal.partitions


def test_blocks_n4(alg4):
    (b,) = blocks_and_fingerprint(alg4)
    assert b.core == () and b.weight == 2 and len(b.partitions) == 5


def test_injectivity(alg5):
    rep = injectivity_check(alg5, build_catalog(5))
    assert rep.ok
    assert set(rep.socle_dims) == {a for a in alg5.parts if cb.is_column_2_regular(a)}


def test_wrong_degree_is_rejected(alg4):
    with pytest.raises(SchurError):
        weyl_module(alg4, P("5"))


# drawings where adjacent Specht factors are not separated by boxes or thick edges
AMBIGUOUS_DRAWINGS = {(4, "2^2"), (7, "4,2,1"), (7, "3^2,1"), (7, "3,1^4")}


@pytest.mark.parametrize("n", range(1, 8))
def test_specht_filtrations_match_drawings(n, bench):
    from youngmod.cli import fixtures, fmt
    from youngmod.modrep import specht_module
    from youngmod.structure import composition_factors, simples_for

    fx = fixtures()["young"][str(n)]
    alg = bench.algebra(n)
    d = decomposition_matrix(alg)
    S = simples_for(n)
    spf = {b: tuple(sorted(fmt(p) for p in composition_factors(specht_module(n, b)[0], S).elements()))
           for b in alg.parts}
    for a in alg.parts:
        mult = specht_filtration_multiplicities(alg, a, d)
        want = sorted(x for b, k in mult.items() for x in [spf[b]] * k)
        rec = fx[fmt(a)]
        drawn = sorted([tuple(g) for g in rec["filtration_groups"]] + [(x,) for x in rec["ungrouped"]])
        if (n, fmt(a)) in AMBIGUOUS_DRAWINGS:
            assert sorted(x for g in drawn for x in g) == sorted(x for g in want for x in g)
        else:
            assert drawn == want, fmt(a)
