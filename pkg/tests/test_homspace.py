import itertools

import numpy as np
import pytest

from youngmod import combinat as cb
from youngmod.gf2core import BitMatrix, rank, same_space
from youngmod.homspace import (
    ResidueForm,
    derive_rng,
    fitting_decompose,
    hom_basis,
    hom_basis_direct,
    hom_dim,
    is_hom,
    iso_test,
    split_off,
    summand_multiplicity,
    trace_and_cotrace,
)
from youngmod.modrep import conjugate_module, direct_sum, perm_module, simple_module, specht_module, trivial_module
from youngmod.youngcat import build_catalog

P = cb.parse_partition


def contingency_tables(a, b):
    """Number of nonnegative integer matrices with row sums a and column sums b."""
    if not a:
        return 1 if not any(b) else 0
    total = 0
    first, rest = a[0], a[1:]
    for row in itertools.product(*[range(x + 1) for x in b]):
        if sum(row) == first:
            total += contingency_tables(rest, [x - y for x, y in zip(b, row)])
    return total


def _random_basis(m, seed):
    rng = np.random.default_rng(seed)
    while True:
        x = BitMatrix.random(m.dim, m.dim, rng)
        if rank(x) == m.dim:
            return conjugate_module(m, x)


def _pool(n):
    out = [perm_module(n, a) for a in cb.partitions_desc(n)]
    out += [specht_module(n, a)[0] for a in cb.partitions_desc(n)]
    out += [simple_module(n, a) for a in cb.partitions_desc(n) if cb.is_2_regular(a)]
    out += [_random_basis(m, i) for i, m in enumerate(out[: len(out) // 2])]
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hom_basis_matches_direct_nullspace(n):
    pool = _pool(n)
    for m in pool:
        for k in pool:
            hb, hd = hom_basis(m, k), hom_basis_direct(m, k)
            assert hb.dim == hd.dim
            assert all(is_hom(x, m, k) for x in hb.mats)
            if hb.dim:
                flat = lambda mats: BitMatrix.from_dense(np.stack([x.to_dense().reshape(-1) for x in mats]))
                assert same_space(flat(hb.mats), flat(hd.mats))


def test_perm_hom_dims_are_double_cosets():
    for n in range(1, 6):
        ps = cb.partitions_desc(n)
        for a in ps:
            for b in ps:
                assert hom_dim(perm_module(n, a), perm_module(n, b)) == contingency_tables(list(a), list(b))


def test_summand_multiplicity_and_splitting():
    cat = build_catalog(4)
    for a in cat.partitions:
        y = cat.young(a)
        form = ResidueForm(y)
        for b in cat.partitions:
            assert summand_multiplicity(perm_module(4, b), y, form) == cat.kostka.get((a, b), 0)
    y = cat.young(P("2,1,1"))
    z = cat.young(P("3,1"))
    m = direct_sum(y, z, y)
    assert summand_multiplicity(m, y) == 2
    comp, f, g = split_off(m, y, derive_rng(0, "t"))
    assert comp.dim == m.dim - y.dim
    assert rank(f @ g) == y.dim
    assert split_off(z, y, derive_rng(0, "t")) is None


def test_iso_test():
    m = specht_module(5, P("3,2"))[0]
    assert iso_test(m, _random_basis(m, 7), derive_rng(1)) is not None
    assert iso_test(m, specht_module(5, P("2,2,1"))[0], derive_rng(1)) is None
    assert iso_test(m, trivial_module(5), derive_rng(1)) is None


def test_fitting_decompose():
    cat = build_catalog(5)
    parts = [cat.young(P(x)) for x in ("3,1,1", "2,2,1", "4,1")]
    m = _random_basis(direct_sum(*parts), 3)
    pieces = fitting_decompose(m, derive_rng(0, "f"))
    assert sorted(p.module.dim for p in pieces) == sorted(x.dim for x in parts)
    for p in pieces:
        assert p.embedding.rows == p.module.dim
        assert is_hom(p.embedding, p.module, m)


def test_derive_rng_is_deterministic():
    a = derive_rng(5, "x", 1).integers(0, 2**32, 4)
    b = derive_rng(5, "x", 1).integers(0, 2**32, 4)
    c = derive_rng(5, "x", 2).integers(0, 2**32, 4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_trace_and_cotrace():
    m = perm_module(3, P("1^3"))
    triv = trivial_module(3)
    tr, cot = trace_and_cotrace(m, triv)
    assert tr.dim == 1 and cot.dim == 5
    with pytest.raises(ValueError):
        hom_basis(m, trivial_module(4))
