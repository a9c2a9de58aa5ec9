import itertools
import math

import numpy as np
import pytest

from test_properties import oracle_rank
from youngmod import combinat as cb
from youngmod.gf2core import BitMatrix, rank
from youngmod.modrep import (
    SubmoduleWitness,
    direct_sum,
    dual,
    is_invariant,
    module_from_bytes,
    module_to_bytes,
    perm_module,
    simple_module,
    specht_module,
    spin,
    sub_and_quotient,
    sylow_elements,
    sylow_rank,
    sylow_words,
    tensor,
    trivial_module,
)

P = cb.parse_partition


def oracle_simple_dim(n, a):
    """Rank of the polytabloid Gram matrix, built from scratch with frozensets."""
    tabs = list(cb.standard_tableaux(a))

    def tabloid(rows):
        return tuple(frozenset(r) for r in rows)

    def poly(t):
        cols = cb.tableau_columns(t)
        acc = {}
        for imgs in itertools.product(*[itertools.permutations(c) for c in cols]):
            sub = {x: y for c, im in zip(cols, imgs) for x, y in zip(c, im)}
            key = tabloid([[sub.get(x, x) for x in row] for row in t])
            acc[key] = acc.get(key, 0) ^ 1
        return {k for k, v in acc.items() if v}

    polys = [poly(t) for t in tabs]
    gram = np.array([[len(p & q) % 2 for q in polys] for p in polys], dtype=np.uint8)
    return oracle_rank(gram)


def test_perm_modules():
    for n in range(1, 7):
        for a in cb.partitions_desc(n):
            m = perm_module(n, a)
            assert m.dim == cb.multinomial(a)
            assert m.check_relations()


def test_specht_dimensions():
    for n in range(1, 7):
        for a in cb.partitions_desc(n):
            sp, w = specht_module(n, a)
            assert sp.dim == cb.hook_length_count(a)
            assert is_invariant(perm_module(n, a), w.basis)


@pytest.mark.parametrize("n", range(1, 7))
def test_simple_dimensions_against_oracle(n):
    for a in cb.partitions_desc(n):
        if cb.is_2_regular(a):
            assert simple_module(n, a).dim == oracle_simple_dim(n, a)


def test_simple_dimensions_n7():
    # [DERIVED] from the oracle above, frozen because it takes a while at n=7
    want = {"7": 1, "6,1": 6, "5,2": 14, "4,3": 8, "4,2,1": 20}
    got = {cb.format_partition(a): simple_module(7, a).dim for a in cb.partitions_desc(7) if cb.is_2_regular(a)}
    assert got == want
    with pytest.raises(ValueError):
        simple_module(7, P("2,2,1,1,1"))


def test_spin_and_quotient():
    m = perm_module(4, P("2,1,1"))
    seed = BitMatrix.from_dense(np.eye(m.dim, dtype=np.uint8)[:1])
    w = spin(m, seed)
    assert w.dim == m.dim   # a tabloid generates the permutation module
    ones = BitMatrix.from_dense(np.ones((1, m.dim), dtype=np.uint8))
    fixed = spin(m, ones)
    assert fixed.dim == 1
    sub, quot, inc, proj = sub_and_quotient(m, fixed)
    assert sub.dim + quot.dim == m.dim
    assert sub.check_relations() and quot.check_relations()
    # projection intertwines
    assert m.s @ proj == proj @ quot.s and m.c @ proj == proj @ quot.c
    with pytest.raises(ValueError):
        sub_and_quotient(m, SubmoduleWitness(m, seed))


def test_dual_tensor_sum():
    m = perm_module(4, P("3,1"))
    d = dual(m)
    assert d.dim == m.dim and d.check_relations()
    t = tensor(m, trivial_module(4))
    assert t.dim == m.dim and t.s == m.s
    s = direct_sum(m, d)
    assert s.dim == 2 * m.dim and s.check_relations()
    with pytest.raises(ValueError):
        tensor(m, trivial_module(3))


def test_sylow_subgroups():
    for n in range(2, 8):
        elems = sylow_elements(n)
        two_part = math.factorial(n) & -math.factorial(n)
        assert len(elems) == two_part
        assert len(sylow_words(n)) >= 1
    with pytest.raises(ValueError):
        sylow_words(8)
    # the regular module restricted to P is free: rank of the group sum is |G|/|P|
    m = perm_module(4, P("1^4"))
    assert sylow_rank(m) == 24 // 8


def test_module_bytes_round_trip():
    m = specht_module(5, P("3,2"))[0]
    buf = module_to_bytes(m) + module_to_bytes(perm_module(3, P("2,1")))
    got, off = module_from_bytes(buf)
    assert got.s == m.s and got.c == m.c and got.label.partition == P("3,2") and got.label.kind == "specht"
    got2, off2 = module_from_bytes(buf, off)
    assert got2.dim == 3 and off2 == len(buf)
    assert rank(got.s) == m.dim
    with pytest.raises(ValueError):
        module_from_bytes(b"XXXX" + buf)
