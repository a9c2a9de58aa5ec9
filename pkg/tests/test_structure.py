from collections import Counter

import numpy as np
import pytest

from youngmod import combinat as cb
from youngmod.cli import fixtures
from youngmod.gf2core import BitMatrix
from youngmod.modrep import direct_sum, perm_module, simple_module, specht_module, trivial_module
from youngmod.structure import (
    Layering,
    StructureError,
    composition_factors,
    ext1_dim,
    grid_marginals,
    heart,
    is_projective,
    loewy_section,
    radical,
    radical_series,
    remove_from_bottom,
    remove_from_top,
    semisimple_labels,
    simples_for,
    socle,
    socle_series,
    subquotient,
    zassenhaus_grid,
)
from youngmod.youngcat import build_catalog

P = cb.parse_partition
FX = fixtures()


def test_simple_module_is_one_layer():
    for n in range(1, 7):
        S = simples_for(n)
        for a, d in S.items():
            lay, _ = radical_series(d, S)
            assert lay.layers == [Counter({a: 1})]
            assert semisimple_labels(d, S) == Counter({a: 1})


def test_regular_module_s3():
    # F2 S3 = P(D[3]) + 2 D[2,1], with P(D[3]) uniserial of length 2
    S = simples_for(3)
    m = perm_module(3, P("1^3"))
    lay, chain = radical_series(m, S)
    assert lay.layers == [Counter({P("3"): 1, P("2,1"): 2}), Counter({P("3"): 1})]
    assert [c.rows for c in chain] == [6, 1, 0]
    soc, counts = socle(m, S)
    assert soc.rows == 5 and counts == Counter({P("3"): 1, P("2,1"): 2})
    assert is_projective(m)
    assert not is_projective(trivial_module(3))
    # simple summands put socle outside the radical, so the heart is undefined
    with pytest.raises(StructureError):
        heart(m, S)
    assert heart(build_catalog(3).young(P("1^3")), S).dim == 0


def test_radical_and_socle_series_are_dual_layerings():
    cat = build_catalog(5)
    S = simples_for(5)
    for a in cat.partitions:
        y = cat.young(a)
        rad, _ = radical_series(y, S)
        soc, _ = socle_series(y, S)
        assert len(rad) == len(soc)
        assert rad.total() == soc.total() == composition_factors(y, S)
        # Young modules are self-dual, so the socle series is the radical series upside down
        assert soc == rad.reversed()


def test_zassenhaus_grid_of_uniserial_is_diagonal():
    cat = build_catalog(5)
    S = simples_for(5)
    y = cat.young(P("3,1,1"))
    grid = zassenhaus_grid(y, S)
    L = len(grid)
    assert L == 6
    for i in range(L):
        for j in range(L):
            assert bool(grid[i][j]) == (i + j == L - 1)
    rows, cols = grid_marginals(grid)
    assert sum(rows, Counter()) == composition_factors(y, S)


def test_ext1_from_second_layer():
    cat = build_catalog(4)
    S = simples_for(4)
    # projective cover of D[4] is Y[1^4]; of D[3,1] is Y[2,1,1]
    p4, p31 = cat.young(P("1^4")), cat.young(P("2,1,1"))
    second4 = FX["young"]["4"]["1^4"]["layers"][1]
    second31 = FX["young"]["4"]["2,1^2"]["layers"][1]
    for t in S:
        assert ext1_dim(P("4"), t, p4, S) == second4.count(cb.format_partition(t, caret=True))
        assert ext1_dim(P("3,1"), t, p31, S) == second31.count(cb.format_partition(t, caret=True))
    with pytest.raises(StructureError):
        ext1_dim(P("3,1"), P("4"), p4, S)


def test_remove_top_bottom_and_sections():
    cat = build_catalog(5)
    S = simples_for(5)
    y = cat.young(P("3,1,1"))   # uniserial: 5 / 3,2 / 5 / 5 / 3,2 / 5 read from the fixture
    layers = FX["young"]["5"]["3,1^2"]["layers"]
    top = S[P(layers[0][0])]
    cut = remove_from_top(y, top)
    assert radical_series(cut, S)[0].labels() == [[P(x[0])] for x in layers[1:]]
    cut2 = remove_from_bottom(y, S[P(layers[-1][0])])
    assert radical_series(cut2, S)[0].labels() == [[P(x[0])] for x in layers[:-1]]
    sec = loewy_section(y, S, 1, 3)
    assert radical_series(sec, S)[0].labels() == [[P(x[0])] for x in layers[1:3]]
    # removing something that does not occur on top changes nothing
    other = S[P("4,1")]
    assert remove_from_top(y, other).dim == y.dim


def test_subquotient_errors():
    m = perm_module(3, P("2,1"))
    S = simples_for(3)
    rad, _ = radical(m, S)
    ones = BitMatrix.from_dense(np.ones((1, 3), dtype=np.uint8))
    assert subquotient(m, BitMatrix.identity(3), ones).dim == 2
    with pytest.raises(StructureError):
        subquotient(m, ones, BitMatrix.from_dense(np.array([[1, 0, 0]], dtype=np.uint8)))
    with pytest.raises(StructureError):
        radical_series(m, {})
    with pytest.raises(StructureError):
        radical_series(m, simples_for(4))


def test_semisimple_labels_reject_non_semisimple():
    S = simples_for(3)
    m = perm_module(3, P("1^3"))
    with pytest.raises(StructureError):
        semisimple_labels(m, S)
    d = direct_sum(simple_module(3, P("2,1")), trivial_module(3))
    assert semisimple_labels(d, S) == Counter({P("2,1"): 1, P("3"): 1})


def test_layering_helpers():
    lay = Layering([Counter({P("3,1"): 1, P("4"): 2}), Counter({P("4"): 1})])
    assert lay.labels() == [[P("4"), P("4"), P("3,1")], [P("4")]]
    assert lay.to_json() == [[["4", 2], ["3,1", 1]], [["4", 1]]]
    assert not lay.is_uniserial() and len(lay) == 2
    assert lay.reversed().reversed() == lay
    assert specht_module(4, P("2,2"))[0].dim == 2
