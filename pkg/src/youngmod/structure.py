"""Radical and socle series, composition factors, Zassenhaus grids, hearts,
projectivity and Ext^1 from second Loewy layers.

Every layer label is read off from dim Hom(-, D) or dim Hom(D, -), which is
exact because End(D) = GF(2) for each simple D.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import combinat as cb
from .gf2core import BitMatrix, coords, intersect, left_nullspace, rank, rref, span_sum
from .homspace import hom_basis
from .modrep import GModule, SubmoduleWitness, simple_module, sub_and_quotient, sylow_elements, sylow_sum


class StructureError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def simples_for(n):
    """The simple modules D^lambda, keyed by 2-regular partitions of n."""
    return {a: simple_module(n, a) for a in cb.partitions_desc(n) if cb.is_2_regular(a)}


def _order(n):
    return {p: i for i, p in enumerate(cb.partitions_desc(n))}


@dataclass
class Layering:
    layers: list = field(default_factory=list)
    direction: str = "radical"

    def __len__(self):
        return len(self.layers)

    def total(self) -> Counter:
        out = Counter()
        for layer in self.layers:
            out.update(layer)
        return out

    def is_uniserial(self) -> bool:
        return all(sum(layer.values()) == 1 for layer in self.layers)

    def labels(self):
        """Layers as sorted lists of partitions with repetition."""
        out = []
        for layer in self.layers:
            row = []
            for p in sorted(layer, key=lambda q: _order(sum(q))[q]):
                row.extend([p] * layer[p])
            out.append(row)
        return out

    def reversed(self):
        return Layering(list(reversed(self.layers)), self.direction)

    def to_json(self):
        return [[[cb.format_partition(p), k] for p, k in sorted(layer.items(), key=lambda t: _order(sum(t[0]))[t[0]])]
                for layer in self.layers]

    def __eq__(self, other):
        if not isinstance(other, Layering):
            return NotImplemented
        return [dict(x) for x in self.layers] == [dict(y) for y in other.layers]


def _check_simples(m, simples):
    if not simples:
        raise StructureError("empty simples catalog")
    if any(d.n != m.n for d in simples.values()):
        raise StructureError("simples catalog has the wrong degree")


def top_counts(m: GModule, simples) -> Counter:
    return Counter({a: k for a, d in simples.items() if (k := hom_basis(m, d).dim)})


def socle_counts(m: GModule, simples) -> Counter:
    return Counter({a: k for a, d in simples.items() if (k := hom_basis(d, m).dim)})


def _labels_checked(counts, simples, dim):
    if sum(k * simples[a].dim for a, k in counts.items()) != dim:
        raise StructureError("layer dimensions do not balance; simples catalog incomplete?")
    return counts


def radical(m: GModule, simples):
    """(radical basis in m coordinates, top counts)."""
    maps, counts = [], Counter()
    for a, d in simples.items():
        hb = hom_basis(m, d)
        if hb.dim:
            counts[a] = hb.dim
            maps.extend(hb.mats)
    if not maps:
        return BitMatrix.identity(m.dim), counts
    return rref(left_nullspace(BitMatrix.hstack(maps)))[0], counts


def socle(m: GModule, simples):
    """(socle basis in m coordinates, socle counts)."""
    imgs, counts = [], Counter()
    for a, d in simples.items():
        hb = hom_basis(d, m)
        if hb.dim:
            counts[a] = hb.dim
            imgs.extend(hb.mats)
    if not imgs:
        return BitMatrix(0, m.dim), counts
    return rref(BitMatrix.vstack(imgs))[0], counts


def radical_series(m: GModule, simples):
    """Layering and chain Rad^0 = m > Rad^1 > ... > 0 (bases in m coordinates)."""
    _check_simples(m, simples)
    chain = [BitMatrix.identity(m.dim)]
    layers = []
    cur, cur_basis = m, chain[0]
    while cur.dim:
        if len(layers) > m.dim:
            raise StructureError("Loewy length exceeds dimension")
        rad, counts = radical(cur, simples)
        _labels_checked(counts, simples, cur.dim - rad.rows)
        layers.append(counts)
        sub, _, _, _ = sub_and_quotient(cur, SubmoduleWitness(cur, rad))
        cur_basis = rad @ cur_basis if rad.rows else BitMatrix(0, m.dim)
        chain.append(cur_basis)
        cur = sub
    return Layering(layers, "radical"), chain


def socle_series(m: GModule, simples):
    """Layering (bottom layer first) and chain 0 = Soc_0 < Soc_1 < ... = m."""
    _check_simples(m, simples)
    chain = [BitMatrix(0, m.dim)]
    layers = []
    cur_basis = chain[0]
    while cur_basis.rows < m.dim:
        if len(layers) > m.dim:
            raise StructureError("Loewy length exceeds dimension")
        _, quot, basis, _ = sub_and_quotient(m, SubmoduleWitness(m, cur_basis))
        soc, counts = socle(quot, simples)
        _labels_checked(counts, simples, soc.rows)
        layers.append(counts)
        piv = set(rref(basis)[1]) if basis.rows else set()
        rest = [j for j in range(m.dim) if j not in piv]
        lift = np.zeros((soc.rows, m.dim), dtype=np.uint8)
        lift[:, rest] = soc.to_dense()
        cur_basis = span_sum(cur_basis, BitMatrix.from_dense(lift))
        chain.append(cur_basis)
    return Layering(layers, "socle"), chain


def radical_socle_series(m: GModule, simples):
    rad, rchain = radical_series(m, simples)
    soc, schain = socle_series(m, simples)
    return rad, soc, rchain, schain


def composition_factors(m: GModule, simples) -> Counter:
    return radical_series(m, simples)[0].total()


def semisimple_labels(m: GModule, simples) -> Counter:
    counts = top_counts(m, simples)
    return _labels_checked(counts, simples, m.dim)


def subquotient(m: GModule, big: BitMatrix, small: BitMatrix) -> GModule:
    """big / small for nested submodules given by bases in m coordinates."""
    sub, _, inc, _ = sub_and_quotient(m, SubmoduleWitness(m, big))
    if small.rows == 0:
        return sub
    piv = rref(inc)[1]
    c = coords(inc, piv, rref(small)[0])
    if c is None:
        raise StructureError("subspace is not contained in the larger one")
    _, quot, _, _ = sub_and_quotient(sub, SubmoduleWitness(sub, c))
    return quot


def zassenhaus_grid(m: GModule, simples, rchain=None, schain=None):
    """grid[i][j-1] = factors of (Rad^i ∩ Soc_j) / ((Rad^{i+1} ∩ Soc_j) + (Rad^i ∩ Soc_{j-1}))."""
    if rchain is None:
        rchain = radical_series(m, simples)[1]
    if schain is None:
        schain = socle_series(m, simples)[1]
    L = len(rchain) - 1
    grid = []
    for i in range(L):
        row = []
        for j in range(1, len(schain)):
            a = intersect(rchain[i], schain[j])
            b = span_sum(intersect(rchain[i + 1], schain[j]), intersect(rchain[i], schain[j - 1]))
            if a.rows == b.rows:
                row.append(Counter())
                continue
            row.append(semisimple_labels(subquotient(m, a, b), simples))
        grid.append(row)
    return grid


def grid_marginals(grid):
    rows = [sum(row, Counter()) for row in grid]
    cols = [sum((grid[i][j] for i in range(len(grid))), Counter()) for j in range(len(grid[0]) if grid else 0)]
    return rows, cols


def is_projective(m: GModule) -> bool:
    if m.n < 2:
        return True     # trivial Sylow 2-subgroup
    order = len(sylow_elements(m.n))
    if m.dim % order:
        return False
    return rank(sylow_sum(m)) == m.dim // order


def heart(m: GModule, simples) -> GModule:
    rad, _ = radical(m, simples)
    soc, _ = socle(m, simples)
    if soc.rows and rref(BitMatrix.vstack([rad, soc]))[0].rows != rad.rows:
        raise StructureError("socle is not contained in the radical")
    return subquotient(m, rad, soc)


def ext1_dim(s, t, proj_cover: GModule, simples) -> int:
    """Multiplicity of D^t in the second Loewy layer of the projective cover of D^s."""
    layers, _ = radical_series(proj_cover, simples)
    if dict(layers.layers[0]) != {cb.Partition(s): 1}:
        raise StructureError("supplied module does not have simple top D^s")
    return layers.layers[1].get(cb.Partition(t), 0) if len(layers) > 1 else 0


def remove_from_top(m: GModule, d: GModule) -> GModule:
    """Intersection of the kernels of all maps m -> d."""
    maps = hom_basis(m, d).mats
    if not maps:
        return m
    ker = rref(left_nullspace(BitMatrix.hstack(maps)))[0]
    return sub_and_quotient(m, SubmoduleWitness(m, ker))[0]


def remove_from_bottom(m: GModule, d: GModule) -> GModule:
    """Quotient by the sum of the images of all maps d -> m."""
    maps = hom_basis(d, m).mats
    if not maps:
        return m
    return sub_and_quotient(m, SubmoduleWitness(m, rref(BitMatrix.vstack(maps))[0]))[1]


def loewy_section(m: GModule, simples, i, j) -> GModule:
    """Rad^i m / Rad^j m."""
    _, chain = radical_series(m, simples)
    j = min(j, len(chain) - 1)
    return subquotient(m, chain[i], chain[j])
