"""Representations of S_n over GF(2), given by the matrices of s = (1 2) and
c = (1 2 ... n) acting on row vectors from the right.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import combinat as cb
from .gf2core import (
    BitMatrix,
    coords,
    from_bytes,
    inverse,
    kronecker,
    power,
    left_nullspace,
    rank,
    reduce_mod,
    rref,
    to_bytes,
)

KINDS = ("perm", "specht", "simple", "young", "derived")


@dataclass(frozen=True)
class Label:
    kind: str = "derived"
    partition: cb.Partition | None = None
    note: str = ""

    def __str__(self):
        p = "" if self.partition is None else f"[{cb.format_partition(self.partition, caret=True)}]"
        return f"{self.kind}{p}" + (f" {self.note}" if self.note else "")


class GModule:
    __slots__ = ("n", "dim", "s", "c", "label")

    def __init__(self, n: int, s: BitMatrix, c: BitMatrix, label: Label | None = None):
        if s.shape != c.shape or s.rows != s.cols:
            raise ValueError("generator matrices must be square and of equal size")
        self.n = n
        self.dim = s.rows
        self.s = s
        self.c = c
        self.label = label or Label()

    @property
    def gens(self):
        return (self.s, self.c)

    def gen(self, name):
        return self.s if name == "s" else self.c

    def word_matrix(self, word: str) -> BitMatrix:
        x = BitMatrix.identity(self.dim)
        for ch in word:
            x = x @ self.gen(ch)
        return x

    def relabel(self, kind, partition=None, note=""):
        return GModule(self.n, self.s, self.c, Label(kind, partition, note))

    def check_relations(self) -> bool:
        one = BitMatrix.identity(self.dim)
        return self.s @ self.s == one and power(self.c, self.n) == one

    def __repr__(self):
        return f"GModule(n={self.n}, dim={self.dim}, {self.label})"



@dataclass
class SubmoduleWitness:
    ambient: GModule
    basis: BitMatrix

    @property
    def dim(self):
        return self.basis.rows


def zero_module(n):
    z = BitMatrix(0, 0)
    return GModule(n, z, z)


def trivial_module(n):
    one = BitMatrix.identity(1)
    return GModule(n, one, one, Label("simple", cb.Partition([n]) if n else None))


def _perm_matrix(images):
    d = len(images)
    dense = np.zeros((d, d), dtype=np.uint8)
    dense[np.arange(d), np.asarray(images)] = 1
    return BitMatrix.from_dense(dense)


def perm_module(n, a) -> GModule:
    a = cb.Partition(a)
    _, action = cb.tabloid_basis(n, a)
    return GModule(n, _perm_matrix(action["s"]), _perm_matrix(action["c"]), Label("perm", a))


def polytabloids(n, a) -> BitMatrix:
    """One row per standard tableau: the unsigned column-stabilizer sum."""
    a = cb.Partition(a)
    index = cb.tabloid_index(n, a)
    rows = []
    for t in cb.standard_tableaux(a):
        cols = cb.tableau_columns(t)
        vec = np.zeros(len(index), dtype=np.uint8)
        for images in itertools.product(*[itertools.permutations(col) for col in cols]):
            relabel = {}
            for col, img in zip(cols, images):
                relabel.update(zip(col, img))
            tab = cb.Tabloid(tuple(sorted(relabel.get(x, x) for x in row)) for row in t)
            vec[index[tab]] ^= 1
        rows.append(vec)
    return BitMatrix.from_dense(np.array(rows, dtype=np.uint8).reshape(len(rows), len(index)))


def specht_module(n, a):
    a = cb.Partition(a)
    m = perm_module(n, a)
    w = spin(m, polytabloids(n, a))
    sub, _, _, _ = sub_and_quotient(m, w)
    return sub.relabel("specht", a), w


def simple_module(n, a) -> GModule:
    a = cb.Partition(a)
    if not cb.is_2_regular(a):
        raise ValueError(f"{a!r} is not 2-regular")
    sp, w = specht_module(n, a)
    gram = w.basis @ w.basis.T
    rad = SubmoduleWitness(sp, rref(left_nullspace(gram))[0])
    _, quot, _, _ = sub_and_quotient(sp, rad)
    return quot.relabel("simple", a)


def spin(m: GModule, seeds: BitMatrix) -> SubmoduleWitness:
    """Invariant closure of the row space of seeds."""
    if seeds.cols != m.dim:
        raise ValueError("seed length does not match module dimension")
    basis, piv = rref(seeds)
    frontier = basis
    while frontier.rows:
        images = BitMatrix.vstack([frontier @ m.s, frontier @ m.c])
        res = reduce_mod(basis, piv, images)
        frontier, _ = rref(res)
        if frontier.rows:
            basis, piv = rref(BitMatrix.vstack([basis, frontier]))
    return SubmoduleWitness(m, basis)


def is_invariant(m: GModule, basis: BitMatrix) -> bool:
    b, piv = rref(basis)
    return all(reduce_mod(b, piv, basis @ g).is_zero() for g in m.gens)


def sub_and_quotient(m: GModule, w: SubmoduleWitness):
    """(sub, quot, inclusion, projection) for an invariant subspace."""
    basis, piv = rref(w.basis)
    r = basis.rows
    for g in m.gens:
        if not reduce_mod(basis, piv, basis @ g).is_zero():
            raise ValueError("basis is not invariant")
    sub_gens = [coords(basis, piv, basis @ g) if r else BitMatrix(0, 0) for g in m.gens]
    sub = GModule(m.n, *sub_gens)
    pset = set(piv)
    rest = [j for j in range(m.dim) if j not in pset]
    proj = projection_matrix(basis, piv, m.dim)
    if rest:
        quot_gens = [g.take_rows(rest) @ proj for g in m.gens]
    else:
        quot_gens = [BitMatrix(0, 0)] * 2
    quot = GModule(m.n, *quot_gens)
    return sub, quot, basis, proj


def projection_matrix(basis, pivots, dim):
    """Matrix of M -> M/W, coordinates on the non-pivot columns."""
    pset = set(pivots)
    rest = [j for j in range(dim) if j not in pset]
    dense = np.zeros((dim, len(rest)), dtype=np.uint8)
    if rest:
        dense[rest, np.arange(len(rest))] = 1
        if pivots:
            dense[pivots, :] = basis.to_dense()[:, rest]
    return BitMatrix.from_dense(dense)


def dual(m: GModule) -> GModule:
    gens = [inverse(g).T for g in m.gens] if m.dim else [BitMatrix(0, 0)] * 2
    return GModule(m.n, *gens, Label("derived", m.label.partition, f"dual of {m.label}"))


def tensor(m1: GModule, m2: GModule) -> GModule:
    if m1.n != m2.n:
        raise ValueError("degree mismatch")
    return GModule(m1.n, kronecker(m1.s, m2.s), kronecker(m1.c, m2.c),
                   Label("derived", None, f"{m1.label} (x) {m2.label}"))


def direct_sum(*mods) -> GModule:
    n = mods[0].n
    mats = []
    for name in "sc":
        blocks = [m.gen(name).to_dense() for m in mods]
        d = sum(b.shape[0] for b in blocks)
        out = np.zeros((d, d), dtype=np.uint8)
        k = 0
        for b in blocks:
            out[k : k + b.shape[0], k : k + b.shape[0]] = b
            k += b.shape[0]
        mats.append(BitMatrix.from_dense(out))
    return GModule(n, *mats)


def conjugate_module(m: GModule, x: BitMatrix) -> GModule:
    """Module with generators x g x^-1, i.e. the same module in the basis given by rows of x."""
    xi = inverse(x)
    # the tabloid basis is gone, so a "perm" label would be a lie
    label = Label("derived", m.label.partition, f"conjugate of {m.label}") if m.label.kind == "perm" else m.label
    return GModule(m.n, x @ m.s @ xi, x @ m.c @ xi, label)


# Sylow 2-subgroups

SYLOW_CYCLES = {
    2: [[(1, 2)]],
    3: [[(1, 2)]],
    4: [[(1, 2, 3, 4)], [(1, 3)]],
    5: [[(1, 2, 3, 4)], [(1, 3)]],
    6: [[(1, 2, 3, 4)], [(1, 3)], [(5, 6)]],
    7: [[(1, 2, 3, 4)], [(1, 3)], [(5, 6)]],
}


@lru_cache(maxsize=None)
def sylow_words(n):
    if n not in SYLOW_CYCLES:
        raise ValueError(f"no Sylow 2-subgroup table for n={n}")
    return tuple(cb.word_for(n, cb.perm_from_cycles(n, cyc)) for cyc in SYLOW_CYCLES[n])


@lru_cache(maxsize=None)
def sylow_elements(n):
    """BFS tree over the fixed Sylow subgroup: list of (parent index, generator index)."""
    gens = [cb.word_perm(n, w) for w in sylow_words(n)]
    start = tuple(range(n))
    seen = {start: 0}
    tree = [(-1, -1)]
    order = [start]
    k = 0
    while k < len(order):
        p = order[k]
        for gi, g in enumerate(gens):
            q = cb.perm_compose(p, g)
            if q not in seen:
                seen[q] = len(order)
                order.append(q)
                tree.append((k, gi))
        k += 1
    return tuple(tree)


def restrict_to_sylow2(m: GModule):
    if m.n < 2:
        raise ValueError("trivial Sylow 2-subgroup")
    mats = [m.word_matrix(w) for w in sylow_words(m.n)]
    return mats, len(sylow_elements(m.n))


def sylow_sum(m: GModule) -> BitMatrix:
    mats, _ = restrict_to_sylow2(m)
    elems = [BitMatrix.identity(m.dim)]
    total = elems[0]
    for parent, gi in sylow_elements(m.n)[1:]:
        x = elems[parent] @ mats[gi]
        elems.append(x)
        total = total + x
    return total


def sylow_rank(m: GModule) -> int:
    return rank(sylow_sum(m))


# files


def module_to_bytes(m: GModule) -> bytes:
    kind = m.label.kind.encode()
    part = b"" if m.label.partition is None else cb.file_token(m.label.partition).encode()
    note = m.label.note.encode()
    head = b"YMOD" + struct.pack("<II", m.n, m.dim)
    for field in (kind, part, note):
        head += struct.pack("<H", len(field)) + field
    return head + to_bytes(m.s) + to_bytes(m.c)


def module_from_bytes(buf: bytes, offset: int = 0):
    if buf[offset : offset + 4] != b"YMOD":
        raise ValueError("bad module magic")
    n, dim = struct.unpack_from("<II", buf, offset + 4)
    pos = offset + 12
    fields = []
    for _ in range(3):
        (ln,) = struct.unpack_from("<H", buf, pos)
        fields.append(buf[pos + 2 : pos + 2 + ln].decode())
        pos += 2 + ln
    s, pos = from_bytes(buf, pos)
    c, pos = from_bytes(buf, pos)
    part = cb.parse_partition(fields[1]) if fields[1] else None
    return GModule(n, s, c, Label(fields[0], part, fields[2])), pos
