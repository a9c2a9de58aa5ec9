"""The basic Schur algebra End(sum of Y^lambda) over GF(2) and its modules.

Homomorphisms compose left to right: for f in Hom(Y^a, Y^b) and g in
Hom(Y^b, Y^c) the product f*g is the matrix f @ g in Hom(Y^a, Y^c). Each hom
space basis is kept in reduced echelon form as flattened matrices, so the
coordinates of any map in it are its entries at the pivot positions.

Everything is graded by the idempotents e_a. Subspaces of the algebra and of
its modules are stored blockwise as dicts of dense 0/1 arrays.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import combinat as cb
from .gf2core import BitMatrix, rref
from .homspace import hom_basis


class SchurError(RuntimeError):
    pass


def _rref_rows(x: np.ndarray) -> np.ndarray:
    """Reduced echelon basis of the row space of a dense 0/1 array."""
    if x.size == 0 or x.shape[0] == 0:
        return np.zeros((0, x.shape[1]), dtype=np.uint8)
    b, _ = rref(BitMatrix.from_dense(x & 1))
    return b.to_dense()


def _pivots(b: np.ndarray):
    return [int(np.flatnonzero(row)[0]) for row in b]


def _reduce(basis: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy() & 1
    for row, p in zip(basis, _pivots(basis)):
        hit = out[:, p] == 1
        out[hit] ^= row
    return out


def _mod2(x):
    return (x & 1).astype(np.uint8)


@dataclass
class BasicAlgebra:
    n: int
    parts: tuple
    dims: dict                     # a -> dim Y^a
    homs: dict                     # (a, b) -> (k, dim Y^a, dim Y^b) dense basis, rref when flattened
    positions: dict                # (a, b) -> list of (row, col) pivot positions
    mult: dict = field(default_factory=dict)   # (a, b, c) -> (k_ab, k_bc, k_ac)
    _rad: list | None = None
    _radical: dict | None = None

    @property
    def dim(self):
        return sum(self.k(a, b) for a in self.parts for b in self.parts)

    def k(self, a, b):
        return self.homs[(a, b)].shape[0]

    def index(self, a):
        return self.parts.index(a)

    def coords(self, a, b, x: np.ndarray) -> np.ndarray:
        """Coordinates of a map Y^a -> Y^b in the stored basis."""
        return np.array([x[r, c] for r, c in self.positions[(a, b)]], dtype=np.uint8)

    def identity(self, a) -> np.ndarray:
        return self.coords(a, a, np.eye(self.dims[a], dtype=np.uint8))

    def cartan(self) -> np.ndarray:
        return np.array([[self.k(a, b) for b in self.parts] for a in self.parts], dtype=np.int64)


def basic_algebra(catalog, progress=None) -> BasicAlgebra:
    parts = tuple(catalog.partitions)
    young = {a: catalog.young(a) for a in parts}
    dims = {a: young[a].dim for a in parts}
    homs, positions = {}, {}
    for a in parts:
        for b in parts:
            mats = hom_basis(young[a], young[b]).mats
            if not mats:
                homs[(a, b)] = np.zeros((0, dims[a], dims[b]), dtype=np.uint8)
                positions[(a, b)] = []
                continue
            flat = np.array([m.to_dense().reshape(-1) for m in mats], dtype=np.uint8)
            basis = _rref_rows(flat)
            if basis.shape[0] != len(mats):
                raise SchurError(f"dependent hom basis for {a!r} -> {b!r}")
            homs[(a, b)] = basis.reshape(-1, dims[a], dims[b])
            positions[(a, b)] = [divmod(p, dims[b]) for p in _pivots(basis)]
        if progress:
            progress(a)
    alg = BasicAlgebra(catalog.n, parts, dims, homs, positions)
    for b in parts:
        for a in parts:
            f = homs[(a, b)].astype(np.int64)
            for c in parts:
                g = homs[(b, c)].astype(np.int64)
                pos = positions[(a, c)]
                t = np.zeros((f.shape[0], g.shape[0], len(pos)), dtype=np.uint8)
                if f.shape[0] and g.shape[0] and pos:
                    for p, (r, col) in enumerate(pos):
                        t[:, :, p] = _mod2(f[:, r, :] @ g[:, :, col].T)
                alg.mult[(a, b, c)] = t
    _check_closure(alg, young)
    return alg


def _check_closure(alg, young, samples=3):
    # products must lie in the span: compare one full product per triple
    rng = np.random.default_rng(0)
    for (a, b, c), t in alg.mult.items():
        if not t.size:
            continue
        for _ in range(samples):
            i = rng.integers(t.shape[0])
            j = rng.integers(t.shape[1])
            full = _mod2(alg.homs[(a, b)][i].astype(np.int64) @ alg.homs[(b, c)][j].astype(np.int64))
            coef = t[i, j]
            back = _mod2(np.tensordot(coef.astype(np.int64), alg.homs[(a, c)].astype(np.int64), axes=1))
            if not np.array_equal(back, full):
                raise SchurError(f"composition {a!r}->{b!r}->{c!r} leaves the hom basis")


def structure_product(alg: BasicAlgebra, a, b, c, i, j) -> np.ndarray:
    return alg.mult[(a, b, c)][i, j]


# radical


def _span_products(alg, a, b, c, xs, ys):
    """Coordinates of all products x*y for rows xs in (a,b) and ys in (b,c)."""
    t = alg.mult[(a, b, c)].astype(np.int64)
    if not xs.shape[0] or not ys.shape[0] or not t.size:
        return np.zeros((0, alg.k(a, c)), dtype=np.uint8)
    left = np.tensordot(xs.astype(np.int64), t, axes=([1], [0]))       # (rx, k_bc, k_ac)
    prod = np.tensordot(ys.astype(np.int64), left, axes=([1], [1]))    # (ry, rx, k_ac)
    return _mod2(prod.reshape(-1, t.shape[2]))


def _block_product(alg, left, right):
    out = {}
    for a in alg.parts:
        for c in alg.parts:
            pieces = [_span_products(alg, a, b, c, left[(a, b)], right[(b, c)]) for b in alg.parts]
            stack = np.vstack(pieces) if pieces else np.zeros((0, alg.k(a, c)), dtype=np.uint8)
            out[(a, c)] = _rref_rows(stack)
    return out


def radical(alg: BasicAlgebra):
    """rad(A) blockwise: all off-diagonal blocks plus composites through other idempotents."""
    if alg._radical is not None:
        return alg._radical
    rad = {}
    for a in alg.parts:
        for b in alg.parts:
            if a != b:
                rad[(a, b)] = np.eye(alg.k(a, b), dtype=np.uint8)
    for a in alg.parts:
        pieces = [_span_products(alg, a, b, a, np.eye(alg.k(a, b), dtype=np.uint8),
                                 np.eye(alg.k(b, a), dtype=np.uint8)) for b in alg.parts if b != a]
        stack = np.vstack(pieces) if pieces else np.zeros((0, alg.k(a, a)), dtype=np.uint8)
        rad[(a, a)] = _rref_rows(stack)
        if rad[(a, a)].shape[0] != alg.k(a, a) - 1:
            raise SchurError(f"radical of End(Y{a!r}) has codimension {alg.k(a, a) - rad[(a, a)].shape[0]}")
    alg._radical = rad
    return rad


def radical_chain(alg: BasicAlgebra):
    """[rad, rad^2, ..., 0] as blockwise subspaces."""
    if alg._rad is None:
        r = radical(alg)
        chain = [r]
        while any(x.shape[0] for x in chain[-1].values()):
            chain.append(_block_product(alg, chain[-1], r))
            if len(chain) > alg.dim + 1:
                raise SchurError("radical is not nilpotent")
        alg._rad = chain
    return alg._rad


def radical_and_quiver(alg: BasicAlgebra):
    chain = radical_chain(alg)
    r1 = chain[0]
    r2 = chain[1] if len(chain) > 1 else {key: np.zeros((0, 0)) for key in r1}
    q = np.array([[r1[(a, b)].shape[0] - r2[(a, b)].shape[0] for b in alg.parts] for a in alg.parts], dtype=np.int64)
    return chain, q


def cartan_matrix(alg: BasicAlgebra) -> np.ndarray:
    return alg.cartan()


# right modules


@dataclass
class AModule:
    """A graded right module: V = sum of V e_a, with act[(a, b)] of shape (k_ab, dim V_a, dim V_b)."""

    alg: BasicAlgebra
    dims: dict
    act: dict
    name: str = ""

    @property
    def dim(self):
        return sum(self.dims.values())

    @property
    def idempotent_dims(self):
        return dict(self.dims)

    def apply(self, a, b, vecs, elem) -> np.ndarray:
        """vecs (rows in V_a) times the algebra element with coordinates elem in block (a, b)."""
        m = np.tensordot(elem.astype(np.int64), self.act[(a, b)].astype(np.int64), axes=1)
        return _mod2(vecs.astype(np.int64) @ m)

    def images(self, a, b, vecs, elems=None) -> np.ndarray:
        """All products of rows of vecs with basis elements (or rows of elems) of block (a, b)."""
        act = self.act[(a, b)].astype(np.int64)
        if elems is not None:
            act = np.tensordot(elems.astype(np.int64), act, axes=1)
        if not vecs.shape[0] or not act.shape[0] or not self.dims[b]:
            return np.zeros((0, self.dims[b]), dtype=np.uint8)
        return _mod2(np.tensordot(vecs.astype(np.int64), act, axes=([1], [1])).reshape(-1, self.dims[b]))

    def check(self, rng, samples=20) -> bool:
        parts = self.alg.parts
        for _ in range(samples):
            a, b, c = (parts[i] for i in rng.integers(len(parts), size=3))
            if not (self.dims[a] and self.alg.k(a, b) and self.alg.k(b, c)):
                continue
            v = rng.integers(0, 2, size=(1, self.dims[a]), dtype=np.uint8)
            x = rng.integers(0, 2, size=self.alg.k(a, b), dtype=np.uint8)
            y = rng.integers(0, 2, size=self.alg.k(b, c), dtype=np.uint8)
            lhs = self.apply(b, c, self.apply(a, b, v, x), y)
            xy = _mod2(np.tensordot(np.tensordot(x.astype(np.int64), self.alg.mult[(a, b, c)].astype(np.int64), axes=1),
                                    y.astype(np.int64), axes=([0], [0])))
            if not np.array_equal(lhs, self.apply(a, c, v, xy)):
                return False
        return True


def projective_A(alg: BasicAlgebra, lam) -> AModule:
    """P(lam) = e_lam A, with V_b = Hom(Y^lam, Y^b)."""
    lam = cb.Partition(lam)
    if lam not in alg.parts:
        raise SchurError(f"{lam!r} is not a partition of {alg.n}")
    dims = {b: alg.k(lam, b) for b in alg.parts}
    act = {(b, c): np.ascontiguousarray(alg.mult[(lam, b, c)].transpose(1, 0, 2)) for b in alg.parts for c in alg.parts}
    return AModule(alg, dims, act, f"P{lam!r}")


def _empty(mod):
    return {a: np.zeros((0, mod.dims[a]), dtype=np.uint8) for a in mod.alg.parts}


def generated_submodule(mod: AModule, gens: dict) -> dict:
    """Smallest graded submodule containing the given rows; one step suffices."""
    out = {}
    for b in mod.alg.parts:
        pieces = [gens[b]] if b in gens else []
        for a, v in gens.items():
            if v.shape[0]:
                pieces.append(mod.images(a, b, v))
        stack = np.vstack(pieces) if pieces else np.zeros((0, mod.dims[b]), dtype=np.uint8)
        out[b] = _rref_rows(stack)
    return out


def module_radical(mod: AModule, sub: dict | None = None) -> dict:
    """sub * rad(A) blockwise (sub defaults to the whole module)."""
    rad = radical(mod.alg)
    if sub is None:
        sub = {a: np.eye(mod.dims[a], dtype=np.uint8) for a in mod.alg.parts}
    out = {}
    for b in mod.alg.parts:
        pieces = [mod.images(a, b, sub[a], rad[(a, b)]) for a in mod.alg.parts if sub[a].shape[0] and rad[(a, b)].shape[0]]
        stack = np.vstack(pieces) if pieces else np.zeros((0, mod.dims[b]), dtype=np.uint8)
        out[b] = _rref_rows(stack)
    return out


def radical_layers(mod: AModule):
    """List of Counters: multiplicity of L(a) in each radical layer."""
    cur = {a: np.eye(mod.dims[a], dtype=np.uint8) for a in mod.alg.parts}
    layers = []
    while any(v.shape[0] for v in cur.values()):
        nxt = module_radical(mod, cur)
        layer = Counter({a: cur[a].shape[0] - nxt[a].shape[0] for a in mod.alg.parts if cur[a].shape[0] > nxt[a].shape[0]})
        if not layer:
            raise SchurError("radical series stalled")
        layers.append(layer)
        cur = nxt
    return layers


def module_socle(mod: AModule) -> dict:
    """Annihilator of rad(A), blockwise."""
    rad = radical(mod.alg)
    out = {}
    for a in mod.alg.parts:
        cols = [np.tensordot(rad[(a, b)].astype(np.int64), mod.act[(a, b)].astype(np.int64), axes=1)
                for b in mod.alg.parts if rad[(a, b)].shape[0] and mod.dims[b]]
        if not mod.dims[a]:
            out[a] = np.zeros((0, 0), dtype=np.uint8)
            continue
        if not cols:
            out[a] = np.eye(mod.dims[a], dtype=np.uint8)
            continue
        big = np.hstack([_mod2(c).transpose(1, 0, 2).reshape(mod.dims[a], -1) for c in cols])
        from .gf2core import left_nullspace

        out[a] = _rref_rows(left_nullspace(BitMatrix.from_dense(big)).to_dense()) \
            if big.shape[1] else np.eye(mod.dims[a], dtype=np.uint8)
    return out


def quotient(mod: AModule, sub: dict, name="") -> AModule:
    """mod / sub for a graded submodule given blockwise in rref."""
    keep = {}
    for a in mod.alg.parts:
        piv = set(_pivots(sub[a])) if sub[a].shape[0] else set()
        keep[a] = [j for j in range(mod.dims[a]) if j not in piv]
    dims = {a: len(keep[a]) for a in mod.alg.parts}
    act = {}
    for a in mod.alg.parts:
        for b in mod.alg.parts:
            k = mod.alg.k(a, b)
            m = np.zeros((k, dims[a], dims[b]), dtype=np.uint8)
            if k and dims[a] and dims[b]:
                rows = mod.act[(a, b)][:, keep[a], :]
                red = _reduce(sub[b], rows.reshape(-1, mod.dims[b])) if sub[b].shape[0] else rows.reshape(-1, mod.dims[b])
                m = red.reshape(k, dims[a], mod.dims[b])[:, :, keep[b]]
            act[(a, b)] = np.ascontiguousarray(m)
    return AModule(mod.alg, dims, act, name)


def weyl_module(alg: BasicAlgebra, lam) -> AModule:
    """P(lam) modulo the trace of every P(nu) with nu not dominated by lam."""
    lam = cb.Partition(lam)
    p = projective_A(alg, lam)
    bad = [b for b in alg.parts if not cb.dominates(lam, b)]
    tr = generated_submodule(p, {b: np.eye(p.dims[b], dtype=np.uint8) for b in bad})
    d = quotient(p, tr, f"Delta{lam!r}")
    for b, k in d.dims.items():
        if k and not cb.dominates(lam, b):
            raise SchurError(f"Delta{lam!r} keeps a factor L{b!r}")
    if d.dims[lam] != 1:
        raise SchurError(f"[Delta{lam!r} : L{lam!r}] = {d.dims[lam]}")
    return d


def decomposition_matrix(alg: BasicAlgebra, check=True) -> np.ndarray:
    dmat = np.array([[weyl_module(alg, a).dims[b] for b in alg.parts] for a in alg.parts], dtype=np.int64)
    if check and not np.array_equal(dmat.T @ dmat, alg.cartan()):
        raise SchurError("D^T D differs from the Cartan matrix")
    return dmat


def specht_filtration_multiplicities(alg: BasicAlgebra, lam, dmat=None) -> Counter:
    lam = cb.Partition(lam)
    if dmat is None:
        dmat = decomposition_matrix(alg)
    j = alg.index(lam)
    out = Counter({b: int(dmat[i, j]) for i, b in enumerate(alg.parts) if dmat[i, j]})
    total = sum(k * cb.hook_length_count(b) for b, k in out.items())
    if total != alg.dims[lam]:
        raise SchurError(f"Specht factors of Y{lam!r} have total dimension {total}, not {alg.dims[lam]}")
    return out


# blocks


def _components(c, parts):
    seen, blocks = set(), []
    for i in range(len(parts)):
        if i in seen:
            continue
        stack, comp = [i], []
        seen.add(i)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in range(len(parts)):
                if y not in seen and (c[x, y] or c[y, x]):
                    seen.add(y)
                    stack.append(y)
        blocks.append(sorted(comp))
    return blocks


@dataclass
class Fingerprint:
    cartan: tuple
    quiver: tuple
    layers: tuple
    order: tuple = ()      # block-local indices in canonical order

    def key(self):
        return (self.cartan, self.quiver, self.layers)

    def __eq__(self, other):
        return isinstance(other, Fingerprint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self):
        return {"cartan": [list(r) for r in self.cartan], "quiver": [list(r) for r in self.quiver],
                "layers": [[list(layer) for layer in p] for p in self.layers]}


def _encode(perm, c, q, layers):
    # perm[new] = old; layers per projective as Counters over old indices
    inv = {old: new for new, old in enumerate(perm)}
    cm = tuple(tuple(int(c[i, j]) for j in perm) for i in perm)
    qm = tuple(tuple(int(q[i, j]) for j in perm) for i in perm)
    ls = tuple(tuple(tuple(sorted(inv[x] for x in layer.elements())) for layer in layers[i]) for i in perm)
    return cm, qm, ls


def _refine(c, q, layers):
    k = len(c)
    colour = [(int(c[i, i]), len(layers[i]), tuple(sum(layer.values()) for layer in layers[i])) for i in range(k)]
    for _ in range(k):
        sig = [(colour[i], tuple(sorted((int(c[i, j]), int(q[i, j]), int(q[j, i]), colour[j]) for j in range(k))),
                tuple(tuple(sorted(colour[x] for x in layer.elements())) for layer in layers[i])) for i in range(k)]
        ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(map(str, colour))):
            return new
        colour = new
    return colour if all(isinstance(x, int) for x in colour) else list(range(k))


def fingerprint(c, q, layers) -> Fingerprint:
    """Canonical form under simultaneous relabelling, searched within refined colour classes."""
    k = len(c)
    colour = _refine(c, q, layers)
    classes = {}
    for i in range(k):
        classes.setdefault(colour[i], []).append(i)
    groups = [classes[x] for x in sorted(classes)]
    best = None
    for combo in itertools.product(*[itertools.permutations(g) for g in groups]):
        perm = [i for g in combo for i in g]
        enc = _encode(perm, c, q, layers)
        if best is None or enc < best[0]:
            best = (enc, tuple(perm))
    (cm, qm, ls), perm = best
    return Fingerprint(cm, qm, ls, perm)


@dataclass
class Block:
    partitions: tuple
    core: cb.Partition
    weight: int
    fingerprint: Fingerprint

    def canonical_partitions(self):
        return tuple(self.partitions[i] for i in self.fingerprint.order)


def blocks_and_fingerprint(alg: BasicAlgebra, quiver=None):
    c = alg.cartan()
    if quiver is None:
        quiver = radical_and_quiver(alg)[1]
    out = []
    for comp in _components(c, alg.parts):
        parts = tuple(alg.parts[i] for i in comp)
        cores = {cb.two_core_and_weight(p) for p in parts}
        if len(cores) != 1:
            raise SchurError(f"block {parts} mixes 2-cores {cores}")
        (core, weight), = cores
        sub_c = c[np.ix_(comp, comp)]
        sub_q = quiver[np.ix_(comp, comp)]
        local = {g: i for i, g in enumerate(comp)}
        layers = []
        for i in comp:
            lay = radical_layers(projective_A(alg, alg.parts[i]))
            layers.append([Counter({local[alg.index(b)]: m for b, m in layer.items()}) for layer in lay])
        out.append(Block(parts, core, weight, fingerprint(sub_c, sub_q, layers)))
    return out


def correspondence_aligns(b1: Block, b2: Block, mapping: dict) -> bool:
    """True when the partition map b1 -> b2 carries Cartan, quiver and layers onto each other."""
    if set(mapping) != set(b1.partitions) or set(mapping.values()) != set(b2.partitions):
        return False
    f1, f2 = b1.fingerprint, b2.fingerprint
    p1 = [b1.partitions[i] for i in f1.order]
    p2 = [b2.partitions[i] for i in f2.order]
    # relabel b1's canonical data through the mapping and compare with b2's canonical data
    pos2 = {p: i for i, p in enumerate(p2)}
    perm = [pos2[mapping[p]] for p in p1]
    if sorted(perm) != list(range(len(perm))):
        return False
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    k = len(perm)
    cm = tuple(tuple(f1.cartan[inv[a]][inv[b]] for b in range(k)) for a in range(k))
    qm = tuple(tuple(f1.quiver[inv[a]][inv[b]] for b in range(k)) for a in range(k))
    ls = tuple(tuple(tuple(sorted(perm[x] for x in layer)) for layer in f1.layers[inv[a]]) for a in range(k))
    return (cm, qm, ls) == (f2.cartan, f2.quiver, f2.layers)


@dataclass
class InjectivityReport:
    socle_dims: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(v == 1 for v in self.socle_dims.values())


def injectivity_check(alg: BasicAlgebra, catalog=None) -> InjectivityReport:
    """Socle dimension of P(lam) for each lam with Y^lam projective over the group algebra."""
    from .structure import is_projective

    rep = InjectivityReport()
    for a in alg.parts:
        proj = cb.is_column_2_regular(a) if catalog is None else is_projective(catalog.young(a))
        if proj:
            soc = module_socle(projective_A(alg, a))
            rep.socle_dims[a] = sum(v.shape[0] for v in soc.values())
    return rep
