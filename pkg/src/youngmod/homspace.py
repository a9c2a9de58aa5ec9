"""Hom spaces, the residue form on a local endomorphism ring, summand
multiplicities, splitting, isomorphism tests and Fitting decomposition.

Maps are matrices acting on row vectors: X : M -> N is dim M x dim N and
intertwines when rho_M(g) X == X rho_N(g).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit

from . import combinat as cb
from .gf2core import (
    BitMatrix,
    inverse,
    is_nilpotent,
    kronecker,
    left_nullspace,
    nullspace,
    nwords,
    rank,
    rref,
    solve,
)
from .modrep import GModule, SubmoduleWitness, dual, sub_and_quotient

DEFAULT_TRIALS = 200


def derive_rng(seed: int, *tags) -> np.random.Generator:
    """Counter-based generator keyed by a global seed and stage tags."""
    h = hashlib.sha256(repr(tuple(str(t) for t in tags)).encode()).digest()
    key = [int.from_bytes(h[i : i + 4], "little") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class HomBasis:
    source: GModule
    target: GModule
    mats: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.mats)

    def combine(self, bits) -> BitMatrix:
        out = BitMatrix(self.source.dim, self.target.dim)
        for b, x in zip(bits, self.mats):
            if b:
                out = out + x
        return out

    def random_element(self, rng) -> BitMatrix:
        return self.combine(rng.integers(0, 2, size=self.dim))


def is_hom(x: BitMatrix, m: GModule, k: GModule) -> bool:
    return all(gm @ x == x @ gk for gm, gk in zip(m.gens, k.gens))


# standard basis by spinning unit vectors


@njit(cache=True)
def _lowbit(v):
    for w in range(v.shape[0]):
        x = v[w]
        if x:
            for b in range(64):
                if (x >> np.uint64(b)) & np.uint64(1):
                    return w * 64 + b
    return -1


@njit(cache=True)
def _std_basis(S, C, dim):
    W = S.shape[1]
    B = np.zeros((dim, W), dtype=np.uint64)
    E = np.zeros((dim, W), dtype=np.uint64)
    T = np.zeros((dim, W), dtype=np.uint64)
    piv = np.full(dim, -1, dtype=np.int64)
    parent = np.full(dim, -1, dtype=np.int64)
    gen = np.full(dim, -1, dtype=np.int64)
    rel_j = np.zeros(2 * dim, dtype=np.int64)
    rel_g = np.zeros(2 * dim, dtype=np.int64)
    rel_t = np.zeros((2 * dim, W), dtype=np.uint64)
    v = np.zeros(W, dtype=np.uint64)
    t = np.zeros(W, dtype=np.uint64)
    img = np.zeros(W, dtype=np.uint64)
    one = np.uint64(1)
    nrel = 0
    r = 0
    j = 0
    u = 0
    while j < r or r < dim:
        if j == r:
            while True:
                v[:] = 0
                v[u >> 6] = one << np.uint64(u & 63)
                img[:] = v
                t[:] = 0
                u += 1
                for i in range(r):
                    p = piv[i]
                    if (v[p >> 6] >> np.uint64(p & 63)) & one:
                        v ^= E[i]
                        t ^= T[i]
                if _lowbit(v) >= 0:
                    break
            B[r] = img
            E[r] = v
            T[r] = t
            T[r, r >> 6] ^= one << np.uint64(r & 63)
            piv[r] = _lowbit(v)
            r += 1
            continue
        for g in range(2):
            G = S if g == 0 else C
            v[:] = 0
            for w in range(W):
                x = B[j, w]
                if x == 0:
                    continue
                for b in range(64):
                    if (x >> np.uint64(b)) & one:
                        v ^= G[w * 64 + b]
            img[:] = v
            t[:] = 0
            for i in range(r):
                p = piv[i]
                if (v[p >> 6] >> np.uint64(p & 63)) & one:
                    v ^= E[i]
                    t ^= T[i]
            if _lowbit(v) >= 0:
                B[r] = img
                E[r] = v
                T[r] = t
                T[r, r >> 6] ^= one << np.uint64(r & 63)
                piv[r] = _lowbit(v)
                parent[r] = j
                gen[r] = g
                r += 1
            else:
                rel_j[nrel] = j
                rel_g[nrel] = g
                rel_t[nrel] = t
                nrel += 1
        j += 1
    return B, parent, gen, rel_j[:nrel], rel_g[:nrel], rel_t[:nrel]


class StandardBasis(NamedTuple):
    basis: BitMatrix
    parent: np.ndarray
    gen: np.ndarray
    rel_j: np.ndarray
    rel_g: np.ndarray
    rel_t: np.ndarray

    @property
    def seeds(self):
        return [int(i) for i in np.flatnonzero(self.parent < 0)]


def standard_basis(m: GModule) -> StandardBasis:
    """Spin unit vectors in order; the tree of words and all closing relations."""
    d = m.dim
    B, parent, gen, rj, rg, rt = _std_basis(
        np.ascontiguousarray(m.s.data), np.ascontiguousarray(m.c.data), d
    )
    return StandardBasis(BitMatrix(d, d, B), parent, gen, rj, rg, rt)


def _bits(row, n):
    return np.unpackbits(row.view(np.uint8), bitorder="little")[:n]


def _hom_spin(m: GModule, k: GModule, sb: StandardBasis | None = None):
    d, dk = m.dim, k.dim
    if d == 0 or dk == 0:
        return []
    sb = sb or standard_basis(m)
    seeds = sb.seeds
    U = len(seeds) * dk
    wu = nwords(U)
    gt = [k.s.T, k.c.T]
    seed_pos = {s: i for i, s in enumerate(seeds)}
    RT = np.zeros((d, dk, wu), dtype=np.uint64)
    for l in range(d):
        p = sb.parent[l]
        if p < 0:
            i = seed_pos[l]
            cols = i * dk + np.arange(dk)
            RT[l, np.arange(dk), cols >> 6] = np.left_shift(np.uint64(1), (cols & 63).astype(np.uint64))
        else:
            RT[l] = (gt[sb.gen[l]] @ BitMatrix(dk, U, RT[p])).data
    basis = BitMatrix(0, U)
    buf = []
    nbuf = 0
    flush = max(U, 256)
    for j, g, trow in zip(sb.rel_j, sb.rel_g, sb.rel_t):
        rows = (gt[g] @ BitMatrix(dk, U, RT[j])).data
        idx = np.flatnonzero(_bits(trow, d))
        if len(idx):
            rows = rows ^ np.bitwise_xor.reduce(RT[idx], axis=0)
        buf.append(rows)
        nbuf += dk
        if nbuf >= flush:
            basis = rref(BitMatrix(basis.rows + nbuf, U, np.concatenate([basis.data] + buf)))[0]
            buf, nbuf = [], 0
            if basis.rows == U:
                return []
    if buf:
        basis = rref(BitMatrix(basis.rows + nbuf, U, np.concatenate([basis.data] + buf)))[0]
    sols = nullspace(basis)
    h = sols.rows
    if h == 0:
        return []
    imgs = [None] * d
    for l in range(d):
        p = sb.parent[l]
        if p < 0:
            i = seed_pos[l]
            imgs[l] = sols.take_cols(np.arange(i * dk, (i + 1) * dk))
        else:
            imgs[l] = imgs[p] @ k.gen("sc"[sb.gen[l]])
    stack = np.stack([x.data for x in imgs], axis=1)
    binv = inverse(sb.basis)
    return [binv @ BitMatrix(d, dk, stack[q]) for q in range(h)]


# Frobenius reciprocity for permutation modules


def _is_perm(m: GModule) -> bool:
    lab = m.label
    return lab.kind == "perm" and lab.partition is not None and m.dim == cb.multinomial(lab.partition)


def young_subgroup_words(n, a):
    """Words for the adjacent transpositions generating the row stabilizer of the first tabloid."""
    words = []
    start = 1
    for part in a:
        for i in range(start, start + part - 1):
            words.append(cb.word_for(n, cb.perm_from_cycles(n, [(i, i + 1)])))
        start += part
    return words


def fixed_points(k: GModule, words) -> BitMatrix:
    """Rows spanning the vectors of k fixed by every listed word."""
    if not words or k.dim == 0:
        return BitMatrix.identity(k.dim)
    one = BitMatrix.identity(k.dim)
    return left_nullspace(BitMatrix.hstack([k.word_matrix(w) + one for w in words]))


def _frob_from_perm(m: GModule, k: GModule):
    n, a = m.n, m.label.partition
    fixed = fixed_points(k, young_subgroup_words(n, a))
    h = fixed.rows
    if h == 0 or k.dim == 0:
        return []
    basis, action = cb.tabloid_basis(n, a)
    dm, dk = len(basis), k.dim
    t0 = cb.tabloid_index(n, a)[basis[0]]
    imgs = np.zeros((dm, h, nwords(dk)), dtype=np.uint64)
    imgs[t0] = fixed.data
    seen = np.zeros(dm, dtype=bool)
    seen[t0] = True
    frontier = np.array([t0])
    acts = {x: np.asarray(action[x]) for x in "sc"}
    while len(frontier):
        new = []
        for x in "sc":
            child = acts[x][frontier]
            keep = ~seen[child]
            if not keep.any():
                continue
            child, pos = np.unique(child[keep], return_index=True)
            src = frontier[keep][pos]
            block = BitMatrix(len(src) * h, dk, imgs[src].reshape(len(src) * h, -1)) @ k.gen(x)
            imgs[child] = block.data.reshape(len(src), h, -1)
            seen[child] = True
            new.append(child)
        frontier = np.concatenate(new) if new else np.array([], dtype=np.int64)
    return [BitMatrix(dm, dk, imgs[:, q, :]) for q in range(h)]


# dispatch


def hom_basis(m: GModule, k: GModule) -> HomBasis:
    if m.n != k.n:
        raise ValueError("degree mismatch")
    if m.dim == 0 or k.dim == 0:
        return HomBasis(m, k, [])
    if _is_perm(m):
        mats = _frob_from_perm(m, k)
    elif _is_perm(k):
        mats = [z.T for z in _frob_from_perm(k, dual(m))]
    else:
        sbm = standard_basis(m)
        kd = dual(k)
        sbk = standard_basis(kd)
        direct = len(sbm.seeds) * k.dim * m.dim
        flipped = len(sbk.seeds) * m.dim * k.dim
        if direct <= flipped:
            mats = _hom_spin(m, k, sbm)
        else:
            mats = [z.T for z in _hom_spin(kd, dual(m), sbk)]
    return HomBasis(m, k, mats)


def hom_basis_direct(m: GModule, k: GModule) -> HomBasis:
    """Nullspace of the full intertwining system; for cross-checks on small cases."""
    if m.n != k.n:
        raise ValueError("degree mismatch")
    dm, dk = m.dim, k.dim
    if dm == 0 or dk == 0:
        return HomBasis(m, k, [])
    im, ik = BitMatrix.identity(dm), BitMatrix.identity(dk)
    system = BitMatrix.vstack(
        [kronecker(gm, ik) + kronecker(im, gk.T) for gm, gk in zip(m.gens, k.gens)]
    )
    sols = nullspace(system)
    return HomBasis(m, k, [BitMatrix.from_dense(sols.to_dense()[q].reshape(dm, dk)) for q in range(sols.rows)])


def hom_dim(m, k) -> int:
    return hom_basis(m, k).dim


# the residue form of a local endomorphism ring


class ResidueForm:
    """Linear functional End(y) -> GF(2) vanishing on the radical.

    Stored as a sparse set of matrix positions (a, b) with weights, so that
    phi(X) = sum of X[a, b] over the support.
    """

    def __init__(self, y: GModule, end: HomBasis | None = None):
        end = end or hom_basis(y, y)
        self.y = y
        self.end = end
        d = y.dim
        values = [0 if is_nilpotent(e) else 1 for e in end.mats]
        if not any(values):
            raise ValueError("endomorphism ring has no unit: zero module?")
        vecs = BitMatrix.from_dense(np.stack([e.to_dense().reshape(-1) for e in end.mats]))
        _, piv = rref(vecs)
        tmat = vecs.take_cols(piv)
        c = solve(tmat, BitMatrix.from_dense(np.array(values, dtype=np.uint8).reshape(-1, 1)))
        if c is None:
            raise ValueError("endomorphism ring is not local")
        weights = c.to_dense()[:, 0]
        self.support = [divmod(p, d) for p, w in zip(piv, weights) if w]
        self.values = values

    def __call__(self, x: BitMatrix) -> int:
        return sum(x.get(a, b) for a, b in self.support) & 1

    def pairing(self, fs, gs) -> BitMatrix:
        """Matrix phi(f_i g_j) for f_i : y -> m and g_j : m -> y."""
        if not fs or not gs:
            return BitMatrix(len(fs), len(gs))
        out = BitMatrix(len(fs), len(gs))
        dm = fs[0].cols
        for a, b in self.support:
            rows = BitMatrix(len(fs), dm, np.stack([f.data[a] for f in fs]))
            cols = np.stack([(g.data[:, b >> 6] >> np.uint64(b & 63)) & np.uint64(1) for g in gs], axis=1)
            out = out + rows @ BitMatrix.from_dense(cols.astype(np.uint8))
        return out


def summand_multiplicity(m: GModule, y: GModule, form: ResidueForm | None = None) -> int:
    form = form or ResidueForm(y)
    fs = hom_basis(y, m).mats
    if not fs:
        return 0
    gs = hom_basis(m, y).mats
    return rank(form.pairing(fs, gs))


def split_pairs(form: ResidueForm, fs, gs, count=None):
    """Maps f_k, g_l with phi(f_k g_l) = delta, as many as the pairing rank allows."""
    p = form.pairing(fs, gs)
    _, rows = rref(p.T)
    _, cols = rref(p)
    if not rows:
        return [], []
    dinv = inverse(p.take_rows(rows).take_cols(cols)).to_dense()
    k = len(rows) if count is None else min(count, len(rows))
    f_out = [fs[i] for i in rows[:k]]
    g_out = []
    for col in range(k):
        g = BitMatrix(gs[0].rows, gs[0].cols)
        for r_, j in enumerate(cols):
            if dinv[r_, col]:
                g = g + gs[j]
        g_out.append(g)
    return f_out, g_out


def split_off(m: GModule, y: GModule, rng, trials: int = DEFAULT_TRIALS, form=None):
    """(complement, split mono y -> m, split epi m -> y) or None."""
    if m.n != y.n:
        raise ValueError("degree mismatch")
    form = form or ResidueForm(y)
    fb = hom_basis(y, m)
    if fb.dim == 0:
        return None
    gb = hom_basis(m, y)
    if gb.dim == 0:
        return None
    f = g = None
    for _ in range(trials):
        f1, g1 = fb.random_element(rng), gb.random_element(rng)
        if form(f1 @ g1):
            f, g = f1, g1
            break
    if f is None:
        if rank(form.pairing(fb.mats, gb.mats)) == 0:
            return None
        fl, gl = split_pairs(form, fb.mats, gb.mats, count=1)
        f, g = fl[0], gl[0]
    ker = rref(left_nullspace(g))[0]
    comp, _, _, _ = sub_and_quotient(m, SubmoduleWitness(m, ker))
    return comp, f, g


def iso_test(m: GModule, k: GModule, rng, trials: int = DEFAULT_TRIALS):
    if m.dim != k.dim or m.n != k.n:
        return None
    if m.dim == 0:
        return BitMatrix(0, 0)
    hb = hom_basis(m, k)
    if hb.dim == 0:
        return None
    for _ in range(trials):
        x = hb.random_element(rng)
        if rank(x) == m.dim:
            return x
    return None


class FittingPiece(NamedTuple):
    module: GModule
    embedding: BitMatrix
    failed_trials: int


def stable_power(f: BitMatrix) -> BitMatrix:
    """f^(2^k) once the rank stops dropping."""
    x = f
    r = rank(x)
    limit = max(1, int(np.ceil(np.log2(max(f.rows, 2))))) + 1
    for _ in range(limit):
        y = x @ x
        ry = rank(y)
        x = y
        if ry == r:
            break
        r = ry
    return x


def fitting_decompose(m: GModule, rng, trials: int = DEFAULT_TRIALS):
    """Split m by kernels and images of stable powers of random endomorphisms."""
    return _fitting(m, BitMatrix.identity(m.dim), rng, trials)


def _fitting(m, emb, rng, trials):
    if m.dim <= 1:
        return [FittingPiece(m, emb, trials)]
    end = hom_basis(m, m)
    for _ in range(trials):
        f = stable_power(end.random_element(rng))
        r = rank(f)
        if 0 < r < m.dim:
            image = rref(f)[0]
            kernel = rref(left_nullspace(f))[0]
            out = []
            for w in (image, kernel):
                sub, _, inc, _ = sub_and_quotient(m, SubmoduleWitness(m, w))
                out.extend(_fitting(sub, inc @ emb, rng, trials))
            return out
    return [FittingPiece(m, emb, trials)]


def trace_and_cotrace(m: GModule, s: GModule):
    if m.n != s.n:
        raise ValueError("degree mismatch")
    into = hom_basis(s, m).mats
    trace = rref(BitMatrix.vstack(into))[0] if into else BitMatrix(0, m.dim)
    out_of = hom_basis(m, s).mats
    if out_of:
        cotrace = rref(left_nullspace(BitMatrix.hstack(out_of)))[0]
    else:
        cotrace = BitMatrix.identity(m.dim)
    return SubmoduleWitness(m, trace), SubmoduleWitness(m, cotrace)
