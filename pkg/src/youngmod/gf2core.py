"""Dense linear algebra over GF(2) with rows packed 64 columns per word.

Column j of a row lives in word j // 64 at bit j % 64. Pad bits past the
last column are always zero, so whole-word comparisons are exact.
"""

from __future__ import annotations

import struct
from typing import NamedTuple

import numpy as np
from numba import njit

M4R_THRESHOLD = 64
MAGIC = b"YMF2"


def nwords(cols: int) -> int:
    return (cols + 63) >> 6


def _pad_mask(cols):
    r = cols & 63
    if r == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << r) - 1)


class BitMatrix:
    """Immutable dense matrix over GF(2)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        w = nwords(cols)
        if data is None:
            data = np.zeros((rows, w), dtype=np.uint64)
        else:
            data = np.ascontiguousarray(data, dtype=np.uint64)
            if data.shape != (rows, w):
                raise ValueError(f"data shape {data.shape} != {(rows, w)}")
            if w and rows and (cols & 63):
                mask = _pad_mask(cols)
                if (data[:, -1] & ~mask).any():
                    data = data.copy()
                    data[:, -1] &= mask
        data.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.data = data

    # construction

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        d = np.zeros((n, nwords(n)), dtype=np.uint64)
        idx = np.arange(n)
        d[idx, idx >> 6] = np.left_shift(np.uint64(1), (idx & 63).astype(np.uint64))
        return cls(n, n, d)

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = a.shape
        w = nwords(cols)
        if rows == 0 or cols == 0:
            return cls(rows, cols)
        padded = np.zeros((rows, w * 64), dtype=np.uint8)
        padded[:, :cols] = a & 1
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(rows, cols, packed.view("<u8").astype(np.uint64))

    @classmethod
    def random(cls, rows, cols, rng):
        w = nwords(cols)
        d = rng.integers(0, 2**64, size=(rows, w), dtype=np.uint64, endpoint=False)
        return cls(rows, cols, d)

    @classmethod
    def vstack(cls, mats, cols=None):
        mats = list(mats)
        if not mats:
            return cls(0, cols or 0)
        c = mats[0].cols
        if any(m.cols != c for m in mats):
            raise ValueError("column mismatch in vstack")
        return cls(sum(m.rows for m in mats), c, np.concatenate([m.data for m in mats], axis=0))

    @classmethod
    def hstack(cls, mats, rows=None):
        mats = list(mats)
        if not mats:
            return cls(rows or 0, 0)
        r = mats[0].rows
        if any(m.rows != r for m in mats):
            raise ValueError("row mismatch in hstack")
        if all(m.cols % 64 == 0 for m in mats[:-1]):
            return cls(r, sum(m.cols for m in mats), np.concatenate([m.data for m in mats], axis=1))
        return cls.from_dense(np.concatenate([m.to_dense() for m in mats], axis=1))

    # access

    def to_dense(self) -> np.ndarray:
        if self.rows == 0 or self.cols == 0:
            return np.zeros((self.rows, self.cols), dtype=np.uint8)
        b = np.ascontiguousarray(self.data).view(np.uint8)
        return np.unpackbits(b, axis=1, bitorder="little")[:, : self.cols]

    def get(self, i, j) -> int:
        return int((int(self.data[i, j >> 6]) >> (j & 63)) & 1)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def T(self):
        return transpose(self)

    def take_rows(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return BitMatrix(len(idx), self.cols, self.data[idx])

    def take_cols(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return BitMatrix.from_dense(self.to_dense()[:, idx])

    def row_slice(self, start, stop):
        return BitMatrix(stop - start, self.cols, self.data[start:stop])

    def is_zero(self) -> bool:
        return not self.data.any()

    def copy(self):
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return BitMatrix(self.rows, self.cols, self.data ^ other.data)

    __xor__ = __add__
    __sub__ = __add__

    def __matmul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


# kernels


@njit(cache=True)
def _mul_naive(a, b, out):
    m, wa = a.shape
    k = b.shape[0]
    for i in range(m):
        for w in range(wa):
            x = a[i, w]
            if x == 0:
                continue
            for t in range(64):
                if (x >> np.uint64(t)) & np.uint64(1):
                    r = w * 64 + t
                    if r < k:
                        out[i, :] ^= b[r, :]


@njit(cache=True)
def _mul_m4r(a, b, out):
    m = a.shape[0]
    k, wb = b.shape
    table = np.zeros((256, wb), dtype=np.uint64)
    for k0 in range(0, k, 8):
        nb = min(8, k - k0)
        for idx in range(1, 1 << nb):
            low = idx & (-idx)
            bit = 0
            while (1 << bit) != low:
                bit += 1
            table[idx, :] = table[idx ^ low, :] ^ b[k0 + bit, :]
        w = k0 >> 6
        sh = np.uint64(k0 & 63)
        for i in range(m):
            byte = (a[i, w] >> sh) & np.uint64(255)
            if byte:
                out[i, :] ^= table[byte, :]


@njit(cache=True)
def _rref_inplace(d, ncols):
    m = d.shape[0]
    pivots = np.empty(min(m, ncols), dtype=np.int64)
    r = 0
    for col in range(ncols):
        if r == m:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        p = -1
        for i in range(r, m):
            if d[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(w, d.shape[1]):
                t = d[p, j]
                d[p, j] = d[r, j]
                d[r, j] = t
        for i in range(m):
            if i != r and (d[i, w] & bit):
                for j in range(w, d.shape[1]):
                    d[i, j] ^= d[r, j]
        pivots[r] = col
        r += 1
    return pivots[:r]


@njit(cache=True)
def _reduce_against(vecs, basis, pivots):
    # basis is reduced echelon with the given pivots
    for i in range(vecs.shape[0]):
        for r in range(pivots.shape[0]):
            col = pivots[r]
            w = col >> 6
            if (vecs[i, w] >> np.uint64(col & 63)) & np.uint64(1):
                for j in range(vecs.shape[1]):
                    vecs[i, j] ^= basis[r, j]


# operations


def multiply(a: BitMatrix, b: BitMatrix, threshold: int = M4R_THRESHOLD) -> BitMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch {a.shape} x {b.shape}")
    out = np.zeros((a.rows, nwords(b.cols)), dtype=np.uint64)
    if a.rows and a.cols and b.cols:
        if a.rows >= threshold and a.cols >= threshold:
            _mul_m4r(a.data, b.data, out)
        else:
            _mul_naive(a.data, b.data, out)
    return BitMatrix(a.rows, b.cols, out)


class Echelon(NamedTuple):
    rref: BitMatrix
    rank: int
    pivots: list
    nullspace: BitMatrix

    @property
    def basis(self):
        return self.rref.row_slice(0, self.rank)


def _rref_data(a):
    d = np.array(a.data, dtype=np.uint64, copy=True)
    piv = _rref_inplace(d, a.cols) if a.rows and a.cols else np.zeros(0, dtype=np.int64)
    return d, piv


def rref(a: BitMatrix):
    """Reduced echelon rows (rank rows only) and pivot columns."""
    d, piv = _rref_data(a)
    return BitMatrix(len(piv), a.cols, d[: len(piv)]), [int(p) for p in piv]


def echelonize(a: BitMatrix) -> Echelon:
    d, piv = _rref_data(a)
    r = len(piv)
    full = BitMatrix(a.rows, a.cols, d)
    pivots = [int(p) for p in piv]
    return Echelon(full, r, pivots, _nullspace_from(BitMatrix(r, a.cols, d[:r]), pivots, a.cols))


def _nullspace_from(basis, pivots, cols):
    pset = set(pivots)
    free = [j for j in range(cols) if j not in pset]
    nd = np.zeros((len(free), cols), dtype=np.uint8)
    if free:
        nd[np.arange(len(free)), free] = 1
        if pivots:
            dense = basis.to_dense()
            nd[:, pivots] = dense[:, free].T
    return BitMatrix.from_dense(nd) if free else BitMatrix(0, cols)


def rank(a: BitMatrix) -> int:
    return len(_rref_data(a)[1])


def nullspace(a: BitMatrix) -> BitMatrix:
    """Rows spanning {x : a x^T = 0}."""
    basis, piv = rref(a)
    return _nullspace_from(basis, piv, a.cols)


def left_nullspace(a: BitMatrix) -> BitMatrix:
    """Rows spanning {y : y a = 0}."""
    return nullspace(transpose(a))


def transpose(a: BitMatrix) -> BitMatrix:
    return BitMatrix.from_dense(np.ascontiguousarray(a.to_dense().T))


def kronecker(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    return BitMatrix.from_dense(np.kron(a.to_dense(), b.to_dense()))


def solve(a: BitMatrix, b: BitMatrix):
    """X with a X = b, or None when the system is inconsistent."""
    if a.rows != b.rows:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    aug = BitMatrix.hstack([a, b]) if b.cols else a
    basis, piv = rref(aug)
    if any(p >= a.cols for p in piv):
        return None
    x = np.zeros((a.cols, b.cols), dtype=np.uint8)
    if b.cols and piv:
        dense = basis.to_dense()
        x[piv, :] = dense[:, a.cols:]
    return BitMatrix.from_dense(x) if b.cols else BitMatrix(a.cols, 0)


def solve_left(a: BitMatrix, b: BitMatrix):
    """X with X a = b, or None."""
    x = solve(transpose(a), transpose(b))
    return None if x is None else transpose(x)


def inverse(a: BitMatrix) -> BitMatrix:
    n = a.rows
    if a.cols != n:
        raise ValueError("inverse of a non-square matrix")
    basis, piv = rref(BitMatrix.hstack([a, BitMatrix.identity(n)]))
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ValueError("singular matrix")
    return basis.take_cols(np.arange(n, 2 * n))


def power(a: BitMatrix, e: int) -> BitMatrix:
    result = BitMatrix.identity(a.rows)
    base = a
    while e:
        if e & 1:
            result = result @ base
        e >>= 1
        if e:
            base = base @ base
    return result


def is_nilpotent(a: BitMatrix) -> bool:
    x = a
    k = 1
    while k < a.rows:
        x = x @ x
        k *= 2
        if x.is_zero():
            return True
    return x.is_zero()


# row spaces


def reduce_mod(basis: BitMatrix, pivots, vecs: BitMatrix) -> BitMatrix:
    """Remainders of vecs modulo the span of a reduced echelon basis."""
    d = np.array(vecs.data, copy=True)
    if len(pivots):
        _reduce_against(d, basis.data, np.asarray(pivots, dtype=np.int64))
    return BitMatrix(vecs.rows, vecs.cols, d)


def coords(basis: BitMatrix, pivots, vecs: BitMatrix):
    """Coordinates of vecs in a reduced echelon basis, or None if some row is outside."""
    c = vecs.take_cols(pivots) if pivots else BitMatrix(vecs.rows, 0)
    if pivots and not (c @ basis == vecs):
        return None
    if not pivots and not vecs.is_zero():
        return None
    return c


def span_sum(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    return rref(BitMatrix.vstack([a, b]))[0]


def intersect(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Reduced basis of rowspace(a) ∩ rowspace(b)."""
    n = a.cols
    if a.rows == 0 or b.rows == 0:
        return BitMatrix(0, n)
    top = BitMatrix.hstack([a, a])
    bot = BitMatrix.hstack([b, BitMatrix(b.rows, n)])
    basis, piv = rref(BitMatrix.vstack([top, bot]))
    keep = [i for i, p in enumerate(piv) if p >= n]
    if not keep:
        return BitMatrix(0, n)
    return rref(basis.take_rows(keep).take_cols(np.arange(n, 2 * n)))[0]


def contains(big: BitMatrix, small: BitMatrix) -> bool:
    basis, piv = rref(big)
    return reduce_mod(basis, piv, small).is_zero()


def same_space(a: BitMatrix, b: BitMatrix) -> bool:
    return rref(a)[0] == rref(b)[0]


# serialization


def to_bytes(a: BitMatrix) -> bytes:
    return MAGIC + struct.pack("<II", a.rows, a.cols) + a.data.astype("<u8").tobytes()


def from_bytes(buf: bytes, offset: int = 0):
    """Decode one matrix starting at offset; returns (matrix, next offset)."""
    if buf[offset : offset + 4] != MAGIC:
        raise ValueError("bad matrix magic")
    rows, cols = struct.unpack_from("<II", buf, offset + 4)
    start = offset + 12
    n = rows * nwords(cols) * 8
    data = np.frombuffer(buf[start : start + n], dtype="<u8").astype(np.uint64)
    return BitMatrix(rows, cols, data.reshape(rows, nwords(cols))), start + n
