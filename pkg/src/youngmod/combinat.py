"""Partitions, dominance, tableaux and tabloids for S_n.

Permutations are tuples p with p[i] the image of symbol i (0-based) and
compose left to right: (p * q)[i] = q[p[i]], matching the right action
v -> v g used everywhere else.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from functools import lru_cache


class Partition(tuple):
    """Weakly decreasing tuple of positive integers."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"non-positive part in {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts not weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def n(self) -> int:
        return sum(self)

    def __repr__(self):
        return "[" + format_partition(self) + "]"

    def __str__(self):
        return format_partition(self)


def _groups(p):
    return [(v, len(list(g))) for v, g in itertools.groupby(p)]


def format_partition(p, caret=False) -> str:
    """Comma-joined parts; caret=True uses exponents, e.g. 2,1^3."""
    if not caret:
        return ",".join(str(x) for x in p)
    return ",".join(str(v) if k == 1 else f"{v}^{k}" for v, k in _groups(p))


def file_token(p) -> str:
    """Filesystem form: [2,1^3] -> 2-1e3."""
    return "-".join(str(v) if k == 1 else f"{v}e{k}" for v, k in _groups(p))


_TOKEN = re.compile(r"^\s*(\d+)\s*(?:[\^e]\s*(\d+))?\s*$")


def parse_partition(text: str) -> Partition:
    """Accepts "2,1,1,1", "2,1^3", "[2,1^3]" and the file form "2-1e3"."""
    s = text.strip().strip("[]()")
    if not s:
        return Partition(())
    sep = "," if "," in s else "-" if "-" in s else ","
    parts = []
    for tok in s.split(sep):
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"cannot parse partition {text!r}")
        parts.extend([int(m.group(1))] * int(m.group(2) or 1))
    return Partition(sorted(parts, reverse=True))


@lru_cache(maxsize=None)
def partitions_desc(n: int):
    """All partitions of n in descending lexicographic order."""
    if n <= 0:
        return ()
    out = []

    def rec(rem, cap, acc):
        if rem == 0:
            out.append(Partition(acc))
            return
        for p in range(min(rem, cap), 0, -1):
            rec(rem - p, p, acc + [p])

    rec(n, n, [])
    return tuple(out)


def dominates(a, b) -> bool:
    if sum(a) != sum(b):
        raise ValueError("dominance compares partitions of the same n")
    sa = sb = 0
    for i in range(max(len(a), len(b))):
        sa += a[i] if i < len(a) else 0
        sb += b[i] if i < len(b) else 0
        if sa < sb:
            return False
    return True


def conjugate(a) -> Partition:
    if not a:
        return Partition(())
    return Partition([sum(1 for p in a if p > i) for i in range(a[0])])


def is_2_regular(a) -> bool:
    return len(set(a)) == len(a)


def is_column_2_regular(a) -> bool:
    return is_2_regular(conjugate(a))


def two_core_and_weight(a):
    """Strip rim 2-hooks, always the one whose hand is in the highest row."""
    parts = list(a)
    weight = 0
    while True:
        move = _highest_rim_domino(parts)
        if move is None:
            break
        parts = move
        weight += 1
    return Partition(parts), weight


def _highest_rim_domino(parts):
    # a rim 2-hook is a horizontal domino at the end of row i (row i+1 short
    # enough) or a vertical domino ending rows i, i+1 of equal length
    rows = len(parts)
    for i in range(rows):
        nxt = parts[i + 1] if i + 1 < rows else 0
        if parts[i] - 2 >= nxt:
            q = parts[:]
            q[i] -= 2
            return [x for x in q if x]
        if i + 1 < rows and parts[i] == parts[i + 1]:
            after = parts[i + 2] if i + 2 < rows else 0
            if parts[i + 1] - 1 >= after:
                q = parts[:]
                q[i] -= 1
                q[i + 1] -= 1
                return [x for x in q if x]
    return None


def multinomial(a) -> int:
    out = math.factorial(sum(a))
    for p in a:
        out //= math.factorial(p)
    return out


def hook_length_count(a) -> int:
    conj = conjugate(a)
    prod = 1
    for i, row in enumerate(a):
        for j in range(row):
            prod *= row - j + conj[j] - i - 1
    return math.factorial(sum(a)) // prod


# permutations


def perm_compose(p, q):
    """p then q."""
    return tuple(q[x] for x in p)


def perm_inverse(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def perm_from_cycles(n, cycles):
    """Cycles written with 1-based symbols."""
    img = list(range(n))
    for cyc in cycles:
        for i, x in enumerate(cyc):
            img[x - 1] = cyc[(i + 1) % len(cyc)] - 1
    return tuple(img)


def generator_perms(n):
    """s = (1 2) and c = (1 2 ... n)."""
    s = perm_from_cycles(n, [(1, 2)] if n >= 2 else [])
    c = perm_from_cycles(n, [tuple(range(1, n + 1))] if n >= 2 else [])
    return {"s": s, "c": c}


def word_perm(n, word):
    g = generator_perms(n)
    p = tuple(range(n))
    for ch in word:
        p = perm_compose(p, g[ch])
    return p


@lru_cache(maxsize=None)
def _word_table(n):
    gens = generator_perms(n)
    start = tuple(range(n))
    words = {start: ""}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for ch in "sc":
            q = perm_compose(p, gens[ch])
            if q not in words:
                words[q] = words[p] + ch
                queue.append(q)
    return words


def word_for(n, perm) -> str:
    """Shortest word in s, c (first s, then c, breadth first) giving perm."""
    return _word_table(n)[tuple(perm)]


# tabloids and tableaux


class Tabloid(tuple):
    """Tuple of sorted row tuples of 1-based symbols."""

    def act(self, perm):
        return Tabloid(tuple(sorted(perm[x - 1] + 1 for x in row)) for row in self)


@lru_cache(maxsize=None)
def _tabloids(n, a):
    out = []

    def rec(remaining, rows, acc):
        if not rows:
            out.append(Tabloid(acc))
            return
        for combo in itertools.combinations(remaining, rows[0]):
            rest = tuple(x for x in remaining if x not in combo)
            rec(rest, rows[1:], acc + [combo])

    rec(tuple(range(1, n + 1)), tuple(a), [])
    out.sort()
    return tuple(out)


@lru_cache(maxsize=None)
def tabloid_basis(n, a):
    """Sorted tabloids of shape a and the index permutation of each generator."""
    a = Partition(a)
    if a.n != n:
        raise ValueError(f"{a!r} is not a partition of {n}")
    basis = _tabloids(n, a)
    index = {t: i for i, t in enumerate(basis)}
    action = {}
    for name, perm in generator_perms(n).items():
        action[name] = tuple(index[t.act(perm)] for t in basis)
    return basis, action


def tabloid_index(n, a):
    basis, _ = tabloid_basis(n, a)
    return {t: i for i, t in enumerate(basis)}


@lru_cache(maxsize=None)
def standard_tableaux(a):
    """All standard tableaux of shape a as tuples of row tuples."""
    a = Partition(a)
    n = a.n
    out = []

    def rec(k, rows):
        if k > n:
            out.append(tuple(tuple(r) for r in rows))
            return
        for i in range(len(a)):
            if len(rows[i]) < a[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(k)
                rec(k + 1, rows)
                rows[i].pop()

    rec(1, [[] for _ in a])
    return tuple(out)


def tableau_columns(t):
    width = len(t[0]) if t else 0
    return [tuple(row[j] for row in t if j < len(row)) for j in range(width)]
