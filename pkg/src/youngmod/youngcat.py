"""Young modules Y^lambda for n <= 7 and the 2-Kostka numbers.

Partitions are processed in descending lexicographic order. For each mu the
permutation module M^mu is decomposed by splitting off the Young modules
already built; the piece that remains is Y^mu. Large permutation modules are
not decomposed: their Kostka column comes from the residue pairing alone and
the (projective) Young module itself from a tensor product.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import combinat as cb
from .gf2core import BitMatrix, inverse, left_nullspace, rank, rref
from .homspace import (
    DEFAULT_TRIALS,
    ResidueForm,
    derive_rng,
    fitting_decompose,
    hom_basis,
    iso_test,
    split_pairs,
    stable_power,
)
from .modrep import (
    GModule,
    Label,
    SubmoduleWitness,
    dual,
    perm_module,
    restrict_to_sylow2,
    spin,
    sub_and_quotient,
    sylow_elements,
    sylow_words,
    tensor,
)
from .structure import (
    is_projective,
    radical,
    composition_factors,
    radical_series,
    remove_from_bottom,
    remove_from_top,
    simples_for,
    subquotient,
    top_counts,
)

log = logging.getLogger(__name__)

SPLIT_THRESHOLD = 900


class CatalogError(RuntimeError):
    pass


@dataclass
class CatalogConfig:
    split_threshold: int = SPLIT_THRESHOLD
    trials: int = DEFAULT_TRIALS
    certify_trials: int = DEFAULT_TRIALS


@dataclass
class YoungEntry:
    partition: cb.Partition
    module: GModule
    route: str
    log: dict = field(default_factory=dict)


@dataclass
class YoungCatalog:
    n: int
    seed: int
    entries: dict = field(default_factory=dict)
    kostka: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @property
    def partitions(self):
        return cb.partitions_desc(self.n)

    def young(self, a) -> GModule:
        return self.entries[cb.Partition(a)].module

    def kostka_matrix(self) -> np.ndarray:
        ps = self.partitions
        return np.array([[self.kostka.get((a, b), 0) for b in ps] for a in ps], dtype=np.int64)


def _young_label(a, route):
    return Label("young", cb.Partition(a), route)


# route A: decompose M^mu inside its own coordinates


def _split_all(m, young, forms, order, rng, trials, record):
    """Split off every earlier Young module from m; returns the projector onto the rest."""
    dm = m.dim
    proj = BitMatrix.identity(dm)
    for lam in order:
        y = young[lam]
        form = forms[lam]
        fs = hom_basis(y, m).mats
        if not fs:
            record[lam] = 0
            continue
        gs = hom_basis(m, y).mats
        mult = rank(form.pairing(fs, gs))
        record[lam] = mult
        for _ in range(mult):
            fp = [f @ proj for f in fs]
            f = g = None
            for _ in range(trials):
                f1 = _rand_comb(fp, rng)
                g1 = _rand_comb(gs, rng)
                if f1 is not None and g1 is not None and form(f1 @ g1):
                    f, g = f1, g1
                    break
            if f is None:
                fl, gl = split_pairs(form, fp, gs, count=1)
                if not fl:
                    raise CatalogError(f"pairing lost rank while splitting {lam!r}")
                f, g = fl[0], gl[0]
            e = g @ inverse(f @ g) @ f
            proj = proj @ (BitMatrix.identity(dm) + e)
    return proj


def _rand_comb(mats, rng):
    if not mats:
        return None
    bits = rng.integers(0, 2, size=len(mats))
    out = BitMatrix(mats[0].rows, mats[0].cols)
    for b, x in zip(bits, mats):
        if b:
            out = out + x
    return out


def _pairing_column(m, young, forms, order, record):
    for lam in order:
        fs = hom_basis(young[lam], m).mats
        if not fs:
            record[lam] = 0
            continue
        gs = hom_basis(m, young[lam]).mats
        record[lam] = rank(forms[lam].pairing(fs, gs))


def certify_indecomposable(y: GModule, rng, trials) -> int:
    pieces = fitting_decompose(y, rng, trials)
    if len(pieces) != 1:
        raise CatalogError(f"{y!r} splits into {[p.module.dim for p in pieces]}")
    return pieces[0].failed_trials


def build_catalog(n: int, seed: int = 0, config: CatalogConfig | None = None, progress=None) -> YoungCatalog:
    if not 1 <= n <= 7:
        raise ValueError("catalog supports 1 <= n <= 7")
    config = config or CatalogConfig()
    cat = YoungCatalog(n, seed)
    young, forms = {}, {}
    for mu in cb.partitions_desc(n):
        order = [lam for lam in young if lam != mu and cb.dominates(lam, mu)]
        dm = cb.multinomial(mu)
        rec = {}
        info = {"dim_M": dm}
        if dm <= config.split_threshold:
            m = perm_module(n, mu)
            rng = derive_rng(seed, "split", cb.file_token(mu))
            proj = _split_all(m, young, forms, order, rng, config.trials, rec)
            basis, piv = rref(proj)
            y, _, _, _ = sub_and_quotient(m, SubmoduleWitness(m, basis))
            route = "split"
        else:
            m = perm_module(n, mu)
            _pairing_column(m, young, forms, order, rec)
            del m
            if cb.is_column_2_regular(mu) and (n, mu) in TENSOR_RECIPES:
                y = projective_young(n, mu, cat, seed=seed, trials=config.trials, young=young)
                route = "tensor"
            else:
                m = perm_module(n, mu)
                rng = derive_rng(seed, "split", cb.file_token(mu))
                proj = _split_all(m, young, forms, order, rng, config.trials, {})
                y, _, _, _ = sub_and_quotient(m, SubmoduleWitness(m, rref(proj)[0]))
                route = "split-fallback"
        y = y.relabel("young", mu, route)
        expected = dm - sum(k * young[lam].dim for lam, k in rec.items())
        if y.dim != expected:
            raise CatalogError(f"Y{mu!r}: dim {y.dim} but bookkeeping gives {expected}")
        info["failed_split_trials"] = certify_indecomposable(
            y, derive_rng(seed, "certify", cb.file_token(mu)), config.certify_trials)
        young[mu] = y
        forms[mu] = ResidueForm(y)
        for lam, k in rec.items():
            if k:
                cat.kostka[(lam, mu)] = k
        cat.kostka[(mu, mu)] = 1
        info["route"] = route
        cat.entries[mu] = YoungEntry(mu, y, route, info)
        cat.provenance[mu] = info
        if progress:
            progress(mu, y)
    return cat


# tensor route for projective Young modules

U = "U"
TENSOR_RECIPES = {
    (6, cb.Partition([2, 1, 1, 1, 1])): ([4, 1, 1], U),
    (6, cb.Partition([1] * 6)): ([3, 1, 1, 1], U),
    (7, cb.Partition([4, 1, 1, 1])): ([5, 1, 1], [6, 1]),
    (7, cb.Partition([2, 2, 1, 1, 1])): ([3, 2, 1, 1], [6, 1]),
    (7, cb.Partition([2, 1, 1, 1, 1, 1])): ([4, 1, 1, 1], U),
    (7, cb.Partition([1] * 7)): ([2, 1, 1, 1, 1, 1], [6, 1]),
}

U_SOURCES = {6: [3, 1, 1, 1], 7: [5, 1, 1]}


def sign_extension(n) -> GModule:
    """The non-split extension of the trivial module by itself through the sign."""
    s = BitMatrix.from_dense([[1, 1], [0, 1]])
    c = BitMatrix.from_dense([[1, (n - 1) & 1], [0, 1]])
    return GModule(n, s, c, Label("derived", None, "sign extension"))


def _strip(a, others):
    while True:
        before = a.dim
        for d in others:
            a = remove_from_top(a, d)
            a = remove_from_bottom(a, d)
        if a.dim == before:
            return a


def _trivial_section(a, simples):
    """Two-dimensional non-split piece of a module whose factors are all trivial."""
    if a.dim < 2 or radical(a, simples)[0].rows == 0:
        return None
    for j in range(a.dim):
        w = spin(a, BitMatrix.from_dense(np.eye(a.dim, dtype=np.uint8)[j : j + 1]))
        if w.dim < 2:
            continue
        sub = sub_and_quotient(a, w)[0]
        rad = radical(sub, simples)[0]
        if rad.rows:
            return sub_and_quotient(sub, SubmoduleWitness(sub, rad.row_slice(0, rad.rows - 1)))[1]
    return None


def build_uniserial_U(n, catalog=None, source=None, seed=0, trials=DEFAULT_TRIALS) -> GModule:
    """A two-dimensional uniserial section, both factors trivial, of a Young module.

    Radical sections of the source are stripped of nontrivial simples at the
    top and bottom; while nontrivial factors survive in the middle, one
    trivial top or bottom factor at a time is cut away along a random map.
    """
    if source is None:
        if n not in U_SOURCES:
            raise CatalogError(f"no source module configured for U at n={n}")
        source = catalog.young(U_SOURCES[n])
    simples = simples_for(n)
    triv = simples[cb.Partition([n])]
    others = [d for a, d in simples.items() if a != cb.Partition([n])]
    rng = derive_rng(seed, "U", n)
    _, chain = radical_series(source, simples)
    L = len(chain) - 1
    sections = [(i, j) for k in range(2, L + 1) for i in range(L - k + 1) for j in [i + k]]
    for i, j in sections:
        for _ in range(max(1, trials // len(sections))):
            a = subquotient(source, chain[i], chain[j])
            while True:
                a = _strip(a, others)
                if a.dim < 2:
                    break
                if _all_trivial(a, simples):
                    u = _trivial_section(a, simples)
                    if u is not None:
                        return u.relabel("derived", None, "U")
                    break
                a = _cut_trivial(a, triv, rng)
                if a is None:
                    break
    raise CatalogError("no two-dimensional trivial self-extension found as a section")


def _all_trivial(a, simples):
    return set(composition_factors(a, simples)) <= {cb.Partition([a.n])}


def _cut_trivial(a, triv, rng):
    if rng.integers(2):
        maps = hom_basis(a, triv)
        if maps.dim:
            x = maps.random_element(rng)
            if not x.is_zero():
                return sub_and_quotient(a, SubmoduleWitness(a, rref(left_nullspace(x))[0]))[0]
    maps = hom_basis(triv, a)
    if maps.dim:
        x = maps.random_element(rng)
        if not x.is_zero():
            return sub_and_quotient(a, SubmoduleWitness(a, x))[1]
    return None


# relative trace from the trivial subgroup, through the fixed Sylow subgroup


@lru_cache(maxsize=None)
def coset_tree(n):
    """Right coset representatives of the Sylow subgroup as a BFS tree (parent, generator)."""
    group = {tuple(range(n))}
    frontier = list(group)
    gens_p = [cb.word_perm(n, w) for w in sylow_words(n)]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens_p:
                q = cb.perm_compose(p, g)
                if q not in group:
                    group.add(q)
                    nxt.append(q)
        frontier = nxt
    gens = cb.generator_perms(n)

    def key(r):
        return min(cb.perm_compose(h, r) for h in group)

    reps = [tuple(range(n))]
    seen = {key(reps[0])}
    tree = [(-1, "")]
    k = 0
    while k < len(reps):
        for x in "sc":
            q = cb.perm_compose(reps[k], gens[x])
            kq = key(q)
            if kq not in seen:
                seen.add(kq)
                reps.append(q)
                tree.append((k, x))
        k += 1
    return tuple(tree)


class RelativeTrace:
    """phi -> sum over g in S_n of rho(g)^-1 phi rho(g); lands in End(m)."""

    def __init__(self, m: GModule):
        one = BitMatrix.identity(m.dim)
        inv = {"s": m.s, "c": inverse(m.c)}
        fw, bw = [one], [one]
        for parent, x in coset_tree(m.n)[1:]:
            fw.append(fw[parent] @ m.gen(x))
            bw.append(inv[x] @ bw[parent])
        self.cosets = list(zip(bw, fw))
        mats, _ = restrict_to_sylow2(m)
        minv = [inverse(x) for x in mats]
        pf, pb = [one], [one]
        for parent, gi in sylow_elements(m.n)[1:]:
            pf.append(pf[parent] @ mats[gi])
            pb.append(minv[gi] @ pb[parent])
        self.sylow = list(zip(pb, pf))

    def __call__(self, phi: BitMatrix) -> BitMatrix:
        inner = BitMatrix(phi.rows, phi.cols)
        for b, f in self.sylow:
            inner = inner + b @ phi @ f
        out = BitMatrix(phi.rows, phi.cols)
        for b, f in self.cosets:
            out = out + b @ inner @ f
        return out


def _fitting_parts(m, theta):
    theta = stable_power(theta)
    img = rref(theta)[0]
    ker = rref(left_nullspace(theta))[0]
    return [sub_and_quotient(m, SubmoduleWitness(m, w))[0] for w in (img, ker) if w.rows]


def projective_summand(t: GModule, top, rng, trials=DEFAULT_TRIALS, simples=None) -> GModule:
    """The projective cover of D^top, found as a summand of t.

    Stable images of relative traces are projective summands. Once inside a
    projective module every endomorphism is a trace, so splitting continues
    until the top is D^top alone.
    """
    simples = simples or simples_for(t.n)
    top = cb.Partition(top)
    d = simples[top]
    cur = t
    if not is_projective(t):
        tr = RelativeTrace(t)
        for _ in range(trials):
            th = tr(BitMatrix.random(t.dim, t.dim, rng))
            if th.is_zero():
                continue
            img = _fitting_parts(t, th)[0]
            if hom_basis(img, d).dim:
                cur = img
                break
        else:
            raise CatalogError(f"no projective summand with top D{top!r} found")
    while dict(top_counts(cur, simples)) != {top: 1}:
        tr = RelativeTrace(cur)
        for _ in range(trials):
            parts = _fitting_parts(cur, tr(BitMatrix.random(cur.dim, cur.dim, rng)))
            good = [p for p in parts if p.dim < cur.dim and hom_basis(p, d).dim]
            if good:
                cur = min(good, key=lambda p: p.dim)
                break
        else:
            raise CatalogError(f"could not split {cur!r} further")
    return cur


def projective_young(n, target, catalog=None, seed=0, trials=DEFAULT_TRIALS, young=None) -> GModule:
    """Y^target for column 2-regular target, as a summand of a configured tensor product."""
    target = cb.Partition(target)
    if not cb.is_column_2_regular(target):
        raise CatalogError(f"{target!r} is not column 2-regular")
    if (n, target) not in TENSOR_RECIPES:
        raise CatalogError(f"no tensor recipe for {target!r}")
    if young is None:
        young = {p: e.module for p, e in catalog.entries.items()}
    simples = simples_for(n)
    left, right = TENSOR_RECIPES[(n, target)]
    if right == U:
        v = build_uniserial_U(n, source=young[cb.Partition(U_SOURCES[n])])
    else:
        v = simples[cb.Partition(right)]
    t = tensor(young[cb.Partition(left)], v)
    y = projective_summand(t, cb.conjugate(target), derive_rng(seed, "tensor", cb.file_token(target)), trials, simples)
    if not is_projective(y):
        raise CatalogError(f"tensor summand for {target!r} is not projective")
    return y.relabel("young", target, "tensor")


# certification


@dataclass
class CatalogReport:
    n: int
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def record(self, name, passed, detail=""):
        self.checks[name] = bool(passed)
        if not passed:
            self.failures.append(f"{name}: {detail}" if detail else name)


def verify_catalog(catalog: YoungCatalog, simples=None, seed=None, trials=DEFAULT_TRIALS) -> CatalogReport:
    n = catalog.n
    simples = simples if simples is not None else simples_for(n)
    seed = catalog.seed if seed is None else seed
    rep = CatalogReport(n)
    ps = catalog.partitions
    for a in ps:
        y = catalog.young(a)
        iso = iso_test(y, dual(y), derive_rng(seed, "dual", cb.file_token(a)), trials)
        rep.record(f"self-dual {a!r}", iso is not None, "no isomorphism with the dual found")
    for a in ps:
        rep.record(f"kostka diagonal {a!r}", catalog.kostka.get((a, a)) == 1)
    bad = [(a, b) for (a, b), k in catalog.kostka.items() if k and not cb.dominates(a, b)]
    rep.record("kostka dominance", not bad, repr(bad))
    for b in ps:
        total = sum(catalog.kostka.get((a, b), 0) * catalog.young(a).dim for a in ps)
        rep.record(f"dim M{b!r}", total == cb.multinomial(b), f"{total} != {cb.multinomial(b)}")
    proj = {a for a in ps if is_projective(catalog.young(a))}
    expect = {a for a in ps if cb.is_column_2_regular(a)}
    rep.record("projective set", proj == expect, f"got {sorted(proj)}, expected {sorted(expect)}")
    total = sum(simples[cb.conjugate(a)].dim * catalog.young(a).dim for a in expect)
    rep.record("regular module dimension", total == math.factorial(n), f"{total} != {n}!")
    for a in expect:
        col = catalog.kostka.get((a, cb.Partition([1] * n)), 0)
        rep.record(f"regular multiplicity {a!r}", col == simples[cb.conjugate(a)].dim,
                   f"{col} != dim D{cb.conjugate(a)!r}")
        if n >= 2:
            top = top_counts(catalog.young(a), simples)
            rep.record(f"simple top {a!r}", dict(top) == {cb.conjugate(a): 1}, repr(dict(top)))
    return rep


# cache


def code_version() -> str:
    import hashlib
    from pathlib import Path

    h = hashlib.sha256()
    here = Path(__file__).parent
    for name in ("gf2core", "combinat", "modrep", "homspace", "structure", "youngcat"):
        h.update((here / f"{name}.py").read_bytes())
    return h.hexdigest()[:16]


def _atomic_write(path, data: bytes):
    import os
    import tempfile

    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_catalog(cat: YoungCatalog, cache_dir):
    """cache/<n>/young-<token>.ymod plus a manifest with kostka entries and provenance."""
    import json
    from pathlib import Path

    from .modrep import module_to_bytes

    root = Path(cache_dir) / str(cat.n)
    root.mkdir(parents=True, exist_ok=True)
    for a, e in cat.entries.items():
        _atomic_write(root / f"young-{cb.file_token(a)}.ymod", module_to_bytes(e.module))
    manifest = {
        "n": cat.n,
        "seed": cat.seed,
        "code_version": code_version(),
        "kostka": [[cb.format_partition(a), cb.format_partition(b), k] for (a, b), k in sorted(
            cat.kostka.items(), key=lambda t: (cat.partitions.index(t[0][0]), cat.partitions.index(t[0][1])))],
        "entries": {cb.file_token(a): {"route": e.route, **{k: v for k, v in e.log.items() if k != "route"}}
                    for a, e in cat.entries.items()},
    }
    _atomic_write(root / "manifest.json", json.dumps(manifest, sort_keys=True, indent=1).encode())
    return root


def load_catalog(n, cache_dir, seed=0):
    """The cached catalog, or None when absent, stale or built from another seed."""
    import json
    from pathlib import Path

    from .modrep import module_from_bytes

    root = Path(cache_dir) / str(n)
    try:
        manifest = json.loads((root / "manifest.json").read_text())
    except (OSError, ValueError):
        return None
    if manifest.get("code_version") != code_version() or manifest.get("seed") != seed:
        return None
    cat = YoungCatalog(n, seed)
    for a in cb.partitions_desc(n):
        tok = cb.file_token(a)
        path = root / f"young-{tok}.ymod"
        if not path.exists() or tok not in manifest["entries"]:
            return None
        m, _ = module_from_bytes(path.read_bytes())
        info = manifest["entries"][tok]
        cat.entries[a] = YoungEntry(a, m, info["route"], info)
        cat.provenance[a] = info
    for la, mu, k in manifest["kostka"]:
        cat.kostka[(cb.parse_partition(la), cb.parse_partition(mu))] = k
    return cat


def get_catalog(n, seed=0, cache_dir=None, config=None, progress=None):
    """Load from cache_dir when possible, otherwise build (and store when cache_dir is given)."""
    if cache_dir is not None:
        cat = load_catalog(n, cache_dir, seed)
        if cat is not None:
            return cat
    cat = build_catalog(n, seed, config, progress)
    if cache_dir is not None:
        save_catalog(cat, cache_dir)
    return cat
