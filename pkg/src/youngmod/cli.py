"""Command line front end: `young <command> [options]`.

Commands: young build, young show, kostka, analyze, schur, verify, diagram.
Catalogs are cached under --cache-dir (or $YOUNGMOD_CACHE).
"""

from __future__ import annotations

import argparse
import csv
import difflib
import io
import json
import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import combinat as cb
from .homspace import DEFAULT_TRIALS
from .schuralg import SchurError
from .structure import Layering, StructureError, is_projective, radical_series, simples_for, socle_counts, top_counts
from .youngcat import SPLIT_THRESHOLD, CatalogConfig, CatalogError, get_catalog

log = logging.getLogger(__name__)

EMITS = ("kostka", "factors", "layers", "cartan", "quiver", "weyl", "blocks", "dot")
FIXTURE_FILES = ("kostka", "young", "projectives", "weyl", "quivers", "blocks")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    n: int
    seed: int = 0
    cache_dir: Path | None = None
    split_threshold: int = SPLIT_THRESHOLD
    trials: int = DEFAULT_TRIALS
    emit: set = field(default_factory=set)

    def __post_init__(self):
        if not 1 <= self.n <= 7:
            raise UsageError(f"--n must be between 1 and 7, got {self.n}")
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        bad = set(self.emit) - set(EMITS)
        if bad:
            raise UsageError(f"unknown --emit value(s): {sorted(bad)}")


def default_cache_dir() -> Path:
    env = os.environ.get("YOUNGMOD_CACHE")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "youngmod"


# fixtures


@lru_cache(maxsize=None)
def _fixture_file(name):
    return json.loads((resources.files("youngmod") / "fixtures" / f"{name}.json").read_text(encoding="utf-8"))


def fixtures() -> dict:
    """The bundled transcription, one dict per file name."""
    return {name: _fixture_file(name) for name in FIXTURE_FILES}


def fmt(p) -> str:
    return cb.format_partition(p, caret=True)


# workbench: lazily built, shared within one process


class Workbench:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._cat = {}
        self._alg = {}
        self._layers = {}

    def config(self):
        return CatalogConfig(self.cfg.split_threshold, self.cfg.trials, self.cfg.trials)

    def catalog(self, n):
        if n not in self._cat:
            self._cat[n] = get_catalog(n, self.cfg.seed, self.cfg.cache_dir, self.config())
        return self._cat[n]

    def algebra(self, n):
        from .schuralg import basic_algebra

        if n not in self._alg:
            self._alg[n] = basic_algebra(self.catalog(n))
        return self._alg[n]

    def young_layers(self, n, a) -> Layering:
        key = (n, cb.Partition(a))
        if key not in self._layers:
            self._layers[key] = radical_series(self.catalog(n).young(a), simples_for(n))[0]
        return self._layers[key]

    def quiver(self, n):
        from .schuralg import radical_and_quiver

        alg = self.algebra(n)
        q = radical_and_quiver(alg)[1]
        return Quiver.from_matrix(alg.parts, q)

    def projective_layers(self, n, a) -> Layering:
        from .schuralg import projective_A, radical_layers

        return Layering(radical_layers(projective_A(self.algebra(n), a)))

    def weyl_layers(self, n, a) -> Layering:
        from .schuralg import radical_layers, weyl_module

        return Layering(radical_layers(weyl_module(self.algebra(n), a)))

    def blocks(self, n):
        from .schuralg import blocks_and_fingerprint

        return blocks_and_fingerprint(self.algebra(n))


# diagrams


@dataclass
class Quiver:
    vertices: tuple
    arrows: Counter     # (source, target) -> multiplicity

    @classmethod
    def from_matrix(cls, parts, q):
        arrows = Counter({(a, b): int(q[i, j]) for i, a in enumerate(parts) for j, b in enumerate(parts) if q[i, j]})
        return cls(tuple(parts), arrows)

    def restrict(self, vertices):
        keep = set(vertices)
        return Quiver(tuple(v for v in self.vertices if v in keep),
                      Counter({e: k for e, k in self.arrows.items() if e[0] in keep and e[1] in keep}))

    def edge_list(self):
        return sorted([fmt(a), fmt(b), k] for (a, b), k in self.arrows.items())


def _order_key(p):
    p = cb.Partition(p)
    return cb.partitions_desc(sum(p)).index(p)


def _q(s):
    return '"' + s.replace('"', '\\"') + '"'


def emit_dot(obj, name="module") -> str:
    """DOT text for a Layering (ranked top to bottom) or a Quiver (mutual arrows drawn once, dir=both)."""
    out = [f"digraph {_q(name)} {{", "  rankdir=TB;", "  node [shape=plaintext];"]
    if isinstance(obj, Quiver):
        for v in sorted(obj.vertices, key=_order_key):
            out.append(f"  {_q(fmt(v))};")
        done = set()
        for a in sorted(obj.vertices, key=_order_key):
            for b in sorted(obj.vertices, key=_order_key):
                if (a, b) in done or (a, b) not in obj.arrows:
                    continue
                ab, ba = obj.arrows.get((a, b), 0), obj.arrows.get((b, a), 0)
                both = min(ab, ba) if a != b else 0
                out += [f"  {_q(fmt(a))} -> {_q(fmt(b))} [dir=both];"] * both
                out += [f"  {_q(fmt(a))} -> {_q(fmt(b))};"] * (ab - both)
                out += [f"  {_q(fmt(b))} -> {_q(fmt(a))};"] * (ba - both)
                done.update([(a, b), (b, a)])
    else:
        layers = obj.labels() if isinstance(obj, Layering) else obj
        ids = []
        for i, layer in enumerate(layers):
            row = [f"n{i}_{k}" for k in range(len(layer))]
            ids.append(row)
            for node, p in zip(row, layer):
                out.append(f"  {node} [label={_q(fmt(p))}];")
            out.append("  { rank=same; " + " ".join(row) + "; }")
        for upper, lower in zip(ids, ids[1:]):
            if len(upper) == 1 and len(lower) == 1:
                out.append(f"  {upper[0]} -> {lower[0]};")
            else:
                # layer membership only, the ranking edge carries no Ext witness
                out.append(f"  {upper[0]} -> {lower[0]} [style=invis];")
    out.append("}")
    return "\n".join(out) + "\n"


# output helpers


def to_csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def _write(text):
    sys.stdout.write(text)


def kostka_table(cat):
    parts = [fmt(p) for p in cat.partitions]
    mat = cat.kostka_matrix().tolist()
    return parts, mat


def _render_kostka(cat, form):
    parts, mat = kostka_table(cat)
    if form == "json":
        return to_json({"n": cat.n, "partitions": parts, "matrix": mat})
    return to_csv([["lambda", *parts], *[[p, *row] for p, row in zip(parts, mat)]])


def _render_factors(per, form):
    """per: {partition: Layering}."""
    if form == "json":
        return to_json({fmt(a): {fmt(p): k for p, k in lay.total().items()} for a, lay in per.items()})
    rows = [["lambda", "factor", "multiplicity"]]
    for a, lay in per.items():
        tot = lay.total()
        rows += [[fmt(a), fmt(p), tot[p]] for p in sorted(tot, key=_order_key)]
    return to_csv(rows)


def _render_layers(per, form):
    if form == "json":
        return to_json({fmt(a): [[[fmt(p), k] for p, k in sorted(layer.items(), key=lambda t: _order_key(t[0]))]
                                 for layer in lay.layers] for a, lay in per.items()})
    rows = [["lambda", "layer", "factor", "multiplicity"]]
    for a, lay in per.items():
        for i, layer in enumerate(lay.layers):
            rows += [[fmt(a), i, fmt(p), layer[p]] for p in sorted(layer, key=_order_key)]
    return to_csv(rows)


def _render_layerings(per, emit, form, prefix):
    if emit == "dot" or form == "dot":
        return "".join(emit_dot(lay, f"{prefix}[{fmt(a)}]") for a, lay in per.items())
    if emit == "factors":
        return _render_factors(per, form)
    return _render_layers(per, form)


def _render_matrix(parts, mat, form, n):
    names = [fmt(p) for p in parts]
    mat = [[int(x) for x in row] for row in mat]
    if form == "json":
        return to_json({"n": n, "partitions": names, "matrix": mat})
    return to_csv([["lambda", *names], *[[p, *row] for p, row in zip(names, mat)]])


def _render_quiver(quiv, form, n):
    if form == "dot":
        return emit_dot(quiv, f"quiver S({n},{n})")
    if form == "json":
        return to_json({"n": n, "vertices": [fmt(v) for v in quiv.vertices], "arrows": quiv.edge_list()})
    return to_csv([["source", "target", "multiplicity"], *quiv.edge_list()])


def _render_blocks(blocks, form, n):
    recs = [{"partitions": [fmt(p) for p in b.partitions], "core": fmt(b.core), "weight": b.weight,
             "canonical_order": [fmt(p) for p in b.canonical_partitions()]} for b in blocks]
    if form == "json":
        return to_json({"n": n, "blocks": recs})
    rows = [["block", "partition", "core", "weight"]]
    for i, r in enumerate(recs):
        rows += [[i, p, r["core"] or "0", r["weight"]] for p in r["partitions"]]
    return to_csv(rows)


# commands


def _targets(cfg, lam):
    if lam is None:
        return list(cb.partitions_desc(cfg.n))
    return [lam]


def cmd_young_build(wb, args):
    cat = wb.catalog(wb.cfg.n)
    rows = [["lambda", "dim", "route"]]
    rows += [[fmt(a), cat.young(a).dim, cat.entries[a].route] for a in cat.partitions]
    _write(to_csv(rows) if args.format != "json" else to_json(
        {fmt(a): {"dim": cat.young(a).dim, "route": cat.entries[a].route} for a in cat.partitions}))
    return 0


def cmd_young_show(wb, args):
    n = wb.cfg.n
    emit = args.emit or "layers"
    if emit == "kostka":
        _write(_render_kostka(wb.catalog(n), args.format))
        return 0
    if emit not in ("factors", "layers", "dot"):
        raise UsageError(f"young show cannot emit {emit}")
    per = {a: wb.young_layers(n, a) for a in _targets(wb.cfg, args.lam)}
    _write(_render_layerings(per, emit, args.format, "Y"))
    return 0


def cmd_kostka(wb, args):
    if args.format == "dot":
        raise UsageError("kostka has no dot form")
    _write(_render_kostka(wb.catalog(wb.cfg.n), args.format))
    return 0


def cmd_analyze(wb, args):
    n = wb.cfg.n
    if args.emit:
        if args.emit not in ("factors", "layers", "dot"):
            raise UsageError(f"analyze cannot emit {args.emit}")
        per = {a: wb.young_layers(n, a) for a in _targets(wb.cfg, args.lam)}
        _write(_render_layerings(per, args.emit, args.format, "Y"))
        return 0
    cat, simples = wb.catalog(n), simples_for(n)
    recs = []
    for a in _targets(wb.cfg, args.lam):
        y, lay = cat.young(a), wb.young_layers(n, a)
        top, soc = top_counts(y, simples), socle_counts(y, simples)
        recs.append({"lambda": fmt(a), "dim": y.dim, "loewy_length": len(lay), "uniserial": lay.is_uniserial(),
                     "projective": is_projective(y), "route": cat.entries[a].route,
                     "top": ";".join(f"{fmt(p)}:{k}" for p, k in sorted(top.items(), key=lambda t: _order_key(t[0]))),
                     "socle": ";".join(f"{fmt(p)}:{k}" for p, k in sorted(soc.items(), key=lambda t: _order_key(t[0])))})
    if args.format == "json":
        _write(to_json(recs))
    else:
        cols = ["lambda", "dim", "loewy_length", "uniserial", "projective", "route", "top", "socle"]
        _write(to_csv([cols, *[[r[c] for c in cols] for r in recs]]))
    return 0


def cmd_schur(wb, args):
    from .schuralg import decomposition_matrix

    n = wb.cfg.n
    emit = args.emit or "cartan"
    alg = wb.algebra(n)
    if emit == "cartan":
        _write(_render_matrix(alg.parts, alg.cartan(), args.format, n))
    elif emit == "kostka":
        _write(_render_kostka(wb.catalog(n), args.format))
    elif emit in ("quiver", "dot"):
        _write(_render_quiver(wb.quiver(n), "dot" if emit == "dot" else args.format, n))
    elif emit == "weyl":
        if args.format == "csv" and args.lam is None and not args.layers:
            _write(_render_matrix(alg.parts, decomposition_matrix(alg), "csv", n))
        else:
            per = {a: wb.weyl_layers(n, a) for a in _targets(wb.cfg, args.lam)}
            _write(_render_layerings(per, "layers", args.format, "Delta"))
    elif emit == "blocks":
        _write(_render_blocks(wb.blocks(n), args.format, n))
    elif emit in ("factors", "layers"):
        per = {a: wb.projective_layers(n, a) for a in _targets(wb.cfg, args.lam)}
        _write(_render_layerings(per, emit, args.format, "P"))
    return 0


def cmd_diagram(wb, args):
    n = wb.cfg.n
    if args.kind == "quiver":
        _write(emit_dot(wb.quiver(n), f"quiver S({n},{n})"))
        return 0
    get = {"young": wb.young_layers, "projective": wb.projective_layers, "weyl": wb.weyl_layers}[args.kind]
    prefix = {"young": "Y", "projective": "P", "weyl": "Delta"}[args.kind]
    for a in _targets(wb.cfg, args.lam):
        _write(emit_dot(get(n, a), f"{prefix}[{fmt(a)}]"))
    return 0


# verification against the bundled transcription


@dataclass
class Check:
    name: str
    ok: bool
    expected: object = None
    got: object = None

    def diff(self):
        a = json.dumps(self.expected, sort_keys=True, indent=1).splitlines()
        b = json.dumps(self.got, sort_keys=True, indent=1).splitlines()
        return "\n".join(difflib.unified_diff(a, b, "fixture", "computed", lineterm=""))


def _cmp(name, expected, got):
    return Check(name, expected == got, expected, got)


def _sorted_layers(lay: Layering):
    return [sorted(fmt(p) for p in layer.elements()) for layer in lay.layers]


def _factors(lay: Layering):
    return {fmt(p): k for p, k in sorted(lay.total().items())}


def verify_n(wb, n) -> list:
    fx = fixtures()
    key = str(n)
    checks = []
    cat = wb.catalog(n)
    k = fx["kostka"][key]
    parts, mat = kostka_table(cat)
    checks.append(_cmp(f"n={n} kostka partitions", k["partitions"], parts))
    checks.append(_cmp(f"n={n} kostka columns", k["columns"], parts))
    checks.append(_cmp(f"n={n} kostka matrix", k["matrix"], mat))
    for a in cat.partitions:
        rec = fx["young"][key][fmt(a)]
        lay = wb.young_layers(n, a)
        checks.append(_cmp(f"n={n} Y[{fmt(a)}] factors", rec["factors"], _factors(lay)))
        checks.append(_cmp(f"n={n} Y[{fmt(a)}] layers", [sorted(x) for x in rec["layers"]], _sorted_layers(lay)))
    if key in fx["projectives"]:
        alg = wb.algebra(n)
        cartan = [[0] * len(alg.parts) for _ in alg.parts]
        for i, a in enumerate(alg.parts):
            rec = fx["projectives"][key][fmt(a)]
            lay = wb.projective_layers(n, a)
            checks.append(_cmp(f"n={n} P[{fmt(a)}] layers", [sorted(x) for x in rec["layers"]], _sorted_layers(lay)))
            for j, b in enumerate(alg.parts):
                cartan[i][j] = rec["factors"].get(fmt(b), 0)
        checks.append(_cmp(f"n={n} cartan", cartan, alg.cartan().tolist()))
    if key in fx["weyl"]:
        for name, rec in sorted(fx["weyl"][key].items()):
            lay = wb.weyl_layers(n, cb.parse_partition(name))
            checks.append(_cmp(f"n={n} Delta[{name}] factors", rec["factors"], _factors(lay)))
            if rec["layers_reliable"]:
                checks.append(_cmp(f"n={n} Delta[{name}] layers", [sorted(x) for x in rec["layers"]],
                                   _sorted_layers(lay)))
    qkey = {6: "6", 7: "7-block1"}.get(n)
    if qkey:
        rec = fx["quivers"][qkey]
        quiv = wb.quiver(n).restrict([cb.parse_partition(v) for v in rec["vertices"]])
        checks.append(_cmp(f"n={n} quiver {qkey} vertices", sorted(rec["vertices"]), sorted(fmt(v) for v in quiv.vertices)))
        checks.append(_cmp(f"n={n} quiver {qkey} arrows", sorted(rec["arrows"]), quiv.edge_list()))
    corr = fx["blocks"]["correspondence"]
    if n == corr["from_n"]:
        checks.append(correspondence_check(wb, corr))
    return checks


def completed_correspondence(b_from, b_to, mapping):
    """Extend a partial partition map to a bijection when exactly one pair is left open."""
    full = {cb.parse_partition(a): cb.parse_partition(b) for a, b in mapping.items()}
    rest_a = [p for p in b_from.partitions if p not in full]
    rest_b = [p for p in b_to.partitions if p not in full.values()]
    if len(rest_a) == len(rest_b) == 1:
        full[rest_a[0]] = rest_b[0]
    return full


def correspondence_check(wb, corr) -> Check:
    from .schuralg import correspondence_aligns

    mapping = {cb.parse_partition(a): cb.parse_partition(b) for a, b in corr["map"].items()}
    src = [b for b in wb.blocks(corr["from_n"]) if set(mapping) <= set(b.partitions)]
    dst = [b for b in wb.blocks(corr["to_n"]) if set(mapping.values()) <= set(b.partitions)]
    name = f"block correspondence n={corr['from_n']} -> n={corr['to_n']}"
    if len(src) != 1 or len(dst) != 1:
        return Check(name, False, "one block on each side", f"{len(src)} and {len(dst)}")
    full = completed_correspondence(src[0], dst[0], corr["map"])
    ok = correspondence_aligns(src[0], dst[0], full)
    return Check(name, ok, {fmt(a): fmt(b) for a, b in sorted(full.items())}, "aligned" if ok else "not aligned")


def cmd_verify(wb, args):
    ns = [wb.cfg.n] if args.n_given else list(range(1, 8))
    failed = 0
    for n in ns:
        for c in verify_n(wb, n):
            print(f"{'PASS' if c.ok else 'FAIL'} {c.name}")
            if not c.ok:
                failed += 1
                print(c.diff())
    print(f"{failed} mismatch(es)")
    return 1 if failed else 0


# argument parsing


def _common(p):
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--lambda", dest="lam", default=None)
    p.add_argument("--emit", choices=EMITS, default=None)
    p.add_argument("--format", choices=("csv", "json", "dot"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--split-threshold", type=int, default=SPLIT_THRESHOLD)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="young", description="GF(2) Young modules and Schur algebras, n <= 7")
    sub = parser.add_subparsers(dest="command", required=True)
    young = sub.add_parser("young", help="build or show the Young module catalog")
    ysub = young.add_subparsers(dest="action", required=True)
    _common(ysub.add_parser("build", help="build and cache all Y^lambda"))
    _common(ysub.add_parser("show", help="composition factors or layers of Y^lambda"))
    _common(sub.add_parser("kostka", help="2-Kostka table"))
    _common(sub.add_parser("analyze", help="structure summary of the Young modules"))
    schur = sub.add_parser("schur", help="basic Schur algebra data")
    _common(schur)
    schur.add_argument("--layers", action="store_true", help="with --emit weyl: layers instead of the matrix")
    _common(sub.add_parser("verify", help="compare against the bundled fixtures"))
    diagram = sub.add_parser("diagram", help="DOT layer diagram")
    _common(diagram)
    diagram.add_argument("--kind", choices=("young", "projective", "weyl", "quiver"), default="young")
    return parser


HANDLERS = {
    ("young", "build"): cmd_young_build,
    ("young", "show"): cmd_young_show,
    ("kostka", None): cmd_kostka,
    ("analyze", None): cmd_analyze,
    ("schur", None): cmd_schur,
    ("verify", None): cmd_verify,
    ("diagram", None): cmd_diagram,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        args.n_given = args.n is not None
        if args.n is None:
            if args.command != "verify":
                raise UsageError("--n is required")
            args.n = 7
        cache = Path(args.cache_dir) if args.cache_dir else default_cache_dir()
        emit = {args.emit} if args.emit else set()
        cfg = RunConfig(args.n, args.seed, cache, args.split_threshold, args.trials, emit)
        if args.lam is not None:
            try:
                args.lam = cb.parse_partition(args.lam)
            except ValueError as e:
                raise UsageError(str(e))
            if sum(args.lam) != cfg.n:
                raise UsageError(f"--lambda {fmt(args.lam)} is not a partition of {cfg.n}")
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"young: error: {e}", file=sys.stderr)
        return 2
    handler = HANDLERS[(args.command, getattr(args, "action", None))]
    try:
        return handler(Workbench(cfg), args)
    except UsageError as e:
        print(f"young: error: {e}", file=sys.stderr)
        return 2
    except (CatalogError, StructureError, SchurError) as e:
        print(f"young: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
