"""Command-line interface.

Exit codes: 0 the property holds (or the LP is feasible), 1 refuted
(infeasible), 2 truncated or undecided, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io as mio
from .catalog import canon
from .catalog.named import named as catalog_named
from .core import (
    SparsePavingMatroid,
    as_matroid,
    contains_vamos_configuration,
    dual,
    fmt_set,
    ingleton_check,
    parse_set,
)

EXIT_HOLDS, EXIT_REFUTED, EXIT_TRUNCATED, EXIT_USAGE = 0, 1, 2, 64
THREADS_ENV = "MATEXT_THREADS"


class UsageError(Exception):
    pass


# -- loading ------------------------------------------------------------------


def load_source(spec: str):
    """``named:NAME``, a catalog name, a JSON/JSONL file (``file#i`` picks
    the i-th matroid), an indicator file, or an inline JSON object.
    ``dual:SOURCE`` gives the dual of any of these."""
    spec = spec.strip()
    if spec.startswith("dual:"):
        return dual(load_source(spec[5:]))
    if spec.startswith("{"):
        try:
            return mio.matroid_from_dict(json.loads(spec))
        except (json.JSONDecodeError, mio.FormatError) as e:
            raise UsageError(f"bad inline matroid: {e}") from None
    path, _, idx = spec.partition("#")
    if not spec.startswith("named:") and Path(path).is_file():
        fmt = "revlex" if Path(path).suffix in (".txt", ".revlex") else "json"
        try:
            items = mio.ingest(path, fmt)
        except mio.FormatError as e:
            raise UsageError(f"{path}: {e}") from None
        i = int(idx) if idx else 0
        if not 0 <= i < len(items):
            raise UsageError(f"{path} holds {len(items)} matroids; no index {i}")
        return items[i]
    try:
        return catalog_named(spec)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e).strip('"')) from None


def labels_of(m) -> tuple[str, ...]:
    return tuple(m.labels)


def parse_elements(text: str, labels) -> int:
    """A set in compact notation; falls back to digits as element indices
    when the labels are not single characters."""
    try:
        return parse_set(text, labels)
    except ValueError:
        if text.isdigit():
            return sum(1 << int(ch) for ch in text)
        raise UsageError(f"cannot parse set {text!r}") from None


def parse_pairs(text: str, labels) -> list[tuple[int, int]]:
    """``"01,56;17,35"`` -> [(01, 56), (17, 35)]."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = _split_pair(chunk)
        if len(parts) != 2:
            raise UsageError(f"pair {chunk!r} needs two sets separated by a comma")
        out.append((parse_elements(parts[0], labels), parse_elements(parts[1], labels)))
    if not out:
        raise UsageError("no pairs given")
    return out


def _split_pair(chunk: str) -> list[str]:
    """Split on commas outside braces."""
    parts, depth, cur = [], 0, ""
    for ch in chunk:
        if ch in "{(":
            depth += 1
        elif ch in "})":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    return parts


def augmented_labels(m, extra: int = 16) -> tuple[str, ...]:
    labels = list(labels_of(m))
    i = 1
    while len(labels) < m.n + extra:
        name = f"z{i}"
        if name not in labels:
            labels.append(name)
        i += 1
    return tuple(labels)


# -- checks ---------------------------------------------------------------------


@dataclass
class Outcome:
    code: int
    verdict: str
    lines: list = field(default_factory=list)
    digest: str = ""

    def finish(self) -> "Outcome":
        if not self.digest:
            self.digest = hashlib.sha256("\n".join([self.verdict] + self.lines).encode()).hexdigest()[:16]
        return self


def run_check(m, kind: str, params: dict) -> Outcome:
    """Shared by the ``check`` subcommand and the batch runner."""
    kind = kind.lower()
    fn = _CHECKS.get(kind)
    if fn is None:
        raise UsageError(f"unknown check {kind!r}; known: {', '.join(sorted(_CHECKS))}")
    return fn(m, params).finish()


def _check_ingleton(m, params):
    v = ingleton_check(m)
    if v is None:
        return Outcome(EXIT_HOLDS, "holds", ["Ingleton inequality holds for every quadruple"])
    lab = labels_of(m)
    sets = ", ".join(fmt_set(s, lab) for s in (v.a, v.b, v.c, v.d))
    return Outcome(EXIT_REFUTED, "violated", [f"violated by A, B, C, D = {sets} with slack {v.slack}"])


def _check_vamos(m, params):
    w = contains_vamos_configuration(m)
    if w is None:
        return Outcome(EXIT_HOLDS, "absent", ["no Vamos configuration"])
    lab = labels_of(m)
    return Outcome(EXIT_REFUTED, "present",
                   ["Vamos configuration on lines " + ", ".join(fmt_set(x, lab) for x in w)])


def _check_ge(m, params):
    from .extensions import (KGEVerdict, Status, Strategy, format_record, ge_extension_exists,
                             kge_check, nonmodular_pairs, scripted_chain)
    mat = as_matroid(m)
    depth = int(params.get("depth", 1))
    strategy = Strategy(params.get("strategy", "minimal"))
    lab = labels_of(mat)
    if params.get("pairs"):
        pairs = parse_pairs(params["pairs"], augmented_labels(mat))
        if "depth" in params:
            pairs = pairs[:depth]
        res = scripted_chain(mat, [("GE", p) for p in pairs], strategy)
        lines = [format_record(res.matroid, r) for r in res.steps]
        if res.ok:
            return Outcome(EXIT_HOLDS, "extended", lines)
        lines.append(format_record(res.matroid, res.dead_end))
        if res.dead_end.step_index == 0 or strategy is Strategy.EXHAUSTIVE:
            return Outcome(EXIT_REFUTED, "dead-end", lines)
        return Outcome(EXIT_TRUNCATED, "dead-end-minimal",
                       lines + ["dead end under minimal cuts only; rerun with --strategy exhaustive"])
    if depth == 1:
        dead = []
        for f1, f2 in nonmodular_pairs(mat):
            if ge_extension_exists(mat, f1, f2) is None:
                dead.append(f"{fmt_set(f1, lab)}/{fmt_set(f2, lab)}")
        if not dead:
            return Outcome(EXIT_HOLDS, "passed", ["every non-modular pair admits a GE extension"])
        return Outcome(EXIT_REFUTED, "refuted", ["pairs without a GE extension: " + " ".join(dead)])
    budget = params.get("budget")
    v: KGEVerdict = kge_check(mat, depth, strategy, int(budget) if budget else None)
    code = {Status.PASSED: EXIT_HOLDS, Status.REFUTED: EXIT_REFUTED, Status.TRUNCATED: EXIT_TRUNCATED}[v.status]
    return Outcome(code, v.status.value, [v.describe(), f"{v.nodes} extensions built"])


def _lp_outcome(verdict, params) -> Outcome:
    from .lp.solver import verify_certificate, verify_witness
    model = verdict.model
    if params.get("dump"):
        Path(params["dump"]).write_text(model.dump())
    lines = [f"{len(model.steps)} steps over {model.n} elements: "
             + "; ".join(s.describe(model.labels) for s in model.steps),
             f"{model.variable_count} variables, {model.row_count} rows, solved by {verdict.method}"]
    if verdict.feasible:
        assert not verify_witness(model, verdict.witness)
        lines.append("witness verified in exact arithmetic")
        code, word = EXIT_HOLDS, "feasible"
    else:
        gap = verify_certificate(model, verdict.certificate)
        lines.append(f"Farkas certificate with {len(verdict.certificate)} rows verified exactly (0 >= {gap})")
        code, word = EXIT_REFUTED, "infeasible"
    if params.get("certificate"):
        _write_evidence(verdict, params["certificate"])
    return Outcome(code, word, lines, verdict.digest())


def _write_evidence(verdict, path):
    model = verdict.model
    if verdict.feasible:
        g = verdict.witness
        data = {"format": "matext-witness/1",
                "values": {fmt_set(s, model.labels): str(g(s)) for s in range(1, 1 << model.n)}}
    else:
        rows = []
        for idx, w in sorted(verdict.certificate.items()):
            r = model.row(idx)
            rows.append({"row": idx, "multiplier": str(w), "rel": r.rel, "rhs": str(r.rhs),
                         "terms": {fmt_set(s, model.labels): str(c) for s, c in sorted(r.terms.items())}})
        data = {"format": "matext-certificate/1", "rows": rows}
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True))


def _steps_from_pairs(m, kind, params):
    from .lp.model import ExtensionStep
    if not params.get("pairs"):
        return None
    pairs = parse_pairs(params["pairs"], augmented_labels(m))
    depth = params.get("depth")
    if depth is not None:
        depth = int(depth)
        if depth > len(pairs):
            raise UsageError(f"--depth {depth} but only {len(pairs)} pairs given")
        pairs = pairs[:depth]
    return [ExtensionStep(kind, x, y) for x, y in pairs]


def _check_lp(kind):
    def run(m, params):
        from .lp.chains import check_chain, disjoint_pairs, search_refutation
        steps = _steps_from_pairs(m, kind, params)
        if steps is not None:
            try:
                return _lp_outcome(check_chain(m, steps), params)
            except ValueError as e:
                raise UsageError(str(e)) from None
        depth = int(params.get("depth", 1))
        budget = params.get("budget")
        size = int(params.get("size", 2))
        res = search_refutation(m, kind, depth, disjoint_pairs(m.n, size), int(budget) if budget else None)
        lab = labels_of(m)
        if res.sequence is not None:
            out = _lp_outcome(res.verdict, params)
            out.lines.insert(0, f"searched {res.solved} chains; refuting pairs: "
                             + "; ".join(f"{fmt_set(x, lab)},{fmt_set(y, lab)}" for x, y in res.sequence))
            return out
        if res.truncated:
            return Outcome(EXIT_TRUNCATED, "truncated", [res.note, f"{res.solved} chains solved, none infeasible"])
        return Outcome(EXIT_HOLDS, "feasible",
                       [f"all {res.solved} chains of up to {depth} pairs of {size}-sets are feasible"])
    return run


def _check_cl(m, params):
    from .lp.chains import check_chain
    from .lp.model import ExtensionStep
    spec = params.get("spec")
    if not spec:
        raise UsageError("cl needs --spec 'X1;X2;Y' (several steps separated by '|')")
    labels = augmented_labels(m)
    steps = []
    for part in spec.split("|"):
        bits = [b.strip() for b in part.split(";")]
        if len(bits) != 3:
            raise UsageError(f"copy-lemma spec {part!r} needs X1;X2;Y")
        x1, x2, y = (parse_elements(b, labels) for b in bits)
        try:
            steps.append(ExtensionStep("CL", x1, y, x2))
        except ValueError as e:
            raise UsageError(str(e)) from None
    try:
        return _lp_outcome(check_chain(m, steps), params)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _check_im(m, params):
    from .extensions import im_check, im_extension_exists
    mat = as_matroid(m)
    lab = labels_of(mat)
    if params.get("lines"):
        ls = [mat.closures[parse_elements(t, lab)] for t in params["lines"].split(",")]
        if len(ls) != 3:
            raise UsageError("--lines needs three lines")
        try:
            cut = im_extension_exists(mat, *ls)
        except ValueError as e:
            return Outcome(EXIT_TRUNCATED, "not-applicable", [str(e)])
        if cut is None:
            return Outcome(EXIT_REFUTED, "refuted", ["no IM extension for these lines"])
        return Outcome(EXIT_HOLDS, "extended", [f"modular cut {cut.fmt()}"])
    ok, bad = im_check(mat)
    if ok:
        return Outcome(EXIT_HOLDS, "passed", ["every admissible line triple has an IM extension"])
    return Outcome(EXIT_REFUTED, "refuted", ["no IM extension for lines " + ", ".join(fmt_set(x, lab) for x in bad)])


def _check_dual_ak(m, params):
    from .lp.chains import dual_t3_ak_refutation
    conclude = str(params.get("conclude", "true")).lower() != "false"
    return _lp_outcome(dual_t3_ak_refutation(m, conclude), params)


_CHECKS = {
    "ingleton": _check_ingleton,
    "vamos-config": _check_vamos,
    "ge": _check_ge,
    "ci": _check_lp("CI"),
    "ak": _check_lp("AK"),
    "cl": _check_cl,
    "im": _check_im,
    "dual-ttt-ak": _check_dual_ak,
}


# -- other subcommands ---------------------------------------------------------


def cmd_info(args) -> int:
    m = load_source(args.matroid)
    mat = as_matroid(m)
    lab = labels_of(mat)
    from .core import flats as flats_of
    print(f"ground set: {mat.n} elements ({' '.join(lab)})")
    print(f"rank: {mat.rank()}")
    for r in range(mat.rank() + 1):
        fl = flats_of(mat, r)
        print(f"flats of rank {r}: {len(fl)}")
    chs = mat.circuit_hyperplanes()
    print(f"circuit-hyperplanes ({len(chs)}): {' '.join(fmt_set(c, lab) for c in chs)}")
    d = dual(m)
    if isinstance(d, SparsePavingMatroid):
        print(f"dual circuit-hyperplanes: {' '.join(fmt_set(c, lab) for c in d.chs)}")
    else:
        print(f"dual rank: {as_matroid(d).rank()}")
    print(f"sparse paving: {'yes' if isinstance(m, SparsePavingMatroid) else 'no'}")
    print(f"self-dual up to isomorphism: {'yes' if canon.are_isomorphic(m, d) else 'no'}")
    print(f"identically self-dual: {'yes' if as_matroid(d).f == mat.f else 'no'}")
    return EXIT_HOLDS


def cmd_check(args) -> int:
    m = load_source(args.matroid)
    params = {k: v for k, v in vars(args).items()
              if k in ("depth", "strategy", "pairs", "budget", "spec", "lines", "dump", "certificate", "size",
                       "conclude") and v is not None}
    out = run_check(m, args.kind, params)
    if args.json:
        print(json.dumps({"check": args.kind, "verdict": out.verdict, "exit": out.code,
                          "details": out.lines, "digest": out.digest}, sort_keys=True))
    else:
        print(f"{args.kind}: {out.verdict}")
        for line in out.lines:
            print(f"  {line}")
    return out.code


def _emit_jsonl(records, out):
    if out:
        mio.write_jsonl(records, out)
    else:
        for r in records:
            print(json.dumps(r, sort_keys=True))


def cmd_enumerate(args) -> int:
    from .catalog import enumeration as en
    threads = _threads(args)
    if args.what == "ttt":
        recs = en.enumerate_ttt(threads)
        _emit_jsonl([r.to_json() for r in recs], args.out)
        return EXIT_HOLDS
    if args.n is None or args.k is None:
        raise UsageError("sparse-paving needs --n and --k")
    if args.contains:
        base = load_source(args.contains)
        if not isinstance(base, SparsePavingMatroid) or (base.n, base.k) != (args.n, args.k):
            raise UsageError("--contains must name a sparse paving matroid with the same n and k")
        seen = {}
        for m in en.enumerate_sparse_paving(args.n, args.k, base.chs):
            seen.setdefault(canon.canonical_string(m), m)
        items = sorted(seen.items(), key=lambda kv: (len(kv[1].chs), kv[0]))
    else:
        items = [(canon.canonical_string(m), m) for m in en.sparse_paving_classes(args.n, args.k, threads)]
    _emit_jsonl([mio.sparse_paving_record(m, key) for key, m in items], args.out)
    return EXIT_HOLDS


def cmd_graph(args) -> int:
    from .catalog.enumeration import relaxation_graph
    if args.family:
        try:
            family = mio.ingest(args.family, "json")
        except mio.FormatError as e:
            raise UsageError(f"{args.family}: {e}") from None
    else:
        from .catalog.enumeration import enumerate_ttt
        family = [r.matroid for r in enumerate_ttt()]
    if not all(isinstance(m, SparsePavingMatroid) for m in family):
        raise UsageError("relaxation graphs need sparse paving matroids")
    try:
        g = relaxation_graph(family)
    except ValueError as e:
        raise UsageError(str(e)) from None
    dot = g.to_dot()
    if args.dot:
        Path(args.dot).write_text(dot)
    else:
        sys.stdout.write(dot)
    cols = ", ".join(f"{c}:{len(v)}" for c, v in g.columns().items())
    print(f"{len(g.nodes)} nodes, {len(g.edges)} edges; columns by CH count {cols}", file=sys.stderr)
    return EXIT_HOLDS


def cmd_verify_rep(args) -> int:
    from .linrep import PrimeFieldMatrix, verify_representation
    try:
        a = PrimeFieldMatrix.from_json(Path(args.matrix).read_text())
    except (OSError, ValueError, KeyError) as e:
        raise UsageError(f"bad matrix file: {e}") from None
    m = load_source(args.matroid)
    try:
        res = verify_representation(a, m)
    except ValueError as e:
        raise UsageError(str(e)) from None
    print(res.describe(labels_of(m)))
    return EXIT_HOLDS if res.ok else EXIT_REFUTED


def cmd_canon(args) -> int:
    m = load_source(args.matroid)
    print(canon.canonical_string(m))
    return EXIT_HOLDS


def cmd_export(args) -> int:
    m = load_source(args.matroid)
    print(mio.export(m, args.format, args.order, args.matroid))
    return EXIT_HOLDS


def cmd_batch(args) -> int:
    from .batch import run_batch
    try:
        n = run_batch(args.jobfile, args.out, _threads(args))
    except (mio.FormatError, ValueError) as e:
        raise UsageError(str(e)) from None
    print(f"{n} records written to {args.out}", file=sys.stderr)
    return EXIT_HOLDS


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env and env.isdigit() else 1


# -- parser -----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="matext", description="Extension properties of matroids and polymatroids.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("info", help="ranks, flats, circuit-hyperplanes and duality")
    s.add_argument("matroid")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("check", help="run one property check")
    s.add_argument("kind", choices=sorted(_CHECKS))
    s.add_argument("matroid")
    s.add_argument("--depth", type=int)
    s.add_argument("--strategy", choices=["minimal", "exhaustive"])
    s.add_argument("--pairs", help="pairs as 'X,Y;X,Y', e.g. '01,56;17,35'")
    s.add_argument("--spec", help="copy-lemma steps 'X1;X2;Y|...'")
    s.add_argument("--lines", help="three lines for im, e.g. '01,23,45'")
    s.add_argument("--budget", type=int)
    s.add_argument("--size", type=int, help="set size for the pair search (default 2)")
    s.add_argument("--conclude", choices=["true", "false"], help="dual-ttt-ak: add the closing AK step")
    s.add_argument("--dump", help="write the LP model to this file")
    s.add_argument("--certificate", help="write the witness or Farkas certificate to this file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("enumerate", help="censuses as JSONL")
    s.add_argument("what", choices=["ttt", "sparse-paving"])
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--contains", help="matroid whose circuit-hyperplanes are forced")
    s.add_argument("--out")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("graph", help="relaxation graph")
    s.add_argument("what", choices=["relax"])
    s.add_argument("--family", help="JSON/JSONL file of sparse paving matroids (default: the TTT census)")
    s.add_argument("--dot")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("verify-rep", help="compare a matrix over F_p with a matroid")
    s.add_argument("--matrix", required=True)
    s.add_argument("--matroid", required=True)
    s.set_defaults(func=cmd_verify_rep)

    s = sub.add_parser("canon", help="canonical form string")
    s.add_argument("matroid")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("export", help="write a matroid as JSON or an indicator string")
    s.add_argument("matroid")
    s.add_argument("--format", choices=["json", "revlex"], default="json")
    s.add_argument("--order", choices=list(mio.ORDERS), default="revlex")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("batch", help="run a job file")
    s.add_argument("jobfile")
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_batch)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"matext: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
