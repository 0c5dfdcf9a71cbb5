"""Command-line front end.

Exit codes: 0 success, 1 bad input (unreadable, malformed or invalid
documents), 2 a mathematical property failed on valid input.  Reports are
deterministic: the same inputs and flags give byte-identical output unless
``--timing`` is passed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from . import complexes, kweight
from .axioms import CHECKS, verify_descent_axioms
from .complexes import ComplexError
from .diagram import CubicalDiagram, DiagramError, is_acyclic, simple, simple_augmented
from .kweight import BlowupData, DocumentError, HyperresolutionDoc
from .spectral import SpectralSequence, weight_filtered
from .towers import f2_tower_criterion
from .zmod import FgAbGroup

COMMANDS = ("validate", "simple", "ss", "kd", "kdc", "blowup", "compare", "check-axioms", "f2")
OK, BAD_INPUT, FAILED = 0, 1, 2


class InputError(Exception):
    def __init__(self, path: str, message: str, where: Optional[str] = None):
        super().__init__(f"{path}: {where + ': ' if where else ''}{message}")
        self.path, self.message, self.where = path, message, where


@dataclass
class RunReport:
    command: str
    inputs: list = field(default_factory=list)      # [{"path", "sha256"}]
    results: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)    # [{"property", "witness"}]
    errors: list = field(default_factory=list)      # [{"path", "where", "message"}]
    text: list = field(default_factory=list)        # rendered lines for --format text
    timing: Optional[float] = None

    @property
    def exit_code(self) -> int:
        if self.errors:
            return BAD_INPUT
        return FAILED if self.failures else OK

    def fail(self, prop: str, witness) -> None:
        self.failures.append({"property": prop, "witness": witness})

    def to_json(self) -> dict:
        out = {"command": self.command, "inputs": self.inputs, "results": self.results,
               "failures": self.failures, "errors": self.errors, "exit_code": self.exit_code}
        if self.timing is not None:
            out["timing_seconds"] = round(self.timing, 3)
        return out


def emit(report: RunReport, fmt: str) -> bytes:
    """Serialise a report; both formats are deterministic."""
    if fmt == "json":
        return (json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n").encode()
    lines = list(report.text)
    for f in report.failures:
        lines.append(f"FAILED {f['property']}: {json.dumps(f['witness'], sort_keys=True)}")
    for e in report.errors:
        loc = f" at {e['where']}" if e.get("where") else ""
        lines.append(f"ERROR {e['path']}{loc}: {e['message']}")
    if report.timing is not None:
        lines.append(f"time: {report.timing:.3f}s")
    return ("\n".join(lines) + "\n").encode()


def table(headers: list, rows: list) -> list[str]:
    """Left-aligned columns separated by two spaces."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]


# -- input ----------------------------------------------------------------------------

def corpus_names() -> list[str]:
    root = resources.files("cubedescent") / "corpus"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def resolve(path: str) -> tuple[str, bytes]:
    """Read ``path``, falling back to the bundled corpus by name."""
    p = Path(path)
    if p.is_file():
        return str(p), p.read_bytes()
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    res = resources.files("cubedescent") / "corpus" / name
    if res.is_file():
        return f"corpus:{name}", res.read_bytes()
    raise InputError(path, "no such file or corpus document")


def _load_json(path: str, report: RunReport):
    shown, raw = resolve(path)
    report.inputs.append({"path": shown, "sha256": hashlib.sha256(raw).hexdigest()})
    try:
        return shown, json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(shown, exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def kind_of(obj) -> str:
    if not isinstance(obj, dict):
        return "unknown"
    if "ambient" in obj:
        return "compact-support"
    if "kx" in obj and "d" in obj:
        return "blowup"
    if "cube" in obj and "dimension" in obj:
        return "hyperresolution"
    if "cube" in obj:
        return "diagram"
    return "unknown"


def parse(path: str, obj, kinds: tuple) -> tuple[str, object]:
    k = kind_of(obj)
    if k not in kinds:
        raise InputError(path, f"expected a {' or '.join(kinds)} document, got {k}")
    try:
        if k == "hyperresolution":
            return k, HyperresolutionDoc.from_json(obj)
        if k == "blowup":
            return k, BlowupData.from_json(obj)
        if k == "compact-support":
            return k, kweight.compact_pair_from_json(obj)
        return k, CubicalDiagram.from_json(obj)
    except DocumentError as exc:
        raise InputError(path, exc.message, exc.where) from None
    except DiagramError as exc:
        msg = str(exc)
        if exc.where and msg.startswith(exc.where + ": "):
            msg = msg[len(exc.where) + 2:]
        raise InputError(path, msg, exc.where) from None
    except (ComplexError, ValueError, TypeError, KeyError) as exc:
        raise InputError(path, str(exc)) from None


def load(path: str, report: RunReport, *kinds: str):
    shown, obj = _load_json(path, report)
    return shown, parse(shown, obj, kinds)[1]


def degree_range(spec: Optional[str]) -> Optional[list[int]]:
    """``"a..b"`` to the degrees from ``b`` down to ``a``."""
    if spec is None:
        return None
    try:
        a, b = (int(x) for x in spec.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like -2..1, got {spec!r}") from None
    lo, hi = min(a, b), max(a, b)
    return list(range(hi, lo - 1, -1))


def _g(g: FgAbGroup) -> str:
    return str(g)


# -- commands -----------------------------------------------------------------------------

def cmd_validate(args, rep: RunReport) -> None:
    rows = []
    for path in args.paths:
        try:
            shown, obj = _load_json(path, rep)
            k, _ = parse(shown, obj, ("hyperresolution", "blowup", "compact-support", "diagram"))
            rows.append([shown, k, "ok"])
        except InputError as exc:
            rep.errors.append({"path": exc.path, "where": exc.where, "message": exc.message})
            rows.append([exc.path, "-", "invalid"])
    rep.results["documents"] = [{"path": r[0], "kind": r[1], "valid": r[2] == "ok"} for r in rows]
    rep.text += table(["document", "kind", "status"], rows)


def _diagram_of(obj) -> CubicalDiagram:
    return obj.diagram if isinstance(obj, HyperresolutionDoc) else obj


def cmd_simple(args, rep: RunReport) -> None:
    shown, obj = load(args.paths[0], rep, "hyperresolution", "diagram")
    x = _diagram_of(obj)
    c = simple_augmented(x) if x.is_augmented else simple(x)
    degs = degree_range(args.range) or list(reversed(list(c.degrees)))
    rows = [[m, c.rank(m), _g(complexes.homology(c, m))] for m in degs]
    rep.results["simple"] = {"augmented": x.is_augmented, "complex": c.to_json(),
                             "homology": {str(m): complexes.homology(c, m).to_json() for m in degs}}
    rep.text.append(f"{shown}: simple of a {x.index} diagram")
    rep.text += table(["m", "rank", "H_m"], rows)
    if x.is_augmented:
        acyc = is_acyclic(x)
        rep.results["acyclic"] = acyc
        rep.text.append(f"acyclic: {'yes' if acyc else 'no'}")


def page_table(pg, ps: range, qs: list) -> list[str]:
    rows = [[q] + [_g(pg.group(p, q)) for p in ps] for q in qs]
    return table(["q\\p"] + list(ps), rows)


def cmd_ss(args, rep: RunReport) -> None:
    shown, obj = load(args.paths[0], rep, "hyperresolution", "diagram")
    x = _diagram_of(obj).restrict()
    ss = SpectralSequence(weight_filtered(x))
    r_max = args.pages or ss.fc.infinity
    ps = range(ss.fc.lo, ss.fc.hi + 1)
    qs = sorted({q for r in range(1, r_max + 1) for (_, q) in ss.page(r).nonzero()}, reverse=True) or [0]
    rep.results["pages"] = []
    for r in range(1, r_max + 1):
        pg = ss.page(r)
        rep.results["pages"].append(pg.to_json())
        rep.text.append(f"E_{r}")
        rep.text += page_table(pg, ps, qs)
        if not ss.check_square_zero(r):
            rep.fail("d_r o d_r = 0", {"page": r})
    for m in ss.degrees():
        for p, (a, b, ok) in ss.convergence(m).items():
            if not ok:
                rep.fail("E_infinity matches the abutment filtration", {"n": m, "p": p, "E_inf": str(a), "graded": str(b)})
    rep.results["infinity"] = ss.fc.infinity


def kd_rows(tab) -> tuple[list, list]:
    ps = list(range(0, tab.cube + 1))
    rows = [[r.n, _g(r.group)] + [_g(r.weights.get(p, FgAbGroup())) for p in ps] for r in tab.rows]
    return ["n", "KD_n"] + [f"gr_{p}" for p in ps], rows


def cmd_kd(args, rep: RunReport) -> None:
    shown, doc = load(args.paths[0], rep, "hyperresolution")
    tab = kweight.kd_groups_and_weights(doc, degree_range(args.range))
    rep.results["kd"] = tab.to_json()
    rep.text.append(f"{doc.name or shown}: cube {doc.cube}, dimension {doc.dimension}")
    rep.text += table(*kd_rows(tab))
    rep.text.append(f"KD_n = 0 for n < -{doc.dimension}: {'ok' if tab.vanishing_ok else 'VIOLATED'}")
    if not tab.vanishing_ok:
        bad = [r.n for r in tab.rows if r.n < -doc.dimension and not r.group.is_trivial]
        rep.fail("KD_n = 0 for n < -dimension", {"degrees": bad})
    if not tab.weights_ok:
        rep.fail("weights within the cube and summing to KD_n", {"document": doc.name})
    if not tab.convergence_ok:
        rep.fail("E_infinity matches the abutment filtration", {"document": doc.name})


def cmd_kdc(args, rep: RunReport) -> None:
    shown, (hbar, hy, f) = load(args.paths[0], rep, "compact-support")
    cs = kweight.assemble_compact_support(hbar, hy, f)
    degs = degree_range(args.range) or list(reversed(list(cs.complex.degrees))) or [0]
    rows = [[n, _g(cs.group(n))] for n in degs]
    rep.results["compact_support"] = {str(n): cs.group(n).to_json() for n in degs}
    rep.results["sequence"] = cs.sequence.to_json()
    rep.text.append(f"{shown}: K^c of {hbar.name} minus {hy.name if hy else 'nothing'}")
    rep.text += table(["n", "K^c_n"], rows)
    rep.text.append(f"long exact sequence: {'exact' if cs.sequence.ok else 'NOT exact'}")
    if not cs.sequence.ok:
        rep.fail("long exact sequence of the pair", {"nodes": [list(x) for x in cs.sequence.failures()]})


def cmd_blowup(args, rep: RunReport) -> None:
    shown, b = load(args.paths[0], rep, "blowup")
    r = kweight.blowup_model(b)
    rep.results["blowup"] = r.to_json()
    checks = r.to_json()["checks"]
    rep.text.append(f"{b.name or shown}: codimension {b.d}")
    rep.text += table(["check", "result"], [[k, "ok" if v else "FAILED"] for k, v in checks.items()])
    rep.text += table(["n", "K_n(X)", "K_n(X~)+K_n(Y)", "K_n(Y~)"],
                      [[n, f"Z^{a}", f"Z^{m}", f"Z^{c}"] for n, (a, m, c) in sorted(r.ranks.items())])
    for k in ("square_commutes", "cube_acyclic", "front_acyclic", "short_exact"):
        if not checks[k]:
            rep.fail(k, {"blowup": b.name or shown})


def cmd_compare(args, rep: RunReport) -> None:
    if len(args.paths) != 2:
        raise InputError("-", "compare takes exactly two documents")
    _, h1 = load(args.paths[0], rep, "hyperresolution")
    _, h2 = load(args.paths[1], rep, "hyperresolution")
    c = kweight.compare_hyperresolutions(h1, h2, degree_range(args.range))
    rep.results["compare"] = c.to_json()
    rows = [[n, _g(c.first.row(n).group), _g(c.second.row(n).group), "yes" if ok else "NO"]
            for n, ok in sorted(c.groups.items(), reverse=True)]
    rep.text.append(f"{h1.name} vs {h2.name}")
    rep.text += table(["n", "first", "second", "isomorphic"], rows)
    rep.text.append(f"graded pieces: {'all isomorphic' if all(c.weights.values()) else 'differ'}")
    if not c.all_isomorphic:
        rep.fail("isomorphic KD groups and graded pieces", {"mismatches": [list(m) for m in c.mismatches()]})


def cmd_axioms(args, rep: RunReport) -> None:
    r = verify_descent_axioms(seed=args.seed, trials=args.trials, max_cube=args.max_cube)
    rep.results["axioms"] = r.to_json()
    rep.text.append(f"descent axioms: seed {args.seed}, {args.trials} trials, cubes up to {args.max_cube}")
    rep.text += table(["check", "passed"], [[c, f"{r.passed[c]}/{args.trials}"] for c in CHECKS])
    for f in r.failures:
        rep.fail(f["check"], {"trial": f["trial"], "detail": f["detail"]})


def _square_of(kind: str, obj) -> CubicalDiagram:
    if kind == "blowup":
        return kweight.blowup_model(obj).square
    if kind == "hyperresolution":
        if obj.augmentation is None:
            return kweight.strict_augmentation(obj.diagram)
        return obj.augmented_diagram()
    return obj


def cmd_f2(args, rep: RunReport) -> None:
    if args.paths:
        squares = []
        for path in args.paths:
            shown, raw = _load_json(path, rep)
            k, obj = parse(shown, raw, ("blowup", "hyperresolution", "diagram"))
            sq = _square_of(k, obj)
            if not (sq.is_augmented and sq.index.n == 1):
                raise InputError(shown, "expected an augmented square")
            squares.append((shown, sq))
    else:
        squares = kweight.f2_corpus(args.seed)
    rows, res = [], []
    for name, sq in squares:
        v = f2_tower_criterion(sq)
        res.append({"square": name, **v.to_json()})
        rows.append([name, "yes" if v.acyclic else "no", "yes" if v.exact else "no", "yes" if v.agree else "NO"])
        if not v.agree:
            rep.fail("E2-acyclicity iff short exactness", {"square": name, "acyclic": v.acyclic, "exact": v.exact})
    rep.results["f2"] = res
    rep.text += table(["square", "E2-acyclic", "exact", "agree"], rows)


HANDLERS = {"validate": cmd_validate, "simple": cmd_simple, "ss": cmd_ss, "kd": cmd_kd, "kdc": cmd_kdc,
            "blowup": cmd_blowup, "compare": cmd_compare, "check-axioms": cmd_axioms, "f2": cmd_f2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage mistakes are bad input (exit 1), not property failures
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _normalise(argv: list) -> list:
    """Glue ``--range -2..1`` so the negative bound is not read as a flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv):
            out.append(f"--range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cubedescent", description="Descent computations over cubical diagrams of complexes.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("paths", nargs="*", help="documents (files, or names from the bundled corpus)")
    ap.add_argument("--range", help="degrees a..b")
    ap.add_argument("--pages", type=int, help="last spectral sequence page")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--max-cube", type=int, default=2)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")
    return ap


NEEDS_PATHS = {"validate": 1, "simple": 1, "ss": 1, "kd": 1, "kdc": 1, "blowup": 1, "compare": 2}


def run(argv: Optional[list] = None) -> tuple[RunReport, bytes, argparse.Namespace]:
    args = build_parser().parse_args(_normalise(list(sys.argv[1:] if argv is None else argv)))
    rep = RunReport(args.command)
    start = time.perf_counter()
    try:
        if len(args.paths) < NEEDS_PATHS.get(args.command, 0):
            raise InputError("-", f"{args.command} needs {NEEDS_PATHS[args.command]} document(s)")
        degree_range(args.range)
        HANDLERS[args.command](args, rep)
    except InputError as exc:
        rep.errors.append({"path": exc.path, "where": exc.where, "message": exc.message})
    except argparse.ArgumentTypeError as exc:
        rep.errors.append({"path": "-", "where": "--range", "message": str(exc)})
    except (DocumentError, DiagramError, ComplexError) as exc:
        rep.errors.append({"path": "-", "where": getattr(exc, "where", None), "message": str(exc)})
    if args.timing:
        rep.timing = time.perf_counter() - start
    return rep, emit(rep, args.format), args


def main(argv: Optional[list] = None) -> int:
    try:
        rep, out, args = run(argv)
    except UsageError as exc:
        sys.stderr.write(f"{build_parser().format_usage()}{exc}\n")
        return BAD_INPUT
    if args.out:
        Path(args.out).write_bytes(out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
