"""Command-line surface: walk enumeration, invariants, motives, mirror checks,
the finite-field oracle, and the golden regression suite.

Every run prints a human-readable table to stdout and, when an output path is
given (or the CHARWALK_OUTPUT_DIR environment variable is set), writes a JSON
document carrying ``schema_version`` and the fully resolved configuration, so
runs are reproducible from their own reports.  Exit codes: 0 success, 1
verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .invariants import center_twist, trivial_twist, twisted_sectors, walk_invariants
from .lattices import RationalLattice
from .motive import (
    MotiveClass,
    StackSpec,
    mirror_check,
    naive_motive,
    stack_dimension,
    stringy_motive,
)
from .oracle import FiniteFieldSpec, OracleError, ff_count_rank1, recursive_walk_count
from .roots import CartanType, RootSystemError, build_root_datum
from .walks import CellIndex, InstructionWord, WalkError, enumerate_walks, validate_walk

SCHEMA_VERSION = "1"


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_letters(text, rank):
    """Comma list of word letters: a1..an, with a,b aliases at rank 2."""
    letters = []
    aliases = {"a": 0, "b": 1} if rank >= 2 else {"a": 0}
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if tok in aliases:
            letters.append(aliases[tok])
            continue
        if tok.startswith("a") and tok[1:].isdigit():
            idx = int(tok[1:]) - 1
            if 0 <= idx < rank:
                letters.append(idx)
                continue
        raise InputError(f"unknown letter {tok!r} (expected a1..a{rank})")
    return letters


def parse_weyl(datum, text):
    text = text.strip().lower()
    if text in ("e", "1", "id", ""):
        return datum.identity_element
    return datum.element_from_word(parse_letters(text, datum.rank))


def parse_punctures(datum, text):
    """Semicolon groups of Levi letters; '-' or 'none' is the empty Levi."""
    if text is None:
        return []
    out = []
    for group in text.split(";"):
        group = group.strip().lower()
        if group in ("-", "none", ""):
            out.append(frozenset())
        else:
            out.append(frozenset(parse_letters(group, datum.rank)))
    return out


def parse_twist(datum, text):
    text = (text or "none").strip().lower()
    if text in ("none", "trivial", "1"):
        return trivial_twist(datum)
    if text in ("full", "center", "z"):
        return center_twist(datum)
    raise InputError(f"unknown twist {text!r} (expected none|full)")


def build_datum(args):
    try:
        ctype = CartanType.parse(args.type)
        return build_root_datum(ctype, getattr(args, "isogeny", "sc"))
    except RootSystemError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

def emit(args, command, config, payload):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "charwalk", "version": __version__},
        "command": command,
        "config": config,
    }
    doc.update(payload)
    path = getattr(args, "output", None)
    if path is None:
        outdir = os.environ.get("CHARWALK_OUTPUT_DIR")
        if outdir:
            path = os.path.join(outdir, f"charwalk-{command}.json")
    if path:
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(f"[json written to {path}]")
    return doc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_walks(args):
    datum = build_datum(args)
    word = InstructionWord(parse_letters(args.word, datum.rank))
    start = parse_weyl(datum, getattr(args, "from_element", "e"))
    end = parse_weyl(datum, args.to) if args.to else None
    walks = enumerate_walks(datum, word, start, end)
    config = {"type": args.type, "isogeny": args.isogeny,
              "word": word.to_json(), "from": start.render(),
              "to": end.render() if end else None}
    print(f"# walks for word {','.join(word.to_json())} from {start.render()}"
          + (f" to {end.render()}" if end else ""))
    print(f"# {len(walks)} walk(s)")
    for w in walks:
        print(f"  steps {'.'.join(w.steps)}  p: {' '.join(x.render() for x in w.p)}")
    emit(args, "walks", config, {"walks": [w.to_json() for w in walks]})
    return 0


def cmd_invariants(args):
    datum = build_datum(args)
    word = InstructionWord(parse_letters(args.word, datum.rank))
    start = parse_weyl(datum, getattr(args, "from_element", "e"))
    walks = enumerate_walks(datum, word, start)
    if args.steps:
        want = tuple(s.strip().upper() for s in args.steps.split(",") if s.strip())
        walks = [w for w in walks if w.steps == want]
        if not walks:
            raise InputError(f"no walk with steps {want}")
    rows = []
    print("# steps | surjective | Z(p) | pi1(p) | S(p)")
    for w in walks:
        inv = walk_invariants(datum, w)
        s_group = inv.S_group(datum)
        rows.append({
            "steps": list(w.steps),
            "p": [x.render() for x in w.p],
            "pi": [x.render() for x in w.pi],
            "surjective": inv.surjective,
            "Z_p": inv.Z_p.to_json(),
            "pi1_p": inv.pi1_p.to_json(),
            "S_p": s_group.to_json(),
            "T_p": inv.T_p.to_json(),
            "Q_p": inv.Q_p.to_json(),
        })
        print(f"  {'.'.join(w.steps)} | {inv.surjective} | {inv.Z_p} | "
              f"{inv.pi1_p} | {s_group}")
    config = {"type": args.type, "isogeny": args.isogeny,
              "word": word.to_json(), "from": start.render(),
              "steps": args.steps}
    emit(args, "invariants", config, {"invariants": rows})
    return 0


def _spec_from_args(args, datum):
    punctures = parse_punctures(datum, args.punctures)
    k = getattr(args, "k", None)
    if k is not None:
        if k < 1:
            raise InputError("k must be >= 1")
        while len(punctures) < k - 1:
            punctures.append(frozenset())
        if len(punctures) != k - 1:
            raise InputError(
                f"--punctures lists {len(punctures)} nice punctures but k={k} "
                f"allows {k - 1}")
    twist = parse_twist(datum, getattr(args, "twist", "none"))
    return StackSpec(datum, args.genus, punctures, twist)


def cmd_motive(args):
    datum = build_datum(args)
    spec = _spec_from_args(args, datum)
    poly = naive_motive(spec, section=args.section, workers=args.workers)
    print(f"# naive motive of {spec.describe()['type']} g={spec.genus} "
          f"k={spec.k}: dim = {stack_dimension(spec)}")
    print(f"  {poly}")
    print(f"  palindromic: {poly.is_palindromic()}")
    emit(args, "motive", spec.describe() | {"section": args.section},
         {"motive": poly.to_json(), "dimension": stack_dimension(spec),
          "palindromic": poly.is_palindromic()})
    return 0


def cmd_stringy(args):
    datum = build_datum(args)
    spec = _spec_from_args(args, datum)
    res = stringy_motive(spec, section=args.section, workers=args.workers)
    print(f"# stringy motive ({res.validity}): {res.motive}")
    if res.reason:
        print(f"  note: {res.reason}")
    emit(args, "stringy", spec.describe() | {"section": args.section},
         {"stringy": res.to_json()})
    return 0


def cmd_mirror(args):
    datum = build_datum(args)
    punctures = parse_punctures(datum, args.punctures)
    k = getattr(args, "k", None)
    if k is not None:
        while len(punctures) < k - 1:
            punctures.append(frozenset())
    twist = parse_twist(datum, args.twist)
    report = mirror_check(args.type, twist, args.genus, punctures,
                          section=args.section, workers=args.workers)
    print(f"# mirror check {args.type} F={args.twist} g={args.genus} "
          f"k={len(punctures) + 1}")
    print(f"  lhs ({report.lhs.validity}): {report.lhs.motive}")
    print(f"  rhs ({report.rhs.validity}): {report.rhs.motive}")
    print(f"  equal: {report.equal}  sector-swap failures: "
          f"{report.pairing_failures}")
    emit(args, "mirror",
         {"type": args.type, "twist": args.twist, "genus": args.genus,
          "punctures": [sorted(p) for p in punctures],
          "section": args.section},
         report.to_json())
    if not report.equal or report.pairing_failures:
        return 1
    return 0


def cmd_oracle(args):
    punctures = []
    for tok in (args.zetas.split(",") if args.zetas else []):
        punctures.append(("split", int(tok)))
    for tok in (args.traces.split(",") if args.traces else []):
        punctures.append(("trace", int(tok)))
    if not punctures:
        raise InputError("need at least one --zetas or --traces entry")
    try:
        spec = FiniteFieldSpec(args.q, args.genus, punctures)
        count = ff_count_rank1(spec)
    except OracleError as exc:
        raise InputError(str(exc)) from exc
    datum = build_root_datum("A1", "sc")
    stack = StackSpec(datum, args.genus,
                      [frozenset()] * (len(punctures) - 1))
    poly = naive_motive(stack)
    value = poly.evaluate(args.q)
    agree = count == value
    print(f"# oracle count over F_{args.q}: {count}")
    print(f"# naive motive {poly} at q={args.q}: {value}")
    print(f"  agreement: {agree}")
    emit(args, "oracle",
         {"q": args.q, "genus": args.genus, "punctures": punctures},
         {"count": str(count), "motive_value": str(value), "agree": agree})
    return 0 if agree else 1


# ---------------------------------------------------------------------------
# golden regression suite
# ---------------------------------------------------------------------------

def _golden_checks():
    """Yield (name, callable) pairs; each raises AssertionError on failure."""

    def a2_walk_list():
        a2 = build_root_datum("A2", "sc")
        walks = enumerate_walks(a2, [0, 1, 1, 0], a2.identity_element)
        tracks = {tuple(x.render() for x in w.p) for w in walks}
        expected = {
            ("e", "s1", "s2*s1", "s1", "e"),
            ("e", "s1", "s2*s1", "s1", "s1"),
            ("e", "s1", "s2*s1", "s2*s1", "s1*s2*s1"),
        }
        assert len(walks) == 3 and tracks == expected
        assert ["".join(w.steps) for w in walks] == ["UUSU", "UUDS", "UUDD"]

    def sp4_table_one():
        c2 = build_root_datum("C2", "sc")
        walks = enumerate_walks(c2, [0, 0, 0, 1, 0, 0, 0, 1])
        match = [w for w in walks
                 if w.steps == ("U", "S", "D", "U", "U", "S", "D", "D")]
        assert len(match) == 1
        w = match[0]
        assert validate_walk(c2, w) is None
        assert [x.render() for x in w.p] == \
            ["e", "s1", "s1", "e", "s2", "s1*s2", "s1*s2", "s2", "e"]
        assert [x.render() for x in w.pi] == \
            ["e", "s1", "e", "s1", "s2*s1", "s1*s2*s1", "s2*s1",
             "s1*s2*s1", "s2*s1*s2*s1"]
        inv = walk_invariants(c2, w)
        assert inv.pi1_p.is_trivial
        assert inv.S_group(c2).invariant_factors == (2, 2)
        assert inv.Z_p.invariant_factors == (2,)
        assert inv.S_group(c2).order() == \
            c2.center_group().order() * inv.Z_p.order()

    def sp4_table_two():
        from .walks import cell_word
        c2 = build_root_datum("C2", "sc")
        s1 = c2.element_from_word((0,))
        s121 = c2.element_from_word((0, 1, 0))
        cell = CellIndex(punctures=[(frozenset(), s1), (frozenset(), s121),
                                    (frozenset(), s121), (frozenset(), s1)])
        word = cell_word(c2, cell).unipotent_word
        assert word.letters == (0, 0, 0, 1, 0, 0, 1, 0,
                                0, 1, 0, 0, 1, 0, 0, 0)
        steps = tuple("U S D U U S U U D D S D D U S D".split())
        walks = [w for w in enumerate_walks(c2, word, end=c2.identity_element)
                 if w.steps == steps]
        assert len(walks) == 1
        w = walks[0]
        assert [x.render() for x in w.p] == \
            ["e", "s1", "s1", "e", "s2", "s1*s2", "s1*s2", "s2*s1*s2",
             "s2*s1*s2*s1", "s2*s1*s2", "s1*s2", "s1*s2", "s2", "e",
             "s1", "s1", "e"]
        assert [x.render() for x in w.pi] == \
            ["e", "s1", "e", "s1", "s2*s1", "s1*s2*s1", "s2*s1", "s1", "e",
             "s1", "s2*s1", "s1*s2*s1", "s2*s1", "s1", "e", "s1", "e"]
        inv = walk_invariants(c2, w)
        assert inv.pi1_p.is_trivial
        assert inv.S_group(c2).invariant_factors == (2, 2)
        assert inv.Z_p.invariant_factors == (2,)

    def mass_identity_small():
        from itertools import product as iproduct
        q = MotiveClass.q()
        for name in ("A1", "A2", "B2"):
            datum = build_root_datum(name, "sc")
            table = datum.weyl_table()
            for l in range(0, 5):
                for word in iproduct(range(datum.rank), repeat=l):
                    for start in table.elements:
                        total = MotiveClass.zero()
                        for w in enumerate_walks(datum, list(word), start):
                            total = total + \
                                MotiveClass({1: 1, 0: -1}) ** len(w.stay_set) \
                                * q ** len(w.up_set)
                        assert total == q ** l

    def rank1_mirror():
        report = mirror_check("A1", "full", 1, ())
        assert report.equal
        assert report.lhs.motive == MotiveClass({2: 1, 1: 4, 0: 1})
        assert report.pairing_failures == 0

    def rank1_sectors():
        a1 = build_root_datum("A1", "sc")
        e, s = a1.identity_element, a1.simple_reflections[0]
        from .walks import cell_word
        cell = CellIndex(handles=[(e, s)])
        wk = enumerate_walks(a1, cell_word(a1, cell).unipotent_word, end=e)[0]
        rep = twisted_sectors(a1, cell, wk, center_twist(a1))
        assert rep.m1 == 2 and rep.m2 == 1
        assert rep.m1 * rep.m2 == 2

    def dual_generating_sets():
        from .lattices import Sublattice
        from itertools import product as iproduct
        a2 = build_root_datum("A2", "sc")
        for l in range(0, 5):
            for word in iproduct(range(2), repeat=l):
                for w in enumerate_walks(a2, list(word)):
                    cols_pi, cols_p = [], []
                    for k in sorted(w.stay_set):
                        i = w.letter(k)
                        unit = [int(i == j) for j in range(2)]
                        cols_pi.append(a2.to_tz_int(
                            w.pi[k].inverse.act_coroot(unit)))
                        cols_p.append(a2.to_tz_int(
                            w.p[k].inverse.act_coroot(unit)))
                    assert Sublattice(2, cols_pi) == Sublattice(2, cols_p)

    yield "a2-walk-list", a2_walk_list
    yield "sp4-table-1", sp4_table_one
    yield "sp4-table-2", sp4_table_two
    yield "mass-identity", mass_identity_small
    yield "rank1-mirror", rank1_mirror
    yield "rank1-sectors", rank1_sectors
    yield "dual-generating-sets", dual_generating_sets


def verify_suite(budget_seconds=300.0):
    """Run every golden regression; returns (report_rows, all_passed)."""
    rows = []
    passed = True
    t_start = time.monotonic()
    for name, check in _golden_checks():
        elapsed = time.monotonic() - t_start
        if elapsed > budget_seconds:
            rows.append({"check": name, "status": "SKIP",
                         "detail": f"runtime budget exceeded after {elapsed:.0f}s"})
            passed = False
            continue
        t0 = time.monotonic()
        try:
            check()
            rows.append({"check": name, "status": "PASS",
                         "seconds": round(time.monotonic() - t0, 3)})
        except AssertionError as exc:
            rows.append({"check": name, "status": "FAIL",
                         "detail": str(exc) or "assertion failed",
                         "seconds": round(time.monotonic() - t0, 3)})
            passed = False
        except Exception as exc:  # a crash is a failure with diagnostics
            rows.append({"check": name, "status": "FAIL",
                         "detail": f"{type(exc).__name__}: {exc}",
                         "seconds": round(time.monotonic() - t0, 3)})
            passed = False
    total = time.monotonic() - t_start
    if total > budget_seconds:
        rows.append({"check": "runtime-budget", "status": "FAIL",
                     "detail": f"suite took {total:.0f}s > {budget_seconds:.0f}s"})
        passed = False
    return rows, passed


def cmd_verify(args):
    rows, passed = verify_suite(budget_seconds=args.budget)
    for row in rows:
        detail = f"  ({row['detail']})" if "detail" in row else ""
        print(f"{row['status']:4s} {row['check']}{detail}")
    print(f"# verify: {'all checks passed' if passed else 'FAILURES above'}")
    emit(args, "verify", {"budget_seconds": args.budget},
         {"checks": rows, "passed": passed})
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def make_parser():
    parser = argparse.ArgumentParser(
        prog="charwalk",
        description="Walk calculus on Bruhat graphs: invariants, motives, "
                    "duality and mirror checks.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, typed=True):
        if typed:
            p.add_argument("--type", required=True, help="Cartan type, e.g. A2")
            p.add_argument("--isogeny", default="sc", choices=["sc", "ad"])
        p.add_argument("--output", help="JSON report path")
        p.add_argument("--workers", type=int, default=1,
                       help="worker count (default 1: sequential)")

    p = sub.add_parser("walks", help="enumerate walks for a word")
    common(p)
    p.add_argument("--word", required=True, help="comma letters, e.g. a,b,b,a")
    p.add_argument("--from", dest="from_element", default="e",
                   help="start element as a reduced word, or e")
    p.add_argument("--to", help="optional end filter")
    p.set_defaults(func=cmd_walks)

    p = sub.add_parser("invariants", help="walk invariants for a word")
    common(p)
    p.add_argument("--word", required=True)
    p.add_argument("--from", dest="from_element", default="e")
    p.add_argument("--steps", help="restrict to one walk by its step tags U,S,D")
    p.set_defaults(func=cmd_invariants)

    for verb, fn, twist_default in (("motive", cmd_motive, "none"),
                                    ("stringy", cmd_stringy, "none")):
        p = sub.add_parser(verb, help=f"{verb} of a character stack")
        common(p)
        p.add_argument("--genus", "--g", dest="genus", type=int, default=1)
        p.add_argument("--k", type=int, default=None,
                       help="total punctures (fills empty Levis)")
        p.add_argument("--punctures",
                       help="semicolon groups of Levi letters; '-' = empty")
        p.add_argument("--F", "--twist", dest="twist", default=twist_default,
                       choices=["none", "full"])
        p.add_argument("--section", default="lex", choices=["lex", "revlex"])
        p.set_defaults(func=fn)

    p = sub.add_parser("mirror", help="mirror-symmetry comparison")
    common(p)
    p.add_argument("--genus", "--g", dest="genus", type=int, default=1)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--punctures")
    p.add_argument("--F", "--twist", dest="twist", default="full",
                   choices=["none", "full"])
    p.add_argument("--section", default="lex", choices=["lex", "revlex"])
    p.set_defaults(func=cmd_mirror)

    p = sub.add_parser("oracle", help="finite-field count vs naive motive")
    common(p, typed=False)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--genus", "--g", dest="genus", type=int, default=1)
    p.add_argument("--zetas", help="comma list of split eigenvalues")
    p.add_argument("--traces", help="comma list of class traces")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="golden regression suite")
    common(p, typed=False)
    p.add_argument("--budget", type=float, default=300.0,
                   help="runtime budget in seconds")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, WalkError, RootSystemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
