"""Command-line front end.

Exit status: 0 for an affirmative result, 1 for a negative verdict, 2 for
unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .catalogue import DEFAULT_POINT_CAP, read_spec, truncate, validate
from .classifier import report
from .common import DEFAULT_CAP, DomainError, ParseError, ResourceError
from .ideals import ideal_member, loads_profile
from .posets import atoms, dumps_preorder, is_separative, read_preorder, sm, sq
from .structures import copies, dumps_structure, read_structure
from .verification import SUITES, run_suites

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def parse_caps(text: str) -> dict[str, int]:
    caps = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ("points", "components", "size"):
            raise argparse.ArgumentTypeError(f"bad cap {item!r}; use points=N,components=K,size=M")
        try:
            caps[key] = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"cap {key} needs an integer") from None
    return caps


def _emit(out, fmt: str, pairs: list[tuple[str, str]], text: str) -> None:
    if fmt == "record":
        out.write("".join(f"{k}={v}\n" for k, v in pairs))
    else:
        out.write(text if text.endswith("\n") else text + "\n")


def cmd_validate(args, out) -> int:
    result = validate(read_spec(args.spec))
    problems = result.failures + result.unverified
    pairs = [("valid", "yes" if result.ok else "no"), ("pairs_checked", str(result.pairs_checked))]
    pairs += [(f"problem.{i}", p.describe()) for i, p in enumerate(problems)]
    text = "valid" if result.ok else "invalid\n" + "".join(f"  {p.describe()}\n" for p in problems)
    _emit(out, args.format, pairs, text)
    return EXIT_YES if result.ok else EXIT_NO


def cmd_classify(args, out) -> int:
    rep = report(read_spec(args.spec))
    _emit(out, args.format, rep.fields(), rep.summary())
    return EXIT_YES if rep.valid else EXIT_NO


def cmd_report(args, out) -> int:
    rep = report(read_spec(args.spec))
    out.write(rep.to_record() if args.format == "record" else rep.to_text())
    return EXIT_YES if rep.valid else EXIT_NO


def cmd_ideal(args, out) -> int:
    spec = read_spec(args.spec)
    path = Path(args.profile)
    profile = loads_profile(path.read_text(), source=str(path))
    member = ideal_member(spec, profile)
    word = "true" if member else "false"
    _emit(out, args.format, [("member", word)], f"member: {word}")
    return EXIT_YES if member else EXIT_NO


def cmd_copies(args, out) -> int:
    pattern, host = read_structure(args.pattern), read_structure(args.host)
    if host.n > args.cap:
        raise ResourceError(f"host has {host.n} points, above the cap {args.cap}")
    found = sorted(sorted(c) for c in copies(pattern, host))
    listing = ["{" + ",".join(map(str, c)) + "}" for c in found]
    pairs = [("count", str(len(found)))] + [(f"copy.{i}", s) for i, s in enumerate(listing)]
    text = f"{len(found)} copies\n" + "".join(s + "\n" for s in listing)
    _emit(out, args.format, pairs, text)
    return EXIT_YES if found else EXIT_NO


def cmd_truncate(args, out) -> int:
    caps = {"components": 3, "size": 4, "points": DEFAULT_POINT_CAP, **args.caps}
    spec = read_spec(args.spec)
    t = truncate(spec, caps["components"], caps["size"], caps["points"])
    out.write(dumps_structure(t.structure))
    for b, (slot, block) in enumerate(zip(t.slots, t.blocks)):
        cls = "family" if slot.cls == spec.family_index else str(slot.cls)
        out.write(f"# block {b}: class {cls} component {slot.index} points {min(block)}..{max(block)}\n")
    return EXIT_YES


def cmd_poset(args, out) -> int:
    P = read_preorder(args.file, strict=args.strict)
    if args.op == "sq":
        Q = sq(P)
        word = "class" if Q.size == 1 else "classes"
        lines = [f"{Q.size} {word}"]
        lines += [f"class {i}: {{{','.join(map(str, c))}}}" for i, c in enumerate(Q.classes)]
        lines += [f"le {a} {b}" for a in range(Q.size) for b in range(Q.size) if a != b and Q.order.le[a, b]]
        pairs = [("classes", str(Q.size))] + [(f"class.{i}", ",".join(map(str, c))) for i, c in enumerate(Q.classes)]
        _emit(out, args.format, pairs, "\n".join(lines))
        return EXIT_YES
    if args.op == "sm":
        out.write(dumps_preorder(sm(P)))
        return EXIT_YES
    if args.op == "atoms":
        found = sorted(atoms(P))
        text = "atoms: {" + ",".join(map(str, found)) + "}"
        _emit(out, args.format, [("atoms", ",".join(map(str, found)))], text)
        return EXIT_YES if found else EXIT_NO
    sep = is_separative(P)
    word = "yes" if sep else "no"
    _emit(out, args.format, [("separative", word)], f"separative: {word}")
    return EXIT_YES if sep else EXIT_NO


def cmd_verify(args, out) -> int:
    names = list(SUITES) if "all" in args.suites else args.suites
    results = run_suites(names, seed=args.seed)
    if args.format == "record":
        for r in results:
            key = r.name.replace(" ", "_")
            out.write(f"{key}={'PASS' if r.passed else 'FAIL'}\n{key}.checks={r.checked}\n")
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            out.write(f"{r.name.ljust(width)}  {'PASS' if r.passed else 'FAIL'}  {r.checked:>7} checks\n")
            for f in r.failures[:5]:
                out.write(f"    {f}\n")
    return EXIT_YES if all(r.passed for r in results) else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copyposets", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "record"], default="text")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the embeddability hypotheses")
    p.add_argument("spec")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("classify", parents=[common], help="one-line classification")
    p.add_argument("spec")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("report", parents=[common], help="full classification report")
    p.add_argument("spec")
    p.set_defaults(run=cmd_report)

    p = sub.add_parser("ideal", parents=[common], help="is a trace profile copy-free?")
    p.add_argument("spec")
    p.add_argument("profile")
    p.set_defaults(run=cmd_ideal)

    p = sub.add_parser("copies", parents=[common], help="list copies of a structure inside another")
    p.add_argument("pattern")
    p.add_argument("host")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(run=cmd_copies)

    p = sub.add_parser("truncate", parents=[common], help="finite piece of a catalogue structure")
    p.add_argument("spec")
    p.add_argument("--caps", type=parse_caps, default={})
    p.set_defaults(run=cmd_truncate)

    p = sub.add_parser("poset", parents=[common], help="pre-order operations")
    p.add_argument("op", choices=["sq", "sm", "atoms", "separative"])
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="reject input that is not already closed")
    p.set_defaults(run=cmd_poset)

    p = sub.add_parser("verify", parents=[common], help="run property suites")
    p.add_argument("suites", nargs="+", choices=["all", *SUITES])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_YES
    try:
        return args.run(args, out)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
    except (DomainError, ResourceError) as exc:
        err.write(f"error: {exc}\n")
    except OSError as exc:
        err.write(f"error: {exc.filename}: {exc.strerror}\n")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
