"""Command-line front end: ``supersite COMMAND FILE [options]``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 when the
only non-passing checks are inconclusive, 3 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .commands import COMMANDS, EXIT_CODES, SCHEMA, overall, run
from .parser import parse
from .printer import format_document

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="supersite", description="Symbolic checks for finite sites and superspaces.")
    p.add_argument("command", choices=[*COMMANDS, "parse", "fmt"])
    p.add_argument("document", help="path to a .ss document, or - for stdin")
    p.add_argument("--json", metavar="PATH", help="also write the report as JSON (- for stdout)")
    p.add_argument("--degree-cap", type=int, default=None,
                   help="override the degree cap of the bounded Groebner completion")
    p.add_argument("--strict-local", action="store_true", help="require local stalks in check-superspace")
    p.add_argument("--timing", action="store_true", help="include elapsed seconds in the output")
    p.add_argument("--topology", action="append", default=[], help="restrict to these topologies")
    p.add_argument("--presheaf", action="append", default=[])
    p.add_argument("--superspace", action="append", default=[])
    p.add_argument("--gluing", action="append", default=[])
    p.add_argument("--functor", action="append", default=[])
    p.add_argument("--object", action="append", default=[], help="slice objects")
    p.add_argument("--corollary-mode", metavar="TOPOLOGY",
                   help="accept sheaf witnesses for a finer topology via subordination")
    p.add_argument("--in-place", action="store_true", help="fmt: rewrite the file")
    return p


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit_json(payload, target):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.degree_cap is None and os.environ.get("SUPERSITE_DEGREE_CAP"):
        args.degree_cap = int(os.environ["SUPERSITE_DEGREE_CAP"])
    try:
        text = _read(args.document)
    except OSError as exc:
        print(f"supersite: cannot read {args.document}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    doc = parse(text)
    diagnostics = doc.diagnostics
    name = "<stdin>" if args.document == "-" else os.path.basename(args.document)
    payload = {"schema": SCHEMA, "command": args.command, "document": name,
               "diagnostics": [d.as_dict() for d in diagnostics]}

    if diagnostics:
        for d in diagnostics:
            print(f"{name}:{d.span}: {d.code}: {d.message}", file=sys.stderr)
        payload.update(verdict="error", exit_code=EXIT_USAGE, checks=[])
        if args.json:
            _emit_json(payload, args.json)
        return EXIT_USAGE

    if args.command in ("parse", "fmt"):
        out = format_document(doc)
        if args.command == "fmt" and args.in_place and args.document != "-":
            with open(args.document, "w", encoding="utf-8") as fh:
                fh.write(out)
        elif args.command == "fmt":
            sys.stdout.write(out)
        else:
            counts = {}
            for d in doc.declarations:
                counts[d.kind] = counts.get(d.kind, 0) + 1
            print(f"{name}: ok, " + ", ".join(f"{n} {k}" for k, n in sorted(counts.items())))
        payload.update(verdict="pass", exit_code=0, checks=[])
        if args.json:
            _emit_json(payload, args.json)
        return 0

    reports = run(args.command, doc, args)
    verdict = overall(reports) if reports else None
    code = EXIT_CODES[verdict] if verdict is not None else 0
    for r in reports:
        print(r)
    summary = f"{args.command}: {len(reports)} check(s), verdict {verdict.value if verdict else 'pass'}"
    if args.timing:
        summary += f" in {time.perf_counter() - start:.3f}s"
    print(summary)
    payload.update(verdict=verdict.value if verdict else "pass", exit_code=code,
                   checks=[r.as_dict() for r in reports])
    if args.timing:
        payload["seconds"] = round(time.perf_counter() - start, 3)
    if args.json:
        _emit_json(payload, args.json)
    return code
