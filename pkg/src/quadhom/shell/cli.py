"""Command line entry point.

    quadhom run SCRIPT [--seed N] [--trials N] [--pool P] [--order O] [--out FILE]
    quadhom verify-cert FILE
    quadhom theta --ring "Q[x,y]" "J=(x,y)" "a=[x,y]" [--out FILE]

Every session command is also a subcommand; its arguments are written in
session syntax.  Exit codes: 0 ok, 1 verification failure, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import sys

from .certs import SchemaError, dumps, load, verify_document
from .parser import ParseError, parse
from .runner import COMMANDS, EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunOptions, run


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    p.add_argument("--trials", type=int, default=200, help="cap on search trials")
    p.add_argument("--pool", help="comma-separated coefficient pool, e.g. '0,1,-1,x,y'")
    p.add_argument("--order", help="default monomial order (grevlex, grlex, lex, block(k))")
    p.add_argument("--out", help="write the certificate bundle here ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadhom", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="execute a session script")
    p.add_argument("script", help="script file ('-' for stdin)")
    _common(p)
    p = sub.add_parser("verify-cert", help="re-verify a certificate or bundle")
    p.add_argument("file")
    p.add_argument("--quiet", action="store_true")
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the session command {name!r}")
        p.add_argument("args", nargs="*", help="key=value arguments in session syntax")
        p.add_argument("--ring", help="ring declaration, e.g. 'Q[x,y]'")
        p.add_argument("--script", help="script run first (ring and let bindings)")
        _common(p)
    return ap


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _options(ns) -> RunOptions:
    pool = tuple(t.strip() for t in ns.pool.split(",")) if ns.pool else None
    return RunOptions(seed=ns.seed, trials=ns.trials, pool=pool, order=ns.order)


def _execute(text: str, ns, out, err) -> int:
    try:
        script = parse(text)
    except ParseError as exc:
        err.write(f"parse error at {exc}\n")
        return EXIT_USAGE
    if ns.trials < 1:
        err.write("--trials must be at least 1\n")
        return EXIT_USAGE
    res = run(script, _options(ns))
    out.write(res.text())
    if ns.out and res.status != EXIT_USAGE:
        doc = dumps(res.bundle())
        if ns.out == "-":
            out.write(doc)
        else:
            with open(ns.out, "w", encoding="utf-8") as fh:
                fh.write(doc)
    return res.status


def _verify(ns, out, err) -> int:
    try:
        reports = verify_document(load(_read(ns.file)))
    except OSError as exc:
        err.write(f"cannot read {ns.file}: {exc}\n")
        return EXIT_USAGE
    except SchemaError as exc:
        err.write(f"schema error: {exc}\n")
        return EXIT_USAGE
    status = EXIT_OK
    for k, rep in enumerate(reports, 1):
        lines = rep.lines() if not ns.quiet or not rep.ok else rep.lines()[:1]
        out.write(f"#{k} " + "\n".join(lines) + "\n")
        if not rep.ok:
            status = EXIT_FAIL
    out.write(f"{sum(r.ok for r in reports)}/{len(reports)} certificate(s) verified\n")
    return status


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if ns.command == "run":
        try:
            text = _read(ns.script)
        except OSError as exc:
            err.write(f"cannot read {ns.script}: {exc}\n")
            return EXIT_USAGE
        return _execute(text, ns, out, err)
    if ns.command == "verify-cert":
        return _verify(ns, out, err)
    prelude = ""
    if ns.script:
        try:
            prelude = _read(ns.script)
        except OSError as exc:
            err.write(f"cannot read {ns.script}: {exc}\n")
            return EXIT_USAGE
    ring = f"ring {ns.ring};\n" if ns.ring else ""
    text = prelude + "\n" + ring + f"cmd {ns.command} " + " ".join(ns.args) + ";\n"
    return _execute(text, ns, out, err)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
