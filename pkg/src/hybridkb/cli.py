"""Batch runner and interactive loop for knowledge-base files."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, TextIO

from .errors import KBError, ParseError
from .kb import Answer, KnowledgeBase, SessionConfig
from .language import parse_program
from .fuzzy import ALL_SEMANTICS, CONJUNCTIONS, IMPLICATIONS, TNORM_FAMILIES

PROMPT = "kb> "


class Session:
    """A knowledge base plus the output conventions of the command line."""

    def __init__(self, config: SessionConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr):
        self.kb = KnowledgeBase(config)
        self.out = out
        self.err = err
        self.errors = 0

    @property
    def config(self) -> SessionConfig:
        return self.kb.config

    def report(self, where: str, exc) -> None:
        self.errors += 1
        print(f"{where}: error: {exc}", file=self.err)

    def run_text(self, text: str, origin: str = "<input>", line_offset: int = 0) -> bool:
        """Parse and execute; returns False on the first error when strict, else after reporting."""
        try:
            statements = parse_program(text)
        except ParseError as exc:
            self.report(f"{origin}:{exc.line + line_offset}:{exc.column}", exc.message)
            return False
        ok = True
        for stmt in statements:
            try:
                result = self.kb.execute(stmt)
            except (KBError, ValueError) as exc:
                self.report(f"{origin}:{stmt.line + line_offset}", exc)
                ok = False
                if self.config.strict:
                    return False
                continue
            self.emit(result)
        return ok

    def emit(self, result) -> None:
        if isinstance(result, Answer):
            print(result.machine() if self.config.format == "machine" else result.text, file=self.out)
            return
        if self.config.trace:
            for effect in result:
                print(f"effect: {effect}", file=self.err)
            for line in self.kb.trace:
                print(f"trace: {line}", file=self.err)

    def load(self, path: str) -> bool:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            self.report(path, exc)
            return False
        return self.run_text(text, path)

    # -- directives -------------------------------------------------------

    def directive(self, line: str) -> bool:
        """Handle a ``:`` directive; returns False when the session should end."""
        parts = line.split()
        name, args = parts[0], parts[1:]
        if name == ":quit":
            return False
        if name == ":load" and len(args) == 1:
            self.load(args[0])
        elif name == ":taxonomy" and not args:
            print(self.kb.taxonomy().render_tree(), file=self.out)
        elif name == ":facts" and len(args) <= 1:
            dump = self.kb.dump(args[0] if args else None)
            if dump:
                print(dump, file=self.out)
        elif name == ":trace" and len(args) == 1 and args[0] in ("on", "off"):
            self.kb.config = replace(self.config, trace=args[0] == "on")
        elif name == ":set" and len(args) == 2:
            try:
                config = self.config.with_setting(args[0], args[1])
                if config.strict != self.config.strict:
                    raise ValueError("strict mode is fixed for the session")
                self.kb.configure(config)
            except (KeyError, ValueError, KBError) as exc:
                self.report(name, exc)
        elif name == ":reset" and not args:
            self.kb.reset()
        else:
            self.report(name, ValueError(f"unknown or malformed directive: {line.strip()}"))
        return True

    def repl(self, stream: TextIO) -> None:
        interactive = stream.isatty()
        buffer, start, number = "", 0, 0
        while True:
            if interactive:
                print(PROMPT if not buffer else "... ", end="", file=self.out, flush=True)
            line = stream.readline()
            if not line:
                break
            number += 1
            if not buffer and line.strip().startswith(":"):
                if not self.directive(line.strip()):
                    return
                continue
            if not buffer:
                start = number
            buffer += line
            if _balanced(buffer):
                self.run_text(buffer, "<stdin>", start - 1)
                buffer = ""
        if buffer.strip():
            self.run_text(buffer, "<stdin>", start - 1)


def _balanced(text: str) -> bool:
    depth = 0
    for line in text.splitlines():
        for ch in line.split(";", 1)[0]:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
    return depth <= 0


def run_batch(files, evals=(), config: Optional[SessionConfig] = None,
              out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    """Execute files then ``--eval`` strings in order; returns the exit status."""
    session = Session(config or SessionConfig(), out, err)
    for path in files:
        if not session.load(path) and session.config.strict:
            return 1
    for i, text in enumerate(evals, 1):
        if not session.run_text(text, f"<eval {i}>") and session.config.strict:
            return 1
    return 1 if session.errors else 0


def repl(config: Optional[SessionConfig] = None, stream: TextIO = sys.stdin,
         out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    session = Session(config or SessionConfig(), out, err)
    session.repl(stream)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridkb", description="Hybrid terminological and plausible knowledge base.")
    p.add_argument("--load", action="append", default=[], metavar="FILE", help="load a KB file (repeatable)")
    p.add_argument("--eval", action="append", default=[], metavar="STMT", help="execute statements (repeatable)")
    p.add_argument("--tnorm", choices=TNORM_FAMILIES, default="min")
    p.add_argument("--conorm", choices=("max", "probabilistic-sum", "bounded-sum"), default="max")
    p.add_argument("--implication", choices=IMPLICATIONS, default="kleene-dienes")
    p.add_argument("--all-semantics", choices=ALL_SEMANTICS, default="implication")
    p.add_argument("--conjunction", choices=CONJUNCTIONS, default="min-scalar")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--scc-bound", type=int, default=10)
    p.add_argument("--trace", action="store_true", help="print effects and recomputed nodes on stderr")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--strict", action="store_true", help="stop at the first error; require declarations")
    p.add_argument("--interactive", "-i", action="store_true", help="enter the loop after loading")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = SessionConfig(
            implication=args.implication, all_semantics=args.all_semantics, conjunction=args.conjunction,
            tnorm=args.tnorm, conorm=args.conorm, threshold=args.threshold, scc_bound=args.scc_bound,
            trace=args.trace, format=args.format, strict=args.strict,
        )
    except ValueError as exc:
        print(f"hybridkb: error: {exc}", file=sys.stderr)
        return 2
    if (args.load or args.eval) and not args.interactive:
        return run_batch(args.load, args.eval, config)
    session = Session(config)
    for path in args.load:
        session.load(path)
    for i, text in enumerate(args.eval, 1):
        session.run_text(text, f"<eval {i}>")
    session.repl(sys.stdin)
    return 0


if __name__ == "__main__":
    sys.exit(main())
