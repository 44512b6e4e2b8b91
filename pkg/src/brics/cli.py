"""Command-line interface.

Exit codes: 0 success; 1 usage or IO error; 2 success with parse
diagnostics (output still produced); 3 refactor error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .blockparse import block_at, parse_blocks
from .errors import BricsError
from .grammar import (builtin_grammars_path, load_builtin, load_grammar_dir,
                      parse_grammar)
from .refactor import extract_block, fold_spans
from .render import render_ansi, render_svg
from .session import text_digest
from .source import SourceText
from .viewmodel import DEFAULT_PALETTE, editor_rects, mark_errors, overview_model

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIAGNOSTICS = 2
EXIT_REFACTOR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


class Once(argparse.Action):
    """Reject a flag given more than once instead of silently keeping
    the last value."""

    def __call__(self, parser, namespace, values, option_string=None):
        if getattr(namespace, self.dest, None) is not None:
            parser.error(f"duplicate flag {option_string}")
        setattr(namespace, self.dest, values)


def build_parser() -> _Parser:
    parser = _Parser(prog="brics", description="Nested block rendering for source code")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    render = sub.add_parser("render", help="render a file as SVG or ANSI text")
    render.add_argument("file")
    render.add_argument("--grammar", required=True, action=Once)
    render.add_argument("--format", required=True, choices=("svg", "ansi"), action=Once)
    render.add_argument("--out", action=Once)
    render.add_argument("--fold", type=int, action=Once, metavar="G",
                        help="fold block interiors below granularity G")

    overview = sub.add_parser("overview", help="write the minimap model as JSON")
    overview.add_argument("file")
    overview.add_argument("--grammar", required=True, action=Once)
    overview.add_argument("--width", required=True, type=int, action=Once)
    overview.add_argument("--height", required=True, type=int, action=Once)
    overview.add_argument("--granularity", required=True, type=int, action=Once)
    overview.add_argument("--from", dest="from_line", type=int, action=Once)
    overview.add_argument("--to", dest="to_line", type=int, action=Once)
    overview.add_argument("--errors", action=Once, metavar="PATH",
                          help="file with one 1-based error line number per line")
    overview.add_argument("--out", required=True, action=Once)

    extract = sub.add_parser("extract", help="extract the block at a position into a method")
    extract.add_argument("file")
    extract.add_argument("--grammar", required=True, action=Once)
    extract.add_argument("--block", required=True, action=Once, metavar="LINE:COL")
    extract.add_argument("--name", required=True, action=Once)
    extract.add_argument("--write", action="store_true")

    grammar = sub.add_parser("grammar", help="grammar file utilities")
    gsub = grammar.add_subparsers(dest="grammar_command", required=True,
                                  parser_class=_Parser)
    check = gsub.add_parser("check", help="validate a grammar file")
    check.add_argument("path")

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--port", required=True, type=int, action=Once)
    serve.add_argument("--grammars", action=Once, metavar="DIR")
    serve.add_argument("--host", action=Once, default=None)
    return parser


def _read_text(path: str) -> str:
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path}: not valid UTF-8: {exc}") from exc


def _print_diagnostics(path: str, diags) -> None:
    for d in diags:
        print(f"{path}:{d.line}:{d.col}: {d.code}: {d.message}", file=sys.stderr)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _cmd_render(args) -> int:
    grammar = load_builtin(args.grammar)
    source = SourceText.from_text(_read_text(args.file))
    tree, diags = parse_blocks(source, grammar)
    rects = editor_rects(tree, source, DEFAULT_PALETTE)
    if args.format == "svg":
        folds = fold_spans(tree, args.fold) if args.fold is not None else []
        output = render_svg(rects, folds, source)
    else:
        output = render_ansi(rects, source, DEFAULT_PALETTE)
    _emit(output, args.out)
    _print_diagnostics(args.file, diags)
    return EXIT_DIAGNOSTICS if diags else EXIT_OK


def _read_error_lines(path: str) -> list[int]:
    lines = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if not raw:
            continue
        try:
            lines.append(int(raw))
        except ValueError as exc:
            raise UsageError(f"{path}: bad error line {raw!r}") from exc
    return lines


def _cmd_overview(args) -> int:
    grammar = load_builtin(args.grammar)
    source = SourceText.from_text(_read_text(args.file))
    tree, diags = parse_blocks(source, grammar)
    zoom = (args.from_line if args.from_line is not None else 1,
            args.to_line if args.to_line is not None else source.line_count)
    model = overview_model(tree, source, args.width, args.height,
                           args.granularity, zoom, DEFAULT_PALETTE)
    if args.errors:
        model = mark_errors(model, _read_error_lines(args.errors))
    Path(args.out).write_text(json.dumps(model.to_dict(), indent=2) + "\n",
                              encoding="utf-8")
    _print_diagnostics(args.file, diags)
    return EXIT_DIAGNOSTICS if diags else EXIT_OK


def _cmd_extract(args) -> int:
    grammar = load_builtin(args.grammar)
    text = _read_text(args.file)
    source = SourceText.from_text(text)
    tree, diags = parse_blocks(source, grammar)
    try:
        line_s, _, col_s = args.block.partition(":")
        line, col = int(line_s), int(col_s)
    except ValueError:
        raise UsageError(f"--block expects LINE:COL, got {args.block!r}")
    try:
        node = block_at(tree, line, col)
        if node is None:
            print(f"no block at {line}:{col}", file=sys.stderr)
            return EXIT_REFACTOR
        result = extract_block(source, tree, grammar, node.id, args.name)
    except ValueError as exc:
        raise UsageError(str(exc))
    except BricsError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_REFACTOR
    if args.write:
        Path(args.file).write_text(result.new_source, encoding="utf-8")
    else:
        _emit(result.new_source, None)
    _print_diagnostics(args.file, diags)
    return EXIT_DIAGNOSTICS if diags else EXIT_OK


def _cmd_grammar_check(args) -> int:
    grammar, diags = parse_grammar(_read_text(args.path))
    if grammar is None:
        for d in diags:
            print(f"{args.path}: {d.path}: {d.message}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    print(f"ok: {grammar.name} ({len(grammar.blocks)} block pair(s), "
          f"{len(grammar.kinds)} keyword(s))")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    directory = Path(args.grammars) if args.grammars else builtin_grammars_path()
    grammars = load_grammar_dir(directory)
    if not grammars:
        raise UsageError(f"no grammar files in {directory}")
    app = create_app(grammars)
    uvicorn.run(app, host=args.host or "127.0.0.1", port=args.port,
                log_level="warning")
    return EXIT_OK


def run_cli(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "render":
            return _cmd_render(args)
        if args.command == "overview":
            return _cmd_overview(args)
        if args.command == "extract":
            return _cmd_extract(args)
        if args.command == "grammar":
            return _cmd_grammar_check(args)
        if args.command == "serve":
            return _cmd_serve(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BricsError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[list[str]] = None) -> int:
    return run_cli(argv if argv is not None else sys.argv[1:])
