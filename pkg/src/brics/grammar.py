"""Structure grammars: per-language config describing what counts as a block.

A grammar file is a JSON document (one per language, ``<name>.grammar.json``)
with the fields ``name``, ``extensions``, ``lineComments``, ``blockComments``,
``strings``, ``blocks``, ``kinds``, ``defaultType`` and an optional
``conditionals`` object naming the preprocessor-style directives.
Grammars are immutable after loading and safe to share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import GrammarError, UnknownGrammarError

_WORD = "abcdefghijklmnopqrstuvwxyz0123456789_"


class BlockKind(str, Enum):
    """Closed classification of block regions; GENERIC is the fallback."""

    BRANCH = "branch"
    LOOP = "loop"
    GUARD = "guard"
    CALLABLE = "callable"
    TYPE_DECL = "type_decl"
    CONDITIONAL_REGION = "conditional_region"
    GENERIC = "generic"


@dataclass(frozen=True)
class GrammarDiagnostic:
    """Problem found while validating a grammar config.

    ``path`` is the slash-separated location of the offending field,
    e.g. ``blocks/0/close``.
    """

    path: str
    message: str
    severity: str = "error"


@dataclass(frozen=True)
class StringSyntax:
    open: str
    close: str
    escape: str = ""


@dataclass(frozen=True)
class DelimiterPair:
    open: str
    close: str


@dataclass(frozen=True)
class ConditionalDirectives:
    """Directive markers for conditional-compilation regions."""

    if_: str
    ifdef: str
    ifndef: str
    else_: str
    elif_: str
    end: str

    def openers(self) -> dict[str, str]:
        return {self.if_: "if", self.ifdef: "ifdef", self.ifndef: "ifndef"}

    def switches(self) -> dict[str, str]:
        return {self.else_: "else", self.elif_: "elif"}

    def all_markers(self) -> list[str]:
        # longest first so "#ifdef" wins over its prefix "#if"
        markers = [self.if_, self.ifdef, self.ifndef, self.else_, self.elif_, self.end]
        return sorted(markers, key=len, reverse=True)


@dataclass(frozen=True)
class StructureGrammar:
    """Everything the block parser needs to know about one language."""

    name: str
    extensions: tuple[str, ...] = ()
    line_comments: tuple[str, ...] = ()
    block_comments: tuple[DelimiterPair, ...] = ()
    strings: tuple[StringSyntax, ...] = ()
    blocks: tuple[DelimiterPair, ...] = ()
    kinds: dict[str, BlockKind] = field(default_factory=dict)
    default_type: str = "int"
    conditionals: ConditionalDirectives | None = None

    def to_config(self) -> dict:
        """Serialize back to the grammar-file schema (round-trip stable)."""
        config = {
            "name": self.name,
            "extensions": list(self.extensions),
            "lineComments": list(self.line_comments),
            "blockComments": [[p.open, p.close] for p in self.block_comments],
            "strings": [
                {"open": s.open, "close": s.close, "escape": s.escape}
                for s in self.strings
            ],
            "blocks": [{"open": p.open, "close": p.close} for p in self.blocks],
            "kinds": {word: kind.value for word, kind in self.kinds.items()},
            "defaultType": self.default_type,
        }
        if self.conditionals is not None:
            c = self.conditionals
            config["conditionals"] = {
                "if": c.if_, "ifdef": c.ifdef, "ifndef": c.ifndef,
                "else": c.else_, "elif": c.elif_, "end": c.end,
            }
        return config


def classify_block_kind(
    grammar: StructureGrammar,
    introducing_token: str | None,
    after_paren_group: bool = False,
) -> BlockKind:
    """Classify a block from the identifier found just before its opener.

    ``after_paren_group`` is true when the opener was preceded by a balanced
    parenthesis group (the parser's backward scan skips it before taking the
    identifier); an unknown identifier in that position is a callable header.
    """
    if introducing_token is None:
        return BlockKind.GENERIC
    kind = grammar.kinds.get(introducing_token)
    if kind is not None:
        return kind
    if after_paren_group:
        return BlockKind.CALLABLE
    return BlockKind.GENERIC


class _Pairs(list):
    """Raw key/value pairs from the JSON parser, before dict conversion."""


def _plainify(node, path: str, diags: list[GrammarDiagnostic]):
    """Convert _Pairs trees to dicts, reporting duplicate keys with paths."""
    if isinstance(node, _Pairs):
        out = {}
        for key, value in node:
            sub = f"{path}/{key}" if path else str(key)
            if key in out:
                diags.append(GrammarDiagnostic(sub, f"duplicate keyword {key!r}"))
                continue
            out[key] = _plainify(value, sub, diags)
        return out
    if isinstance(node, list):
        return [_plainify(v, f"{path}/{i}", diags) for i, v in enumerate(node)]
    return node


def _is_word(value) -> bool:
    return (
        isinstance(value, str)
        and value != ""
        and not value[0].isdigit()
        and all(ch in _WORD for ch in value)
    )


def _take_str_list(doc: dict, key: str, diags: list[GrammarDiagnostic],
                   require_nonempty_items: bool = True) -> list[str]:
    raw = doc.get(key, [])
    if not isinstance(raw, list):
        diags.append(GrammarDiagnostic(key, "expected a list"))
        return []
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, str) or (require_nonempty_items and item == ""):
            diags.append(GrammarDiagnostic(f"{key}/{i}", "expected a non-empty string"))
            continue
        out.append(item)
    return out


def _take_pair_list(doc: dict, key: str, diags: list[GrammarDiagnostic],
                    as_object: bool) -> list[DelimiterPair]:
    """Pairs either as {"open","close"} objects or [open, close] arrays."""
    raw = doc.get(key, [])
    if not isinstance(raw, list):
        diags.append(GrammarDiagnostic(key, "expected a list"))
        return []
    out = []
    for i, item in enumerate(raw):
        if as_object:
            if not isinstance(item, dict):
                diags.append(GrammarDiagnostic(f"{key}/{i}", "expected an object"))
                continue
            open_m, close_m = item.get("open"), item.get("close")
            open_path, close_path = f"{key}/{i}/open", f"{key}/{i}/close"
        else:
            if not isinstance(item, list) or len(item) != 2:
                diags.append(GrammarDiagnostic(f"{key}/{i}", "expected an [open, close] pair"))
                continue
            open_m, close_m = item[0], item[1]
            open_path, close_path = f"{key}/{i}/0", f"{key}/{i}/1"
        ok = True
        if not isinstance(open_m, str) or open_m == "":
            diags.append(GrammarDiagnostic(open_path, "open marker must be a non-empty string"))
            ok = False
        if not isinstance(close_m, str) or close_m == "":
            diags.append(GrammarDiagnostic(close_path, "close marker must be a non-empty string"))
            ok = False
        if ok:
            out.append(DelimiterPair(open_m, close_m))
    return out


_CONDITIONAL_KEYS = ("if", "ifdef", "ifndef", "else", "elif", "end")


def parse_grammar(config_text: str) -> tuple[StructureGrammar | None, list[GrammarDiagnostic]]:
    """Parse and validate a grammar config document.

    Returns either a grammar and no error diagnostics, or no grammar and at
    least one error diagnostic; never both.
    """
    diags: list[GrammarDiagnostic] = []
    try:
        raw = json.loads(config_text, object_pairs_hook=_Pairs)
    except json.JSONDecodeError as exc:
        return None, [GrammarDiagnostic("", f"malformed document: {exc.msg} (line {exc.lineno})")]

    doc = _plainify(raw, "", diags)
    if not isinstance(doc, dict):
        return None, [GrammarDiagnostic("", "expected a JSON object at the top level")]

    for required in ("name", "blocks"):
        if required not in doc:
            diags.append(GrammarDiagnostic(required, "missing required field"))

    name = doc.get("name")
    if "name" in doc:
        if not isinstance(name, str) or not name or not all(ch in _WORD for ch in name):
            diags.append(GrammarDiagnostic("name", "name must be a lowercase word"))
            name = None

    extensions = _take_str_list(doc, "extensions", diags)
    for i, ext in enumerate(extensions):
        if not ext.startswith("."):
            diags.append(GrammarDiagnostic(f"extensions/{i}", "extension must begin with '.'"))

    line_comments = _take_str_list(doc, "lineComments", diags)
    block_comments = _take_pair_list(doc, "blockComments", diags, as_object=False)
    blocks = _take_pair_list(doc, "blocks", diags, as_object=True)

    strings: list[StringSyntax] = []
    raw_strings = doc.get("strings", [])
    if not isinstance(raw_strings, list):
        diags.append(GrammarDiagnostic("strings", "expected a list"))
        raw_strings = []
    for i, item in enumerate(raw_strings):
        if not isinstance(item, dict):
            diags.append(GrammarDiagnostic(f"strings/{i}", "expected an object"))
            continue
        open_m, close_m = item.get("open"), item.get("close")
        escape = item.get("escape", "")
        ok = True
        if not isinstance(open_m, str) or open_m == "":
            diags.append(GrammarDiagnostic(f"strings/{i}/open", "open marker must be a non-empty string"))
            ok = False
        if not isinstance(close_m, str) or close_m == "":
            diags.append(GrammarDiagnostic(f"strings/{i}/close", "close marker must be a non-empty string"))
            ok = False
        if not isinstance(escape, str) or len(escape) > 1:
            diags.append(GrammarDiagnostic(f"strings/{i}/escape", "escape must be one character or empty"))
            ok = False
        if ok:
            strings.append(StringSyntax(open_m, close_m, escape))

    kinds: dict[str, BlockKind] = {}
    raw_kinds = doc.get("kinds", {})
    if not isinstance(raw_kinds, dict):
        diags.append(GrammarDiagnostic("kinds", "expected an object"))
        raw_kinds = {}
    valid_kinds = {k.value for k in BlockKind}
    for word, kind_name in raw_kinds.items():
        if not _is_word(word):
            diags.append(GrammarDiagnostic(f"kinds/{word}", "keyword must be a word"))
            continue
        if kind_name not in valid_kinds:
            diags.append(GrammarDiagnostic(
                f"kinds/{word}",
                f"unknown kind {kind_name!r}; expected one of {sorted(valid_kinds)}"))
            continue
        kinds[word] = BlockKind(kind_name)

    default_type = doc.get("defaultType", "int")
    if not _is_word(default_type):
        diags.append(GrammarDiagnostic("defaultType", "expected a word"))
        default_type = "int"

    conditionals = None
    if "conditionals" in doc:
        raw_cond = doc["conditionals"]
        if not isinstance(raw_cond, dict):
            diags.append(GrammarDiagnostic("conditionals", "expected an object"))
        else:
            values = {}
            for key in _CONDITIONAL_KEYS:
                marker = raw_cond.get(key)
                if not isinstance(marker, str) or marker == "":
                    diags.append(GrammarDiagnostic(
                        f"conditionals/{key}", "missing or empty directive marker"))
                else:
                    values[key] = marker
            if len(values) == len(_CONDITIONAL_KEYS):
                conditionals = ConditionalDirectives(
                    if_=values["if"], ifdef=values["ifdef"], ifndef=values["ifndef"],
                    else_=values["else"], elif_=values["elif"], end=values["end"])

    errors = [d for d in diags if d.severity == "error"]
    if errors:
        return None, diags
    grammar = StructureGrammar(
        name=name,
        extensions=tuple(extensions),
        line_comments=tuple(line_comments),
        block_comments=tuple(block_comments),
        strings=tuple(strings),
        blocks=tuple(blocks),
        kinds=kinds,
        default_type=default_type,
        conditionals=conditionals,
    )
    return grammar, diags


def load_grammar(config_text: str) -> StructureGrammar:
    """Like :func:`parse_grammar`, raising :class:`GrammarError` on failure."""
    grammar, diags = parse_grammar(config_text)
    if grammar is None:
        raise GrammarError([d for d in diags if d.severity == "error"])
    return grammar


def load_grammar_file(path: str | Path) -> StructureGrammar:
    return load_grammar(Path(path).read_text(encoding="utf-8"))


def load_grammar_dir(path: str | Path) -> dict[str, StructureGrammar]:
    """Load every ``*.grammar.json`` in a directory, keyed by grammar name."""
    grammars = {}
    for file in sorted(Path(path).glob("*.grammar.json")):
        grammar = load_grammar_file(file)
        grammars[grammar.name] = grammar
    return grammars


def builtin_grammar_names() -> list[str]:
    pkg_files = resources.files(__package__) / "grammars"
    names = []
    for entry in pkg_files.iterdir():
        if entry.name.endswith(".grammar.json"):
            names.append(entry.name[: -len(".grammar.json")])
    return sorted(names)


def load_builtin(name: str) -> StructureGrammar:
    pkg_files = resources.files(__package__) / "grammars"
    entry = pkg_files / f"{name}.grammar.json"
    try:
        text = entry.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise UnknownGrammarError(
            f"no built-in grammar {name!r}; available: {', '.join(builtin_grammar_names())}")
    return load_grammar(text)


def builtin_grammars_path() -> Path:
    """Filesystem path of the packaged grammar directory."""
    return Path(str(resources.files(__package__) / "grammars"))


def find_by_extension(grammars: dict[str, StructureGrammar], filename: str) -> str | None:
    """Match a file name against grammar extensions; None if nothing matches."""
    lowered = filename.lower()
    for name, grammar in grammars.items():
        for ext in grammar.extensions:
            if lowered.endswith(ext.lower()):
                return name
    return None
