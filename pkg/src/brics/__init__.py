"""Block-structure analysis and rendering for brace-delimited languages.

The pipeline: a StructureGrammar describes a language's comments,
strings, delimiters and keywords; blockparse turns text into a nested
BlockTree; viewmodel converts trees into editor rectangles, overview
models and conditional-compilation activity; refactor implements
extract-to-method and folding; session keeps a versioned document whose
tree always equals a full reparse; cli and server expose all of it.
"""

from .blockparse import (BlockNode, BlockTree, CodeMask, ParseDiagnostic,
                         block_at, parse_blocks, scan_mask)
from .errors import (BoundaryError, BricsError, DirectiveExprError,
                     EncodingError, GeometryMismatchError, GrammarError,
                     MultiOutputError, NameTakenError, NoEnclosingMethodError,
                     RangeError, StaleEditError, UnknownBlockError,
                     UnknownGrammarError, UnknownSessionError)
from .grammar import (BlockKind, GrammarDiagnostic, StructureGrammar,
                      builtin_grammar_names, classify_block_kind,
                      find_by_extension, load_builtin, load_grammar,
                      load_grammar_dir, load_grammar_file, parse_grammar)
from .refactor import (DepSets, FoldSpan, RefactorResult, block_dependencies,
                       enclosing_method, extract_block, fold_spans)
from .render import render_ansi, render_svg
from .session import Document, Edit, Session, Snapshot, open_session, text_digest
from .source import SourceText
from .viewmodel import (DEFAULT_PALETTE, ActivityMap, BlockRect, OverviewModel,
                        OverviewRect, Palette, conditional_activity,
                        editor_rects, mark_errors, overview_model,
                        shade_for_depth)

__version__ = "0.1.0"

__all__ = [
    "BlockKind", "BlockNode", "BlockRect", "BlockTree", "BoundaryError",
    "BricsError", "CodeMask", "DEFAULT_PALETTE", "DepSets", "DirectiveExprError",
    "Document", "Edit", "EncodingError", "FoldSpan", "GeometryMismatchError",
    "GrammarDiagnostic", "GrammarError", "ActivityMap", "MultiOutputError",
    "NameTakenError", "NoEnclosingMethodError", "OverviewModel", "OverviewRect",
    "Palette", "ParseDiagnostic", "RangeError", "RefactorResult", "Session",
    "Snapshot", "SourceText", "StaleEditError", "StructureGrammar",
    "UnknownBlockError", "UnknownGrammarError", "UnknownSessionError",
    "block_at", "block_dependencies", "builtin_grammar_names",
    "classify_block_kind", "conditional_activity", "editor_rects",
    "enclosing_method", "extract_block", "find_by_extension", "fold_spans",
    "load_builtin",
    "load_grammar", "load_grammar_dir", "load_grammar_file", "mark_errors",
    "open_session", "overview_model", "parse_blocks", "parse_grammar",
    "render_ansi", "render_svg", "scan_mask", "shade_for_depth", "text_digest",
]
