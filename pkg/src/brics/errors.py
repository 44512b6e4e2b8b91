"""Error types shared across the package.

Every error carries a stable machine code so the CLI and the HTTP service
can map failures without string matching.
"""

from __future__ import annotations


class BricsError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "E_INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class GrammarError(BricsError):
    """A grammar config failed validation; carries the diagnostics."""

    code = "E_GRAMMAR"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else "invalid grammar"
        super().__init__(first)


class RangeError(BricsError):
    code = "E_RANGE"


class BoundaryError(BricsError):
    code = "E_BOUNDARY"


class StaleEditError(BricsError):
    code = "E_STALE"


class EncodingError(BricsError):
    code = "E_ENCODING"


class UnknownGrammarError(BricsError):
    code = "E_UNKNOWN_GRAMMAR"


class GeometryMismatchError(BricsError):
    code = "E_MISMATCH"


class DirectiveExprError(BricsError):
    code = "E_EXPR"


class NoEnclosingMethodError(BricsError):
    code = "E_NO_METHOD"


class MultiOutputError(BricsError):
    code = "E_MULTI_OUTPUT"

    def __init__(self, outputs):
        self.outputs = list(outputs)
        super().__init__("block assigns %s outer variables read later: %s"
                         % (len(self.outputs), ", ".join(self.outputs)))


class NameTakenError(BricsError):
    code = "E_NAME_TAKEN"


class UnknownSessionError(BricsError):
    code = "E_UNKNOWN_SESSION"


class UnknownBlockError(BricsError):
    code = "E_UNKNOWN_BLOCK"
