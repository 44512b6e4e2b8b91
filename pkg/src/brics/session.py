"""Versioned document sessions.

The synchronization contract: after every accepted edit the snapshot's
tree equals a full reparse of the new text. There is no incremental
state to drift — each edit splices bytes and reparses the whole text,
which at interactive file sizes is well inside editing latency.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .blockparse import BlockTree, ParseDiagnostic, parse_blocks
from .errors import BoundaryError, EncodingError, RangeError, StaleEditError
from .grammar import StructureGrammar, load_builtin
from .source import SourceText


@dataclass(frozen=True)
class Document:
    text: str
    version: int
    grammar_name: str


@dataclass(frozen=True)
class Edit:
    """Byte-range splice computed against base_version.

    Offsets are UTF-8 byte positions and must land on character
    boundaries.
    """

    start_byte: int
    end_byte: int
    replacement: str
    base_version: int


@dataclass(frozen=True)
class Snapshot:
    version: int
    tree: BlockTree
    diagnostics: tuple[ParseDiagnostic, ...]
    digest: str


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _decode(text: Union[str, bytes]) -> str:
    if isinstance(text, str):
        return text
    try:
        return text.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"document is not valid UTF-8: {exc}") from exc


def _is_boundary(data: bytes, offset: int) -> bool:
    if offset == len(data):
        return True
    return not 0x80 <= data[offset] <= 0xBF


class Session:
    """One open document plus its current snapshot.

    Edits are serialized by an internal lock; subscribers are invoked
    synchronously, in version order, before apply_edit returns, and
    must not call back into the session.
    """

    def __init__(self, text: Union[str, bytes], grammar: Union[StructureGrammar, str]):
        if isinstance(grammar, str):
            grammar = load_builtin(grammar)
        self.grammar = grammar
        self._lock = threading.Lock()
        self._subscribers: list[Callable[[Snapshot], None]] = []
        self._document, self._snapshot = self._build(_decode(text), 0)

    def _build(self, text: str, version: int) -> tuple[Document, Snapshot]:
        tree, diags = parse_blocks(SourceText.from_text(text), self.grammar)
        doc = Document(text, version, self.grammar.name)
        return doc, Snapshot(version, tree, tuple(diags), text_digest(text))

    @property
    def document(self) -> Document:
        return self._document

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    @property
    def source(self) -> SourceText:
        return SourceText.from_text(self._document.text)

    def subscribe(self, callback: Callable[[Snapshot], None]) -> Callable[[], None]:
        """Register a snapshot listener; returns an unsubscribe function."""
        with self._lock:
            self._subscribers.append(callback)

        def unsubscribe() -> None:
            with self._lock:
                if callback in self._subscribers:
                    self._subscribers.remove(callback)
        return unsubscribe

    def apply_edit(self, edit: Edit) -> Snapshot:
        """Splice, reparse, bump the version, publish, return.

        E_STALE when edit.base_version is not the current version;
        E_RANGE for out-of-bounds offsets; E_BOUNDARY for offsets that
        split a multi-byte character. Rejected edits change nothing.
        """
        with self._lock:
            doc = self._document
            if edit.base_version != doc.version:
                raise StaleEditError(
                    f"edit based on version {edit.base_version}, "
                    f"document is at {doc.version}")
            data = doc.text.encode("utf-8")
            if not 0 <= edit.start_byte <= edit.end_byte <= len(data):
                raise RangeError(
                    f"edit range [{edit.start_byte},{edit.end_byte}) outside "
                    f"document of {len(data)} bytes")
            for offset in (edit.start_byte, edit.end_byte):
                if not _is_boundary(data, offset):
                    raise BoundaryError(
                        f"byte offset {offset} splits a character")
            spliced = (data[:edit.start_byte]
                       + edit.replacement.encode("utf-8")
                       + data[edit.end_byte:])
            self._document, self._snapshot = self._build(
                spliced.decode("utf-8"), doc.version + 1)
            snapshot = self._snapshot
            for callback in list(self._subscribers):
                callback(snapshot)
            return snapshot

    def replace_text(self, text: str, base_version: int) -> Snapshot:
        """Whole-document edit; convenience over apply_edit."""
        data = self._document.text.encode("utf-8")
        return self.apply_edit(Edit(0, len(data), text, base_version))


def open_session(text: Union[str, bytes],
                 grammar: Union[StructureGrammar, str]) -> Session:
    """Open a document at version 0; E_ENCODING on invalid UTF-8 bytes,
    E_UNKNOWN_GRAMMAR for an unknown grammar name."""
    return Session(text, grammar)
