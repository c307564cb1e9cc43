"""RDF term model: IRIs, typed literals, and their N-Triples text forms.

IRIs are plain strings. Literals carry a kind tag (text/integer/real) that
maps onto the XSD datatype used in serialization. Everything here must be
deterministic: statement identity and export goldens hash these forms.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Union

XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"
XSD_DOUBLE = "http://www.w3.org/2001/XMLSchema#double"

LiteralKind = str  # "text" | "integer" | "real"

_KINDS = ("text", "integer", "real")


@dataclass(frozen=True)
class Literal:
    """A typed RDF literal. ``value`` is str, int, or float per ``kind``."""

    value: Union[str, int, float]
    kind: LiteralKind = "text"

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown literal kind: {self.kind!r}")


Term = Union[str, Literal]  # str = IRI


def escape_literal(text: str) -> str:
    """Escape a literal body per N-Triples rules (quote, backslash, controls)."""
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append("\\u%04X" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


def unescape_literal(text: str) -> str:
    """Inverse of :func:`escape_literal`; raises ValueError on bad escapes."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise ValueError("dangling escape in literal")
        nxt = text[i + 1]
        simple = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f"}
        if nxt in simple:
            out.append(simple[nxt])
            i += 2
        elif nxt == "u":
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"bad escape \\{nxt} in literal")
    return "".join(out)


def format_real(value: float) -> str:
    """Shortest round-tripping decimal form of a float (repr semantics)."""
    return repr(float(value))


def term_to_ntriples(term: Term) -> str:
    """Serialize an IRI or Literal to its N-Triples token."""
    if isinstance(term, str):
        return f"<{term}>"
    if term.kind == "text":
        return f'"{escape_literal(str(term.value))}"'
    if term.kind == "integer":
        return f'"{int(term.value)}"^^<{XSD_INTEGER}>'
    return f'"{format_real(float(term.value))}"^^<{XSD_DOUBLE}>'


def term_key(term: Term) -> tuple:
    """Hashable, order-stable key for a term (used by graph indexes)."""
    if isinstance(term, str):
        return ("iri", term)
    return ("lit", term.kind, str(term.value))


def statement_id(subject: str, predicate: str, obj: Term) -> str:
    """Content-addressed statement identity: a pure function of (s, p, o)."""
    payload = "\n".join(
        (term_to_ntriples(subject), term_to_ntriples(predicate), term_to_ntriples(obj))
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:32]
