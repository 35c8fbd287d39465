"""Core RDF data model: Unicode-correct IRIs, terms, triples and graphs.

IRIs are kept in a single canonical *decoded* form everywhere inside the
system: percent-escapes that stand for unreserved ASCII or for non-ASCII
UTF-8 sequences are decoded at parse time, while escapes of reserved
delimiters (``%2F``, ``%23``, ...) and of characters that are illegal raw
in an IRI (``%20``, ``%3C``, ...) are preserved.  Encoding back to pure
ASCII happens only at protocol boundaries via :func:`iri_to_ascii`.

All text is Unicode from edge to edge; there is no intermediate
single-byte-encoding stage anywhere in this package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

_SCHEME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9+.\-]*):(.*)$", re.DOTALL)
_HEX = "0123456789ABCDEFabcdef"

_UNRESERVED = set(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)
_RESERVED = set(":/?#[]@!$&'()*+,;=")
# Characters allowed raw in a canonical IRI.  '%' only ever appears as the
# start of a preserved escape sequence.
_LEGAL_ASCII = _UNRESERVED | _RESERVED | {"%"}


class InvalidIriError(ValueError):
    """Raised when text cannot be parsed as an absolute IRI."""


@dataclass(frozen=True, order=True)
class Iri:
    """An absolute IRI in canonical decoded form."""

    value: str

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """An RDF literal: lexical form plus optional language tag or datatype.

    A language tag and an explicit datatype are mutually exclusive; the
    tag is stored lowercased.
    """

    lexical: str
    lang: Optional[str] = None
    datatype: Optional[Iri] = None

    def __post_init__(self) -> None:
        if self.lang is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")
        if self.lang is not None:
            object.__setattr__(self, "lang", self.lang.lower())


@dataclass(frozen=True)
class BlankNodeId:
    """A blank node label, unique within one graph."""

    label: str

    def __post_init__(self) -> None:
        if not self.label or not all(c.isascii() and (c.isalnum() or c == "_") for c in self.label):
            raise ValueError(f"blank node label must be an ASCII identifier: {self.label!r}")


Term = Union[Iri, BlankNodeId, Literal]
SubjectTerm = Union[Iri, BlankNodeId]


@dataclass(frozen=True)
class Triple:
    subject: SubjectTerm
    predicate: Iri
    object: Term


def _decode_escape_run(run: str) -> str:
    """Decode one maximal run of %HH escapes into canonical form.

    Bytes below 0x80 come back as raw characters when unreserved, and as
    uppercase %HH otherwise.  Bytes >= 0x80 must form valid UTF-8 and are
    decoded to their Unicode characters.
    """
    data = bytes(int(run[i + 1 : i + 3], 16) for i in range(0, len(run), 3))
    out: list[str] = []
    i = 0
    while i < len(data):
        b = data[i]
        if b < 0x80:
            ch = chr(b)
            if ch in _UNRESERVED:
                out.append(ch)
            else:
                out.append(f"%{b:02X}")
            i += 1
        else:
            j = i
            while j < len(data) and data[j] >= 0x80:
                j += 1
            try:
                out.append(data[i:j].decode("utf-8"))
            except UnicodeDecodeError:
                raise InvalidIriError(
                    f"percent-escape sequence is not valid UTF-8: {run}"
                ) from None
            i = j
    return "".join(out)


def _canonicalize_escapes(text: str) -> str:
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "%":
            start = i
            while i < n and text[i] == "%":
                if i + 2 >= n or text[i + 1] not in _HEX or text[i + 2] not in _HEX:
                    raise InvalidIriError(f"malformed percent-escape at offset {i}: {text!r}")
                i += 3
            out.append(_decode_escape_run(text[start:i]))
        else:
            if ord(ch) < 0x80 and ch not in _LEGAL_ASCII:
                raise InvalidIriError(f"character {ch!r} is not allowed in an IRI: {text!r}")
            out.append(ch)
            i += 1
    return "".join(out)


def _lower_host(rest: str) -> str:
    """Lowercase the host inside '//authority...' (scheme already split off)."""
    if not rest.startswith("//"):
        return rest
    end = len(rest)
    for stop in "/?#":
        pos = rest.find(stop, 2)
        if pos != -1:
            end = min(end, pos)
    authority, tail = rest[2:end], rest[end:]
    userinfo = ""
    hostport = authority
    if "@" in authority:
        userinfo, hostport = authority.rsplit("@", 1)
        userinfo += "@"
    if hostport.startswith("["):  # IPv6 literal: lowercase is still correct
        close = hostport.find("]")
        host, port = hostport[: close + 1], hostport[close + 1 :]
    elif ":" in hostport:
        host, _, port = hostport.partition(":")
        port = ":" + port
    else:
        host, port = hostport, ""
    return "//" + userinfo + host.lower() + port + tail


def parse_iri(text: str) -> Iri:
    """Parse text as an absolute IRI, returning the canonical decoded form.

    Percent-escapes of UTF-8 byte sequences are decoded to their Unicode
    characters and escapes of unreserved ASCII are removed; escapes of
    reserved delimiters and of characters illegal raw in an IRI are kept
    (with uppercase hex digits).  Scheme and host are lowercased.
    """
    if not text:
        raise InvalidIriError("empty IRI")
    canon = _canonicalize_escapes(text)
    m = _SCHEME_RE.match(canon)
    if m is None:
        raise InvalidIriError(f"missing or malformed scheme: {text!r}")
    scheme, rest = m.group(1).lower(), m.group(2)
    return Iri(scheme + ":" + _lower_host(rest))


def iri_to_ascii(iri: Iri) -> str:
    """Percent-encoded pure-ASCII form of an IRI, for HTTP request lines.

    Inverse of :func:`parse_iri` up to canonicalization:
    ``parse_iri(iri_to_ascii(x)) == x`` for every canonical ``x``.
    """
    out: list[str] = []
    for ch in iri.value:
        if ord(ch) < 0x80:
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
    return "".join(out)


def split_hash(iri: Iri) -> tuple[Iri, Optional[str]]:
    """Split a hash URI at the first '#' into (base, fragment).

    Returns ``(iri, None)`` when there is no '#'; an empty fragment
    ("x#") is preserved as ``""``, distinct from no fragment.
    """
    pos = iri.value.find("#")
    if pos == -1:
        return iri, None
    return Iri(iri.value[:pos]), iri.value[pos + 1 :]


# --- N-Triples term rendering -------------------------------------------
#
# Used both by the N-Triples serializer and as the canonical sort key that
# gives graphs their deterministic iteration order.

_LITERAL_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def escape_literal_text(text: str) -> str:
    out: list[str] = []
    for ch in text:
        esc = _LITERAL_ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def unescape_literal_text(text: str) -> str:
    """Inverse of :func:`escape_literal_text` (shared with the Turtle lexer)."""
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        kind = text[i + 1]
        if kind == "u":
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif kind == "U":
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            out.append({"n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f"}.get(kind, kind))
            i += 2
    return "".join(out)


def term_to_ntriples(term: Term) -> str:
    if isinstance(term, Iri):
        return "<" + iri_to_ascii(term) + ">"
    if isinstance(term, BlankNodeId):
        return "_:" + term.label
    if isinstance(term, Literal):
        body = '"' + escape_literal_text(term.lexical) + '"'
        if term.lang is not None:
            return body + "@" + term.lang
        if term.datatype is not None:
            return body + "^^<" + iri_to_ascii(term.datatype) + ">"
        return body
    raise TypeError(f"not an RDF term: {term!r}")


def triple_to_ntriples(triple: Triple) -> str:
    return (
        term_to_ntriples(triple.subject)
        + " "
        + term_to_ntriples(triple.predicate)
        + " "
        + term_to_ntriples(triple.object)
        + " ."
    )


class Graph:
    """A set of triples with deterministic, lexicographic iteration order.

    Duplicate insertion is a no-op.  Built single-threaded, then safe to
    share read-only across request handlers.
    """

    def __init__(self, triples: Iterable[Triple] = ()) -> None:
        self._triples: dict[Triple, None] = {}
        self._sorted: Optional[list[Triple]] = None
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> bool:
        """Insert a triple; returns False when it was already present."""
        if triple in self._triples:
            return False
        self._triples[triple] = None
        self._sorted = None
        return True

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        if self._sorted is None:
            self._sorted = sorted(self._triples, key=triple_to_ntriples)
        return iter(self._sorted)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples.keys() == other._triples.keys()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph({len(self)} triples)"

    def triples(
        self,
        subject: Optional[SubjectTerm] = None,
        predicate: Optional[Iri] = None,
        object: Optional[Term] = None,
    ) -> Iterator[Triple]:
        """Iterate matching triples (None matches anything), in graph order."""
        for t in self:
            if subject is not None and t.subject != subject:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            if object is not None and t.object != object:
                continue
            yield t

    def subjects(self) -> Iterator[SubjectTerm]:
        seen: set[SubjectTerm] = set()
        for t in self:
            if t.subject not in seen:
                seen.add(t.subject)
                yield t.subject

    def predicates(self, subject: Optional[SubjectTerm] = None) -> Iterator[Iri]:
        seen: set[Iri] = set()
        for t in self.triples(subject=subject):
            if t.predicate not in seen:
                seen.add(t.predicate)
                yield t.predicate

    def objects(self, subject: Optional[SubjectTerm] = None, predicate: Optional[Iri] = None) -> Iterator[Term]:
        for t in self.triples(subject=subject, predicate=predicate):
            yield t.object


def union(*graphs: Graph) -> Graph:
    out = Graph()
    for g in graphs:
        for t in g:
            out.add(t)
    return out


def _blank_nodes(graph: Graph) -> set[BlankNodeId]:
    nodes: set[BlankNodeId] = set()
    for t in graph:
        if isinstance(t.subject, BlankNodeId):
            nodes.add(t.subject)
        if isinstance(t.object, BlankNodeId):
            nodes.add(t.object)
    return nodes


def _bnode_signature(graph: Graph, node: BlankNodeId) -> tuple:
    """Mapping-invariant fingerprint of a blank node's surroundings."""
    sig: list[tuple] = []
    for t in graph:
        s = t.subject == node
        o = t.object == node
        if not s and not o:
            continue
        other_s = "*" if isinstance(t.subject, BlankNodeId) else term_to_ntriples(t.subject)
        other_o = "*" if isinstance(t.object, BlankNodeId) else term_to_ntriples(t.object)
        sig.append((s, o, term_to_ntriples(t.predicate), other_s, other_o))
    return tuple(sorted(sig))


def isomorphic(a: Graph, b: Graph) -> bool:
    """Graph equality up to blank-node relabeling.

    Brute-force bijection search with signature pruning; intended for
    graphs with at most ~20 blank nodes (test and fixture scale).
    """
    if len(a) != len(b):
        return False
    a_nodes = sorted(_blank_nodes(a), key=lambda n: n.label)
    b_nodes = sorted(_blank_nodes(b), key=lambda n: n.label)
    if len(a_nodes) != len(b_nodes):
        return False

    ground_a = {t for t in a if not isinstance(t.subject, BlankNodeId) and not isinstance(t.object, BlankNodeId)}
    ground_b = {t for t in b if not isinstance(t.subject, BlankNodeId) and not isinstance(t.object, BlankNodeId)}
    if ground_a != ground_b:
        return False
    if not a_nodes:
        return True

    sig_a = {n: _bnode_signature(a, n) for n in a_nodes}
    sig_b = {n: _bnode_signature(b, n) for n in b_nodes}
    candidates = {n: [m for m in b_nodes if sig_b[m] == sig_a[n]] for n in a_nodes}
    if any(not c for c in candidates.values()):
        return False

    b_set = set(b._triples)

    def apply(term: Term, mapping: dict[BlankNodeId, BlankNodeId]) -> Term:
        return mapping.get(term, term) if isinstance(term, BlankNodeId) else term

    def check(mapping: dict[BlankNodeId, BlankNodeId]) -> bool:
        for t in a:
            mapped = Triple(apply(t.subject, mapping), t.predicate, apply(t.object, mapping))  # type: ignore[arg-type]
            if mapped not in b_set:
                return False
        return True

    order = sorted(a_nodes, key=lambda n: len(candidates[n]))

    def backtrack(idx: int, mapping: dict[BlankNodeId, BlankNodeId], used: set[BlankNodeId]) -> bool:
        if idx == len(order):
            return check(mapping)
        node = order[idx]
        for cand in candidates[node]:
            if cand in used:
                continue
            mapping[node] = cand
            used.add(cand)
            if backtrack(idx + 1, mapping, used):
                return True
            del mapping[node]
            used.discard(cand)
        return False

    return backtrack(0, {}, set())


RDF_TYPE = Iri(RDF_NS + "type")
RDF_FIRST = Iri(RDF_NS + "first")
RDF_REST = Iri(RDF_NS + "rest")
RDF_NIL = Iri(RDF_NS + "nil")
XSD_STRING = Iri(XSD_NS + "string")
