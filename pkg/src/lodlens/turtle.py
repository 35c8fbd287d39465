"""Turtle and N-Triples input/output.

The Turtle serializer writes IRIs in their decoded Unicode form (Cyrillic
and other non-ASCII characters appear literally, never as %-escapes) and
literals as raw UTF-8 with only the mandatory escapes.  N-Triples output
sticks to the percent-encoded ASCII form of each IRI.

The parser covers the subset needed for fixture files and round-tripping:
prefix/base directives (both @-style and SPARQL-style), prefixed names
with non-ASCII local parts, string literals with language tags and
datatypes, numbers, booleans, blank node property lists, labeled blank
nodes and collections.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional
from urllib.parse import urljoin

from lodlens.model import (
    RDF_FIRST,
    RDF_NIL,
    RDF_NS,
    RDF_REST,
    RDF_TYPE,
    XSD_NS,
    XSD_STRING,
    BlankNodeId,
    Graph,
    InvalidIriError,
    Iri,
    Literal,
    Term,
    Triple,
    escape_literal_text,
    iri_to_ascii,
    parse_iri,
    term_to_ntriples,
    triple_to_ntriples,
)

# prefix label -> namespace; insertion order is the declaration order
PrefixMap = dict[str, Iri]

DEFAULT_PREFIXES: PrefixMap = {
    "rdf": Iri(RDF_NS),
    "rdfs": Iri("http://www.w3.org/2000/01/rdf-schema#"),
    "xsd": Iri(XSD_NS),
}


@dataclass(frozen=True)
class SerializeOptions:
    decode_iris: bool = True
    emit_prefixes: bool = True
    base: Optional[Iri] = None


class TurtleParseError(ValueError):
    """Syntax error with 1-based line and column of the offending input."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnresolvedRelativeIriError(TurtleParseError):
    """A relative IRI reference appeared but no base was in effect."""


_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANG_RE = re.compile(r"[A-Za-z]+(?:-[A-Za-z0-9]+)*")
_DOUBLE_RE = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)[eE][+-]?\d+")
_DECIMAL_RE = re.compile(r"[+-]?\d*\.\d+")
_INTEGER_RE = re.compile(r"[+-]?\d+")
_PN_LOCAL_ESCAPABLE = set("_~.-!$&'()*+,;=/?#@%")

XSD_INTEGER = Iri(XSD_NS + "integer")
XSD_DECIMAL = Iri(XSD_NS + "decimal")
XSD_DOUBLE = Iri(XSD_NS + "double")
XSD_BOOLEAN = Iri(XSD_NS + "boolean")

# characters that may never appear raw inside <...>
_IRIREF_FORBIDDEN = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}


class _Parser:
    def __init__(self, text: str, base: Optional[Iri]) -> None:
        self.text = text
        self.pos = 0
        self.base = base
        self.prefixes: dict[str, Iri] = {}
        self.graph = Graph()
        self.doc_labels: dict[str, BlankNodeId] = {}
        self.bnode_counter = 0

    # -- position bookkeeping ------------------------------------------

    def _line_col(self, pos: Optional[int] = None) -> tuple[int, int]:
        p = self.pos if pos is None else pos
        line = self.text.count("\n", 0, p) + 1
        col = p - (self.text.rfind("\n", 0, p) + 1) + 1
        return line, col

    def error(self, message: str, pos: Optional[int] = None) -> TurtleParseError:
        line, col = self._line_col(pos)
        return TurtleParseError(message, line, col)

    # -- low-level scanning --------------------------------------------

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self.pos += 1
            elif ch == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl == -1 else nl + 1
            else:
                return

    def peek(self, offset: int = 0) -> str:
        p = self.pos + offset
        return self.text[p] if p < len(self.text) else ""

    def startswith(self, token: str) -> bool:
        return self.text.startswith(token, self.pos)

    def expect(self, token: str) -> None:
        if not self.startswith(token):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def at_keyword(self, word: str) -> bool:
        """Case-insensitive match of a bare keyword, not a name prefix."""
        end = self.pos + len(word)
        if self.text[self.pos : end].lower() != word.lower():
            return False
        nxt = self.text[end : end + 1]
        return not (nxt.isalnum() or nxt in "_-")

    # -- document structure --------------------------------------------

    def parse_document(self) -> Graph:
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                return self.graph
            if self.startswith("@prefix") or self.startswith("@base"):
                self.parse_at_directive()
            elif self.at_keyword("prefix") or self.at_keyword("base"):
                self.parse_sparql_directive()
            else:
                self.parse_triples()
                self.skip_ws()
                self.expect(".")

    def parse_at_directive(self) -> None:
        if self.startswith("@prefix"):
            self.pos += len("@prefix")
            self.skip_ws()
            label = self.read_prefix_label()
            self.skip_ws()
            self.prefixes[label] = self.read_iriref()
        else:
            self.pos += len("@base")
            self.skip_ws()
            self.base = self.read_iriref()
        self.skip_ws()
        self.expect(".")

    def parse_sparql_directive(self) -> None:
        if self.at_keyword("prefix"):
            self.pos += len("prefix")
            self.skip_ws()
            label = self.read_prefix_label()
            self.skip_ws()
            self.prefixes[label] = self.read_iriref()
        else:
            self.pos += len("base")
            self.skip_ws()
            self.base = self.read_iriref()
        # SPARQL-style directives take no trailing dot

    def parse_triples(self) -> None:
        if self.peek() == "[":
            subject = self.parse_bnode_props()
            self.skip_ws()
            if self.peek() not in ".":  # [ ... ] may stand alone as a statement
                self.parse_predicate_objects(subject)
        else:
            subject = self.parse_subject()
            self.parse_predicate_objects(subject)

    def parse_subject(self):
        ch = self.peek()
        if ch == "<":
            return self.read_iriref()
        if ch == "(":
            return self.parse_collection()
        if self.startswith("_:"):
            return self.read_blank_label()
        return self.read_pname()

    def parse_predicate_objects(self, subject) -> None:
        while True:
            self.skip_ws()
            predicate = self.parse_verb()
            while True:
                self.skip_ws()
                obj = self.parse_object()
                self.graph.add(Triple(subject, predicate, obj))
                self.skip_ws()
                if self.peek() == ",":
                    self.pos += 1
                    continue
                break
            if self.peek() == ";":
                self.pos += 1
                self.skip_ws()
                if self.peek() in ".]" or self.peek() == "":  # trailing ';'
                    return
                continue
            return

    def parse_verb(self) -> Iri:
        if self.at_keyword("a") and self.peek() == "a":
            self.pos += 1
            return RDF_TYPE
        if self.peek() == "<":
            return self.read_iriref()
        name = self.read_pname()
        return name

    def parse_object(self) -> Term:
        ch = self.peek()
        if ch == "<":
            return self.read_iriref()
        if ch == "(":
            return self.parse_collection()
        if ch == "[":
            return self.parse_bnode_props()
        if ch in "\"'":
            return self.read_string_literal()
        if self.startswith("_:"):
            return self.read_blank_label()
        if ch.isdigit() or (ch in "+-." and (self.peek(1).isdigit() or self.peek(1) == ".")):
            return self.read_number()
        if self.at_keyword("true"):
            self.pos += 4
            return Literal("true", datatype=XSD_BOOLEAN)
        if self.at_keyword("false"):
            self.pos += 5
            return Literal("false", datatype=XSD_BOOLEAN)
        return self.read_pname()

    # -- node constructors ----------------------------------------------

    def fresh_bnode(self) -> BlankNodeId:
        self.bnode_counter += 1
        return BlankNodeId(f"b{self.bnode_counter}")

    def read_blank_label(self) -> BlankNodeId:
        self.expect("_:")
        start = self.pos
        while self.pos < len(self.text) and (self.peek().isalnum() or self.peek() in "_-."):
            self.pos += 1
        label = self.text[start : self.pos]
        while label.endswith("."):
            label = label[:-1]
            self.pos -= 1
        if not label:
            raise self.error("empty blank node label")
        if label not in self.doc_labels:
            self.doc_labels[label] = self.fresh_bnode()
        return self.doc_labels[label]

    def parse_bnode_props(self) -> BlankNodeId:
        self.expect("[")
        node = self.fresh_bnode()
        self.skip_ws()
        if self.peek() == "]":
            self.pos += 1
            return node
        self.parse_predicate_objects(node)
        self.skip_ws()
        self.expect("]")
        return node

    def parse_collection(self) -> Term:
        self.expect("(")
        items: list[Term] = []
        while True:
            self.skip_ws()
            if self.peek() == ")":
                self.pos += 1
                break
            if self.pos >= len(self.text):
                raise self.error("unterminated collection")
            items.append(self.parse_object())
        if not items:
            return RDF_NIL
        head = self.fresh_bnode()
        node = head
        for i, item in enumerate(items):
            self.graph.add(Triple(node, RDF_FIRST, item))
            if i + 1 < len(items):
                nxt = self.fresh_bnode()
                self.graph.add(Triple(node, RDF_REST, nxt))
                node = nxt
            else:
                self.graph.add(Triple(node, RDF_REST, RDF_NIL))
        return head

    # -- terminals -------------------------------------------------------

    def read_iriref(self) -> Iri:
        start = self.pos
        self.expect("<")
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated IRI reference", start)
            ch = self.text[self.pos]
            if ch == ">":
                self.pos += 1
                break
            if ch == "\\":
                kind = self.peek(1)
                if kind == "u":
                    out.append(chr(int(self.text[self.pos + 2 : self.pos + 6], 16)))
                    self.pos += 6
                elif kind == "U":
                    out.append(chr(int(self.text[self.pos + 2 : self.pos + 10], 16)))
                    self.pos += 10
                else:
                    raise self.error(f"illegal escape \\{kind} in IRI reference")
                continue
            if ch in _IRIREF_FORBIDDEN:
                raise self.error(f"character {ch!r} must be escaped in IRI references")
            out.append(ch)
            self.pos += 1
        return self.resolve("".join(out), start)

    def resolve(self, ref: str, at: int) -> Iri:
        try:
            if _SCHEME_RE.match(ref):
                return parse_iri(ref)
            if self.base is None:
                line, col = self._line_col(at)
                raise UnresolvedRelativeIriError(
                    f"relative IRI <{ref}> with no base in effect", line, col
                )
            return parse_iri(urljoin(self.base.value, ref))
        except InvalidIriError as exc:
            raise self.error(str(exc), at) from exc

    def read_prefix_label(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.peek() != ":":
            if self.peek() in " \t\r\n<":
                raise self.error("expected prefix label ending in ':'", start)
            self.pos += 1
        label = self.text[start : self.pos]
        self.expect(":")
        return label

    def read_pname(self) -> Iri:
        start = self.pos
        while self.pos < len(self.text) and self.peek() != ":":
            ch = self.peek()
            if not (ch.isalnum() or ch in "_-."):
                break
            self.pos += 1
        if self.peek() != ":":
            raise self.error("expected an IRI, prefixed name or literal", start)
        prefix = self.text[start : self.pos]
        self.pos += 1
        if prefix not in self.prefixes:
            raise self.error(f"undeclared prefix {prefix!r}:", start)
        local: list[str] = []
        trailing_dots = 0
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == "\\" and self.peek(1) in _PN_LOCAL_ESCAPABLE:
                local.append(self.peek(1))
                self.pos += 2
                trailing_dots = 0
            elif ch == "%" and self.peek(1) and self.peek(2):
                local.append(self.text[self.pos : self.pos + 3])
                self.pos += 3
                trailing_dots = 0
            elif ch.isalnum() or ch in "_-:" or ch == ".":
                local.append(ch)
                self.pos += 1
                trailing_dots = trailing_dots + 1 if ch == "." else 0
            else:
                break
        # a final '.' belongs to the statement, not the name
        for _ in range(trailing_dots):
            local.pop()
            self.pos -= 1
        return self.resolve(self.prefixes[prefix].value + "".join(local), start)

    def read_string_literal(self) -> Literal:
        start = self.pos
        quote = self.peek()
        long_form = self.startswith(quote * 3)
        terminator = quote * 3 if long_form else quote
        self.pos += len(terminator)
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string literal", start)
            if self.startswith(terminator):
                if long_form:
                    # quotes butting against the closing """ belong to the text
                    run = self.pos
                    while self.text.startswith(quote, run):
                        run += 1
                    extra = (run - self.pos) - 3
                    out.append(quote * extra)
                    self.pos = run
                else:
                    self.pos += 1
                break
            ch = self.peek()
            if ch == "\\":
                kind = self.peek(1)
                if kind == "u":
                    out.append(chr(int(self.text[self.pos + 2 : self.pos + 6], 16)))
                    self.pos += 6
                elif kind == "U":
                    out.append(chr(int(self.text[self.pos + 2 : self.pos + 10], 16)))
                    self.pos += 10
                elif kind in "tbnrf\"'\\":
                    out.append({"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f"}.get(kind, kind))
                    self.pos += 2
                else:
                    raise self.error(f"illegal string escape \\{kind}")
                continue
            if not long_form and ch in "\n\r":
                raise self.error("newline in single-line string literal", start)
            out.append(ch)
            self.pos += 1
        lexical = "".join(out)
        if self.peek() == "@":
            self.pos += 1
            m = _LANG_RE.match(self.text, self.pos)
            if m is None:
                raise self.error("malformed language tag")
            self.pos = m.end()
            return Literal(lexical, lang=m.group(0))
        if self.startswith("^^"):
            self.pos += 2
            self.skip_ws()
            dt = self.read_iriref() if self.peek() == "<" else self.read_pname()
            if dt == XSD_STRING:  # plain literal, by RDF 1.1 semantics
                return Literal(lexical)
            return Literal(lexical, datatype=dt)
        return Literal(lexical)

    def read_number(self) -> Literal:
        for pattern, dtype in ((_DOUBLE_RE, XSD_DOUBLE), (_DECIMAL_RE, XSD_DECIMAL), (_INTEGER_RE, XSD_INTEGER)):
            m = pattern.match(self.text, self.pos)
            if m:
                self.pos = m.end()
                return Literal(m.group(0), datatype=dtype)
        raise self.error("malformed numeric literal")


def parse_turtle(text: str, base: Optional[Iri] = None) -> Graph:
    """Parse a Turtle document into a Graph.

    Relative IRI references resolve against ``base`` (or a ``@base``
    directive).  Blank node labels are reallocated but stay consistent
    within the document.
    """
    return _Parser(text, base).parse_document()


# --- serialization --------------------------------------------------------


def _local_part_fits(local: str) -> bool:
    if local.endswith(".") or local.startswith("."):
        return False
    return all(ch.isalnum() or ch in "_-." or ord(ch) >= 0x80 for ch in local) and "%" not in local


def _abbreviate(iri: Iri, prefixes: PrefixMap) -> Optional[str]:
    best: Optional[tuple[int, str]] = None
    for label, ns in prefixes.items():
        if iri.value.startswith(ns.value):
            local = iri.value[len(ns.value) :]
            if _local_part_fits(local) and (best is None or len(ns.value) > best[0]):
                best = (len(ns.value), f"{label}:{local}")
    return best[1] if best else None


def _iri_text(iri: Iri, prefixes: PrefixMap, opts: SerializeOptions) -> str:
    if not opts.decode_iris:
        return "<" + iri_to_ascii(iri) + ">"
    if iri == RDF_TYPE:
        return "a"
    abbreviated = _abbreviate(iri, prefixes)
    if abbreviated is not None:
        return abbreviated
    if opts.base is not None:
        if iri == opts.base:
            return "<>"
        if iri.value.startswith(opts.base.value + "#"):
            return "<#" + iri.value[len(opts.base.value) + 1 :] + ">"
    return "<" + iri.value + ">"


def _term_text(term: Term, prefixes: PrefixMap, opts: SerializeOptions) -> str:
    if isinstance(term, Iri):
        return _iri_text(term, prefixes, opts)
    if isinstance(term, BlankNodeId):
        return "_:" + term.label
    body = '"' + escape_literal_text(term.lexical) + '"'
    if term.lang is not None:
        return body + "@" + term.lang
    if term.datatype is not None:
        return body + "^^" + _iri_text(term.datatype, prefixes, opts)
    return body


def _term_sort_key(term: Term) -> str:
    return term_to_ntriples(term)


def serialize_turtle(
    graph: Graph,
    prefixes: Optional[PrefixMap] = None,
    opts: Optional[SerializeOptions] = None,
) -> str:
    """Serialize a graph as Turtle with deterministic byte output.

    Triples are grouped by subject; rdf:type renders first within each
    group as 'a'.  With decode_iris on (the default) IRIs appear in
    decoded Unicode form.
    """
    prefixes = prefixes if prefixes is not None else {}
    opts = opts if opts is not None else SerializeOptions()
    lines: list[str] = []
    if opts.emit_prefixes:
        for label, ns in prefixes.items():
            ns_text = ns.value if opts.decode_iris else iri_to_ascii(ns)
            lines.append(f"@prefix {label}: <{ns_text}> .")
        if opts.base is not None:
            base_text = opts.base.value if opts.decode_iris else iri_to_ascii(opts.base)
            lines.append(f"@base <{base_text}> .")
        if prefixes or opts.base is not None:
            lines.append("")

    by_subject: dict = {}
    for t in graph:
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)

    for subject in sorted(by_subject, key=_term_sort_key):
        preds = by_subject[subject]
        ordered = sorted(preds, key=lambda p: (p != RDF_TYPE, _term_sort_key(p)))
        subject_text = _term_text(subject, prefixes, opts)
        for i, pred in enumerate(ordered):
            objects = sorted(preds[pred], key=_term_sort_key)
            objects_text = ", ".join(_term_text(o, prefixes, opts) for o in objects)
            lead = subject_text if i == 0 else "   "
            tail = " ;" if i + 1 < len(ordered) else " ."
            lines.append(f"{lead} {_term_text(pred, prefixes, opts)} {objects_text}{tail}")
        lines.append("")
    text = "\n".join(lines)
    return text if text.endswith("\n") or not text else text + "\n"


def serialize_ntriples(graph: Graph) -> str:
    """One sorted triple per line, all IRIs in percent-encoded ASCII form."""
    return "".join(triple_to_ntriples(t) + "\n" for t in graph)
