"""Dataset access: an in-memory store and a SPARQL-protocol client.

Both backends answer the same three questions behind one contract:

* ``fetch_description(resource, page_size)`` -- every triple about the
  resource and its hash siblings (same IRI up to the '#'), with object
  values capped per property, blank-node closures included, and exact
  totals recorded for anything truncated;
* ``fetch_property_page(...)`` -- one page of values for a single
  property under a stable total order;
* ``ask_exists(resource)`` -- whether the dataset mentions the resource
  at all.

Value ordering is fixed everywhere: literals before IRIs before blank
nodes, each group ordered lexicographically.  The remote client imposes
the same order in SPARQL (ORDER BY) so that pages never duplicate or
drop values between requests.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field
from typing import Literal as TypingLiteral
from typing import Optional

import requests

from lodlens.model import (
    RDF_NS,
    XSD_NS,
    BlankNodeId,
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
    iri_to_ascii,
    parse_iri,
)
from lodlens.turtle import parse_turtle

UNLIMITED = sys.maxsize

RDF_REST_IRI = RDF_NS + "rest"
XSD_STRING_IRI = XSD_NS + "string"
RDF_LANGSTRING_IRI = RDF_NS + "langString"

Direction = TypingLiteral["direct", "inverse"]


class StoreError(Exception):
    """Base class for dataset access failures."""


class EndpointUnreachable(StoreError):
    """Could not establish a connection to the endpoint."""


class EndpointTimeout(StoreError):
    """The endpoint did not answer within the configured timeout."""


class EndpointError(StoreError):
    """The endpoint answered, but not with a usable SPARQL response."""

    def __init__(self, status: int, message: str) -> None:
        super().__init__(f"endpoint returned {status}: {message}")
        self.status = status
        self.message = message


@dataclass(frozen=True)
class EndpointConfig:
    endpoint_url: Iri
    default_graph: Optional[Iri] = None
    request_timeout: float = 30.0
    max_retries: int = 2
    max_page_size: int = 1000

    def __post_init__(self) -> None:
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries cannot be negative")
        if self.max_page_size <= 0:
            raise ValueError("max_page_size must be positive")


@dataclass
class DescriptionBundle:
    """Everything fetched about one resource.

    direct holds triples whose subject is the resource or one of its
    hash siblings, plus the closures of any blank-node objects; inverse
    holds triples pointing at the resource.  truncation records the full
    value count per (subject, property) wherever the direct graph was
    capped; inverse_truncation does the same per property for inverse
    links.
    """

    direct: Graph = field(default_factory=Graph)
    inverse: Graph = field(default_factory=Graph)
    siblings: list[Iri] = field(default_factory=list)
    truncation: dict[tuple[Iri, Iri], int] = field(default_factory=dict)
    inverse_truncation: dict[Iri, int] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return len(self.direct) == 0 and len(self.inverse) == 0


def value_sort_key(term: Term) -> tuple[int, str, str, str]:
    """The stable total order for property values.

    Mirrors the ORDER BY expression the remote client sends, so both
    backends page identically: literals sort by lexical form, then
    language tag, then datatype; IRIs and blank nodes by their text.
    """
    if isinstance(term, Literal):
        if term.lang is not None:
            dt = RDF_LANGSTRING_IRI
        elif term.datatype is not None:
            dt = term.datatype.value
        else:
            dt = XSD_STRING_IRI
        return (0, term.lexical, term.lang or "", dt)
    if isinstance(term, Iri):
        return (1, term.value, "", "")
    return (2, term.label, "", "")


def _is_sibling_of(candidate: Iri, resource: Iri) -> bool:
    return candidate.value.startswith(resource.value + "#")


def _require_no_fragment(resource: Iri) -> None:
    if "#" in resource.value:
        raise ValueError(f"resource must be a hash-free base IRI: {resource.value}")


class Store:
    """Common contract of the in-memory store and the SPARQL client."""

    def fetch_description(
        self, resource: Iri, page_size: int, closure_depth: int = 3
    ) -> DescriptionBundle:
        raise NotImplementedError

    def fetch_property_page(
        self, resource: Iri, prop: Iri, direction: Direction, offset: int, limit: int
    ) -> tuple[list[Term], int]:
        raise NotImplementedError

    def ask_exists(self, resource: Iri) -> bool:
        raise NotImplementedError


class MemoryStore(Store):
    """Immutable in-memory dataset, loaded once from Turtle fixtures.

    Doubles as the behavioral reference for the SPARQL client: both must
    return equal bundles for the same data.
    """

    def __init__(self, graph: Graph, max_page_size: int = 1000) -> None:
        self._graph = graph
        self.max_page_size = max_page_size

    @classmethod
    def from_turtle(cls, text: str, base: Optional[Iri] = None, max_page_size: int = 1000) -> "MemoryStore":
        return cls(parse_turtle(text, base), max_page_size)

    def _subjects_for(self, resource: Iri) -> list:
        found = {resource} if any(True for _ in self._graph.triples(subject=resource)) else set()
        for s in self._graph.subjects():
            if isinstance(s, Iri) and _is_sibling_of(s, resource):
                found.add(s)
        return sorted(found, key=lambda i: i.value)

    def _closure_depth_limited(self, seeds: list[BlankNodeId], max_depth: int) -> Graph:
        """Triples of blank nodes reachable from seeds within max_depth hops.

        Following an rdf:rest link stays at the same depth, so whole
        collection chains always survive intact.
        """
        out = Graph()
        visited: set[BlankNodeId] = set()
        frontier = list(seeds)
        depth = 1
        while frontier and depth <= max_depth:
            nxt: list[BlankNodeId] = []
            while frontier:
                node = frontier.pop()
                if node in visited:
                    continue
                visited.add(node)
                for t in self._graph.triples(subject=node):
                    out.add(t)
                    if isinstance(t.object, BlankNodeId) and t.object not in visited:
                        if t.predicate.value == RDF_REST_IRI:
                            frontier.append(t.object)  # same depth: list chain
                        else:
                            nxt.append(t.object)
            frontier = nxt
            depth += 1
        return out

    def fetch_description(self, resource: Iri, page_size: int, closure_depth: int = 3) -> DescriptionBundle:
        _require_no_fragment(resource)
        bundle = DescriptionBundle()
        subjects = self._subjects_for(resource)
        bundle.siblings = [s for s in subjects if s != resource]
        bnode_seeds: list[BlankNodeId] = []
        for s in subjects:
            for p in self._graph.predicates(subject=s):
                values = sorted(self._graph.objects(s, p), key=value_sort_key)
                total = len(values)
                if total > page_size:
                    bundle.truncation[(s, p)] = total
                    values = values[:page_size]
                for v in values:
                    bundle.direct.add(Triple(s, p, v))
                    if isinstance(v, BlankNodeId):
                        bnode_seeds.append(v)
        for t in self._closure_depth_limited(bnode_seeds, closure_depth):
            bundle.direct.add(t)

        inverse_by_prop: dict[Iri, list] = {}
        for t in self._graph.triples(object=resource):
            inverse_by_prop.setdefault(t.predicate, []).append(t.subject)
        for p in sorted(inverse_by_prop, key=lambda i: i.value):
            subjects_in = sorted(set(inverse_by_prop[p]), key=value_sort_key)
            total = len(subjects_in)
            if total > page_size:
                bundle.inverse_truncation[p] = total
                subjects_in = subjects_in[:page_size]
            for s in subjects_in:
                bundle.inverse.add(Triple(s, p, resource))
        return bundle

    def fetch_property_page(
        self, resource: Iri, prop: Iri, direction: Direction, offset: int, limit: int
    ) -> tuple[list[Term], int]:
        if limit > self.max_page_size:
            raise ValueError(f"limit {limit} exceeds maximum page size {self.max_page_size}")
        if direction == "direct":
            values = sorted(set(self._graph.objects(resource, prop)), key=value_sort_key)
        else:
            values = sorted(
                {t.subject for t in self._graph.triples(predicate=prop, object=resource)},
                key=value_sort_key,
            )
        return values[offset : offset + limit], len(values)

    def ask_exists(self, resource: Iri) -> bool:
        for t in self._graph:
            if t.subject == resource or t.object == resource:
                return True
            if isinstance(t.subject, Iri) and _is_sibling_of(t.subject, resource):
                return True
            if isinstance(t.object, Iri) and _is_sibling_of(t.object, resource):
                return True
        return False


# --- SPARQL query text ------------------------------------------------------
#
# Kept as standalone functions so tests can pin the exact query shapes.

_ORDER_TEMPLATE = (
    "ORDER BY ASC(IF(isLiteral({v}), 0, IF(isIRI({v}), 1, 2))) ASC(STR({v})) "
    'ASC(IF(isLiteral({v}), LANG({v}), "")) ASC(IF(isLiteral({v}), STR(DATATYPE({v})), ""))'
)


def _sparql_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _iri_ref(iri: Iri) -> str:
    return "<" + iri_to_ascii(iri) + ">"


def _root_filter(resource: Iri, var: str) -> str:
    """Match the resource itself or any of its hash siblings.

    Endpoints differ in whether they store IRIs decoded or
    percent-encoded, so the prefix test covers both spellings.
    """
    prefixes = {resource.value + "#", iri_to_ascii(resource) + "#"}
    starts = " || ".join(f"STRSTARTS(STR({var}), {_sparql_string(p)})" for p in sorted(prefixes))
    return f"FILTER({var} = {_iri_ref(resource)} || (isIRI({var}) && ({starts})))"


def _paging(offset: int, limit: int) -> str:
    parts = []
    if limit != UNLIMITED:
        parts.append(f"LIMIT {limit}")
    if offset:
        parts.append(f"OFFSET {offset}")
    return " ".join(parts)


def direct_counts_query(resource: Iri) -> str:
    return (
        "SELECT ?s ?p (COUNT(DISTINCT ?o) AS ?n) WHERE { ?s ?p ?o . "
        + _root_filter(resource, "?s")
        + " } GROUP BY ?s ?p"
    )


def values_page_query(subject: Iri, prop: Iri, offset: int, limit: int) -> str:
    order = _ORDER_TEMPLATE.format(v="?o")
    q = f"SELECT DISTINCT ?o WHERE {{ {_iri_ref(subject)} {_iri_ref(prop)} ?o }} {order}"
    paging = _paging(offset, limit)
    return q + (" " + paging if paging else "")


def inverse_counts_query(resource: Iri) -> str:
    return (
        f"SELECT ?p (COUNT(DISTINCT ?s) AS ?n) WHERE {{ ?s ?p {_iri_ref(resource)} }} GROUP BY ?p"
    )


def inverse_page_query(resource: Iri, prop: Iri, offset: int, limit: int) -> str:
    order = _ORDER_TEMPLATE.format(v="?s")
    q = f"SELECT DISTINCT ?s WHERE {{ ?s {_iri_ref(prop)} {_iri_ref(resource)} }} {order}"
    paging = _paging(offset, limit)
    return q + (" " + paging if paging else "")


def closure_query(resource: Iri, depth: int = 3) -> str:
    """One query for all blank-node closures, ``depth`` levels deep.

    Blank node labels only mean anything within a single response, so
    the linking triples and every closure level must travel together.
    rdf:rest chains are walked with a path, keeping collections of any
    length whole without spending nesting depth on them.
    """
    rest = f"<{RDF_REST_IRI}>"
    link = f"?root ?p0 ?b0 . {_root_filter(resource, '?root')} FILTER(isBlank(?b0))"
    branches = [link]
    template = ["?root ?p0 ?b0 ."]
    prefix = link
    for i in range(1, depth + 1):
        if i == 1:
            hop = f"?b0 {rest}* ?c1 . FILTER(isBlank(?c1))"
        else:
            hop = (
                f"?c{i - 1} ?q{i - 1} ?b{i - 1} . FILTER(isBlank(?b{i - 1})) "
                f"?b{i - 1} {rest}* ?c{i} . FILTER(isBlank(?c{i}))"
            )
        prefix = f"{prefix} {hop}"
        branches.append(f"{prefix} ?c{i} ?q{i} ?o{i} .")
        template.append(f"?c{i} ?q{i} ?o{i} .")
    body = " UNION ".join("{ " + b + " }" for b in branches)
    return "CONSTRUCT { " + " ".join(template) + " } WHERE { " + body + " }"


def ask_query(resource: Iri) -> str:
    r = _iri_ref(resource)
    sib_s = _root_filter(resource, "?hs")
    sib_o = _root_filter(resource, "?ho")
    return (
        "ASK { "
        f"{{ {r} ?p ?o }} UNION {{ ?s ?p {r} }} "
        f"UNION {{ ?hs ?p ?o . {sib_s} }} UNION {{ ?s ?p ?ho . {sib_o} }}"
        " }"
    )


# --- remote client ----------------------------------------------------------

_RETRY_BASE_DELAY = 0.05

_JSON_MEDIA = "application/sparql-results+json"
_TURTLE_MEDIA = "text/turtle"


class SparqlGateway(Store):
    """SPARQL 1.1 protocol client.

    Safe to share across request handler threads: every call builds its
    own request; the only state is the immutable configuration.
    """

    def __init__(self, cfg: EndpointConfig) -> None:
        self.cfg = cfg
        self.max_page_size = cfg.max_page_size

    # -- transport ------------------------------------------------------

    def _post(self, query: str, accept: str) -> bytes:
        data = {"query": query}
        if self.cfg.default_graph is not None:
            data["default-graph-uri"] = iri_to_ascii(self.cfg.default_graph)
        url = iri_to_ascii(self.cfg.endpoint_url)
        delay = _RETRY_BASE_DELAY
        last_error: StoreError = EndpointUnreachable(url)
        for attempt in range(self.cfg.max_retries + 1):
            try:
                response = requests.post(
                    url,
                    data=data,
                    headers={"Accept": accept},
                    timeout=self.cfg.request_timeout,
                )
            except requests.Timeout:
                last_error = EndpointTimeout(f"no answer from {url} within {self.cfg.request_timeout}s")
            except requests.RequestException as exc:
                last_error = EndpointUnreachable(f"cannot reach {url}: {exc}")
            else:
                if response.status_code != 200:
                    # a definite answer; retrying would only hammer the endpoint
                    raise EndpointError(response.status_code, response.text[:200])
                return response.content
            if attempt < self.cfg.max_retries:
                time.sleep(delay)
                delay *= 2
        raise last_error

    def _select(self, query: str) -> list[dict]:
        body = self._post(query, _JSON_MEDIA)
        try:
            # always decode as UTF-8 ourselves; header-guessed charsets
            # are how Cyrillic datasets end up mangled
            payload = json.loads(body.decode("utf-8"))
            return payload["results"]["bindings"]
        except (ValueError, KeyError) as exc:
            raise EndpointError(200, f"malformed SPARQL JSON results: {exc}") from exc

    def _ask(self, query: str) -> bool:
        body = self._post(query, _JSON_MEDIA)
        try:
            return bool(json.loads(body.decode("utf-8"))["boolean"])
        except (ValueError, KeyError) as exc:
            raise EndpointError(200, f"malformed SPARQL JSON results: {exc}") from exc

    def _construct(self, query: str) -> Graph:
        body = self._post(query, _TURTLE_MEDIA)
        try:
            return parse_turtle(body.decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise EndpointError(200, f"malformed Turtle response: {exc}") from exc

    # -- response terms ---------------------------------------------------

    @staticmethod
    def _term_from_binding(binding: dict, labels: dict[str, BlankNodeId]) -> Term:
        kind = binding["type"]
        value = binding["value"]
        if kind == "uri":
            return parse_iri(value)
        if kind == "bnode":
            if value not in labels:
                labels[value] = BlankNodeId(f"r{len(labels)}")
            return labels[value]
        lang = binding.get("xml:lang")
        if lang:
            return Literal(value, lang=lang)
        datatype = binding.get("datatype")
        if datatype and datatype != XSD_STRING_IRI:
            return Literal(value, datatype=parse_iri(datatype))
        return Literal(value)

    @staticmethod
    def _count_from_binding(binding: dict) -> int:
        return int(binding["value"])

    # -- operations -------------------------------------------------------

    def fetch_description(self, resource: Iri, page_size: int, closure_depth: int = 3) -> DescriptionBundle:
        _require_no_fragment(resource)
        bundle = DescriptionBundle()
        labels: dict[str, BlankNodeId] = {}

        counts: dict[tuple[Iri, Iri], int] = {}
        for row in self._select(direct_counts_query(resource)):
            subject = self._term_from_binding(row["s"], labels)
            if not isinstance(subject, Iri):
                continue
            prop = self._term_from_binding(row["p"], labels)
            counts[(subject, prop)] = self._count_from_binding(row["n"])
        subjects = sorted({s for s, _ in counts}, key=lambda i: i.value)
        bundle.siblings = [s for s in subjects if s != resource]

        # One response holds every blank-node closure; labels from other
        # responses never mix with it.
        closure = self._construct(closure_query(resource, closure_depth))
        linked: dict[tuple[Iri, Iri], list[BlankNodeId]] = {}
        for t in closure:
            if isinstance(t.subject, Iri) and isinstance(t.object, BlankNodeId):
                linked.setdefault((t.subject, t.predicate), []).append(t.object)
        for key in linked:
            linked[key] = sorted(set(linked[key]), key=lambda b: b.label)

        used: list[BlankNodeId] = []
        for (subject, prop), total in sorted(counts.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
            if total > page_size:
                bundle.truncation[(subject, prop)] = total
            page_labels: dict[str, BlankNodeId] = {}
            rows = self._select(values_page_query(subject, prop, 0, min(total, page_size)))
            bnode_positions = 0
            for row in rows:
                term = self._term_from_binding(row["o"], page_labels)
                if isinstance(term, BlankNodeId):
                    bnode_positions += 1
                else:
                    bundle.direct.add(Triple(subject, prop, term))
            for bnode in linked.get((subject, prop), [])[:bnode_positions]:
                bundle.direct.add(Triple(subject, prop, bnode))
                used.append(bnode)

        for t in _reachable_closure(closure, used):
            bundle.direct.add(t)

        inverse_counts: dict[Iri, int] = {}
        for row in self._select(inverse_counts_query(resource)):
            prop = self._term_from_binding(row["p"], labels)
            inverse_counts[prop] = self._count_from_binding(row["n"])
        for prop in sorted(inverse_counts, key=lambda i: i.value):
            total = inverse_counts[prop]
            if total > page_size:
                bundle.inverse_truncation[prop] = total
            page_labels = {}
            for row in self._select(inverse_page_query(resource, prop, 0, min(total, page_size))):
                subject = self._term_from_binding(row["s"], page_labels)
                bundle.inverse.add(Triple(subject, prop, resource))
        return bundle

    def fetch_property_page(
        self, resource: Iri, prop: Iri, direction: Direction, offset: int, limit: int
    ) -> tuple[list[Term], int]:
        if limit > self.cfg.max_page_size:
            raise ValueError(f"limit {limit} exceeds maximum page size {self.cfg.max_page_size}")
        labels: dict[str, BlankNodeId] = {}
        if direction == "direct":
            count_rows = self._select(
                f"SELECT (COUNT(DISTINCT ?o) AS ?n) WHERE {{ {_iri_ref(resource)} {_iri_ref(prop)} ?o }}"
            )
            page = self._select(values_page_query(resource, prop, offset, limit))
            values = [self._term_from_binding(row["o"], labels) for row in page]
        else:
            count_rows = self._select(
                f"SELECT (COUNT(DISTINCT ?s) AS ?n) WHERE {{ ?s {_iri_ref(prop)} {_iri_ref(resource)} }}"
            )
            page = self._select(inverse_page_query(resource, prop, offset, limit))
            values = [self._term_from_binding(row["s"], labels) for row in page]
        total = self._count_from_binding(count_rows[0]["n"]) if count_rows else 0
        return values, total

    def ask_exists(self, resource: Iri) -> bool:
        return self._ask(ask_query(resource))


def _reachable_closure(closure: Graph, seeds: list[BlankNodeId]) -> Graph:
    """Closure triples reachable from the blank nodes that made the page."""
    out = Graph()
    visited: set[BlankNodeId] = set()
    frontier = list(seeds)
    while frontier:
        node = frontier.pop()
        if node in visited:
            continue
        visited.add(node)
        for t in closure.triples(subject=node):
            out.add(t)
            if isinstance(t.object, BlankNodeId) and t.object not in visited:
                frontier.append(t.object)
    return out
