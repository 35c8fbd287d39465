"""Turn a fetched DescriptionBundle into a display-ready tree.

Property tables are grouped and ordered (type first, then label-ish
properties, then the rest alphabetically, inverse links last); blank
nodes become nested descriptions down to a configurable depth;
rdf:first/rdf:rest chains collapse into ordered collections; literals
are scanned for LaTeX math so the view can hand them to a renderer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from lodlens.model import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    BlankNodeId,
    Graph,
    Iri,
    Literal,
    Term,
    split_hash,
)
from lodlens.store import DescriptionBundle, value_sort_key

RDFS_LABEL = Iri("http://www.w3.org/2000/01/rdf-schema#label")
SKOS_PREF_LABEL = Iri("http://www.w3.org/2004/02/skos/core#prefLabel")
DCTERMS_TITLE = Iri("http://purl.org/dc/terms/title")
FOAF_NAME = Iri("http://xmlns.com/foaf/0.1/name")

DEFAULT_LABEL_PROPERTIES = (RDFS_LABEL, SKOS_PREF_LABEL, DCTERMS_TITLE, FOAF_NAME)
DEFAULT_MATH_DELIMITERS = (("$", "$"), ("\\(", "\\)"), ("\\[", "\\]"))


@dataclass(frozen=True)
class BuilderConfig:
    max_nesting_depth: int = 3
    label_properties: tuple[Iri, ...] = DEFAULT_LABEL_PROPERTIES
    preferred_languages: tuple[str, ...] = ()
    math_delimiters: tuple[tuple[str, str], ...] = DEFAULT_MATH_DELIMITERS
    math_datatype: Optional[Iri] = None

    def __post_init__(self) -> None:
        if self.max_nesting_depth < 1:
            raise ValueError("max_nesting_depth must be at least 1")


@dataclass(frozen=True)
class LinkedResource:
    iri: Iri
    label: Optional[str] = None
    expandable: bool = True


@dataclass(frozen=True)
class LiteralValue:
    literal: Literal
    is_math: bool = False


@dataclass(frozen=True)
class NestedDescription:
    node: Union[BlankNodeId, Iri]
    properties: tuple["PropertyGroup", ...] = ()
    truncated: bool = False  # depth limit reached; properties not shown


@dataclass(frozen=True)
class CollectionValue:
    members: tuple["DisplayValue", ...] = ()
    # the rdf:rest chain cells, in order; lets callers reconstruct the
    # original triples and anchors nothing in the rendered view
    chain_nodes: tuple[Term, ...] = ()


DisplayValue = Union[LinkedResource, LiteralValue, NestedDescription, CollectionValue]


@dataclass(frozen=True)
class PropertyGroup:
    property: Iri
    property_label: Optional[str]
    direction: str  # "direct" | "inverse"
    values: tuple[DisplayValue, ...]
    shown: int
    total: int


@dataclass(frozen=True)
class ResourceDescription:
    resource: Iri
    label: Optional[str]
    groups: tuple[PropertyGroup, ...]
    siblings: tuple[tuple[str, "ResourceDescription"], ...] = ()


def resolve_label(graph: Graph, iri: Iri, cfg: BuilderConfig) -> Optional[str]:
    """Best label for an IRI from the triples at hand.

    Scans label properties in priority order; within the first property
    that has any literal, preferred languages win, then any literal.
    """
    for prop in cfg.label_properties:
        literals = sorted(
            (o for o in graph.objects(iri, prop) if isinstance(o, Literal)),
            key=value_sort_key,
        )
        if not literals:
            continue
        for lang in cfg.preferred_languages:
            for lit in literals:
                if lit.lang == lang.lower():
                    return lit.lexical
        return literals[0].lexical
    return None


def mark_math(literal: Literal, cfg: BuilderConfig) -> bool:
    """Whether a literal carries LaTeX math worth handing to a renderer.

    True on the configured math datatype, or on at least one balanced,
    non-empty delimiter pair; a lone "$5" stays plain text.
    """
    if cfg.math_datatype is not None and literal.datatype == cfg.math_datatype:
        return True
    text = literal.lexical
    for opener, closer in cfg.math_delimiters:
        start = text.find(opener)
        while start != -1:
            end = text.find(closer, start + len(opener))
            if end == -1:
                break
            if end > start + len(opener):
                return True
            start = text.find(opener, end + len(closer))
    return False


def flatten_collection(graph: Graph, head: Term) -> Optional[list[Term]]:
    """Members of a well-formed rdf:first/rdf:rest list, else None.

    Well-formed here is strict: every cell carries exactly one rdf:first,
    exactly one rdf:rest and nothing else, no cell repeats, and the chain
    ends at rdf:nil.  Anything looser renders raw so no triple is hidden.
    """
    if head == RDF_NIL:
        return []
    members: list[Term] = []
    visited: set[Term] = set()
    node = head
    while node != RDF_NIL:
        if not isinstance(node, (BlankNodeId, Iri)) or node in visited:
            return None
        visited.add(node)
        firsts = list(graph.objects(node, RDF_FIRST))
        rests = list(graph.objects(node, RDF_REST))
        if len(firsts) != 1 or len(rests) != 1:
            return None
        if any(t.predicate not in (RDF_FIRST, RDF_REST) for t in graph.triples(subject=node)):
            return None
        members.append(firsts[0])
        node = rests[0]
    return members


def _chain_cells(graph: Graph, head: Term) -> tuple[Term, ...]:
    cells = []
    node = head
    while node != RDF_NIL:
        cells.append(node)
        node = next(graph.objects(node, RDF_REST))
    return tuple(cells)


class _Builder:
    def __init__(self, bundle: DescriptionBundle, resource: Iri, cfg: BuilderConfig) -> None:
        self.bundle = bundle
        self.resource = resource
        self.cfg = cfg
        self.direct = bundle.direct

    def build(self) -> ResourceDescription:
        groups = self._subject_groups(self.resource, depth=0)
        groups.extend(self._inverse_groups())
        siblings = []
        for sibling in self.bundle.siblings:
            fragment = split_hash(sibling)[1] or ""
            siblings.append(
                (
                    fragment,
                    ResourceDescription(
                        resource=sibling,
                        label=resolve_label(self.direct, sibling, self.cfg),
                        groups=tuple(self._subject_groups(sibling, depth=0)),
                    ),
                )
            )
        return ResourceDescription(
            resource=self.resource,
            label=resolve_label(self.direct, self.resource, self.cfg),
            groups=tuple(groups),
            siblings=tuple(siblings),
        )

    def _property_order(self, prop: Iri) -> tuple:
        if prop == RDF_TYPE:
            return (0, 0, prop.value)
        if prop in self.cfg.label_properties:
            return (1, self.cfg.label_properties.index(prop), prop.value)
        return (2, 0, prop.value)

    def _subject_groups(self, subject: Union[Iri, BlankNodeId], depth: int) -> list[PropertyGroup]:
        groups = []
        for prop in sorted(self.direct.predicates(subject=subject), key=self._property_order):
            values = tuple(
                self._display(obj, depth)
                for obj in sorted(self.direct.objects(subject, prop), key=value_sort_key)
            )
            shown = len(values)
            total = self.bundle.truncation.get((subject, prop), shown) if isinstance(subject, Iri) else shown
            groups.append(
                PropertyGroup(
                    property=prop,
                    property_label=resolve_label(self.direct, prop, self.cfg),
                    direction="direct",
                    values=values,
                    shown=shown,
                    total=total,
                )
            )
        return groups

    def _inverse_groups(self) -> list[PropertyGroup]:
        groups = []
        for prop in sorted(self.bundle.inverse.predicates(), key=lambda p: p.value):
            subjects = sorted(
                {t.subject for t in self.bundle.inverse.triples(predicate=prop, object=self.resource)},
                key=value_sort_key,
            )
            values = tuple(
                LinkedResource(s, label=resolve_label(self.direct, s, self.cfg))
                if isinstance(s, Iri)
                else NestedDescription(s)
                for s in subjects
            )
            shown = len(values)
            groups.append(
                PropertyGroup(
                    property=prop,
                    property_label=resolve_label(self.direct, prop, self.cfg),
                    direction="inverse",
                    values=values,
                    shown=shown,
                    total=self.bundle.inverse_truncation.get(prop, shown),
                )
            )
        return groups

    def _display(self, term: Term, depth: int) -> DisplayValue:
        if isinstance(term, Literal):
            return LiteralValue(term, is_math=mark_math(term, self.cfg))
        if isinstance(term, Iri):
            if term == RDF_NIL:
                return CollectionValue()
            return LinkedResource(term, label=resolve_label(self.direct, term, self.cfg))
        members = flatten_collection(self.direct, term)
        if members is not None:
            return CollectionValue(
                members=tuple(self._display(m, depth) for m in members),
                chain_nodes=_chain_cells(self.direct, term),
            )
        if depth + 1 > self.cfg.max_nesting_depth:
            return NestedDescription(term, truncated=True)
        return NestedDescription(term, properties=tuple(self._subject_groups(term, depth + 1)))


def build_description(bundle: DescriptionBundle, resource: Iri, cfg: BuilderConfig) -> ResourceDescription:
    """Deterministic display tree for one resource and its hash siblings."""
    return _Builder(bundle, resource, cfg).build()


def build_node_description(
    bundle: DescriptionBundle, node: Union[Iri, BlankNodeId], cfg: BuilderConfig
) -> Optional[ResourceDescription]:
    """Sub-tree rooted at one node of an already fetched bundle.

    Serves hash-sibling and nested-node lookups; None when the bundle
    holds no triples about the node.
    """
    builder = _Builder(bundle, node, cfg)
    groups = builder._subject_groups(node, depth=0)
    if not groups:
        return None
    label = resolve_label(bundle.direct, node, cfg) if isinstance(node, Iri) else None
    return ResourceDescription(resource=node, label=label, groups=tuple(groups))
