"""lodlens: a Linked Data server for multilingual RDF datasets.

Dereferences resource URIs with 303 content negotiation, renders
navigable HTML descriptions (nested blank nodes, flattened RDF
collections, paginated property values, math-aware literals) and serves
Turtle / N-Triples with Unicode IRIs handled correctly end to end.
"""

from lodlens.model import (
    BlankNodeId,
    Graph,
    InvalidIriError,
    Iri,
    Literal,
    Triple,
    iri_to_ascii,
    parse_iri,
    split_hash,
)

__all__ = [
    "BlankNodeId",
    "Graph",
    "InvalidIriError",
    "Iri",
    "Literal",
    "Triple",
    "iri_to_ascii",
    "parse_iri",
    "split_hash",
]

__version__ = "0.1.0"
