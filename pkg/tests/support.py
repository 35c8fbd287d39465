"""Shared helpers for tests: seeded random graph construction."""

import random

from lodlens.model import BlankNodeId, Graph, Iri, Literal, Triple

IRI_POOL = [
    Iri("http://lod.ruthes.org/resource/entry/RU-машина-n"),
    Iri("http://lod.ruthes.org/resource/entry/cat-n#CanonicalForm"),
    Iri("http://example.org/a%20b"),
    Iri("http://example.org/a%2Fb"),
    Iri("http://example.org/plain"),
    Iri("http://пример.испытание/путь"),
]

PREDICATE_POOL = [
    Iri("http://www.w3.org/2000/01/rdf-schema#label"),
    Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
    Iri("http://example.org/vocab#свойство"),
    Iri("http://example.org/vocab#p"),
]

LEXICAL_ALPHABET = 'aя" \\\n\t\rб7'

DATATYPES = [
    Iri("http://www.w3.org/2001/XMLSchema#integer"),
    Iri("http://example.org/vocab#тип"),
]


def random_literal(rng: random.Random) -> Literal:
    lexical = "".join(rng.choice(LEXICAL_ALPHABET) for _ in range(rng.randint(0, 8)))
    kind = rng.randrange(3)
    if kind == 0:
        return Literal(lexical)
    if kind == 1:
        return Literal(lexical, lang=rng.choice(["ru", "en", "tt-cyrl"]))
    return Literal(lexical, datatype=rng.choice(DATATYPES))


def random_term(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        return rng.choice(IRI_POOL)
    if kind == 1:
        return BlankNodeId(f"n{rng.randint(1, 5)}")
    return random_literal(rng)


def random_graph(rng: random.Random) -> Graph:
    g = Graph()
    for _ in range(rng.randint(1, 12)):
        subject = rng.choice(IRI_POOL) if rng.random() < 0.6 else BlankNodeId(f"n{rng.randint(1, 5)}")
        g.add(Triple(subject, rng.choice(PREDICATE_POOL), random_term(rng)))
    return g
