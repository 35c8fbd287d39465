"""Display-tree construction: grouping, nesting, collections, labels, math."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lodlens.describe import (
    BuilderConfig,
    CollectionValue,
    LinkedResource,
    LiteralValue,
    NestedDescription,
    ResourceDescription,
    build_description,
    flatten_collection,
    mark_math,
    resolve_label,
)
from lodlens.model import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    BlankNodeId,
    Graph,
    Iri,
    Literal,
    Triple,
)
from lodlens.store import UNLIMITED, MemoryStore
from lodlens.turtle import parse_turtle

CFG = BuilderConfig()
MACHINE = Iri("http://lod.ruthes.org/resource/entry/RU-машина-n")
EX = "http://example.org/vocab#"


def bundle_for(text: str, resource: Iri, page_size: int = UNLIMITED):
    return MemoryStore.from_turtle(text).fetch_description(resource, page_size)


# --- flatten_collection -------------------------------------------------------


def test_collection_members_in_source_order():
    doc = (
        "@base <http://lod.example.org/res/объект-культурного-наследия> .\n"
        "@prefix ex: <http://example.org/vocab#> .\n"
        "<> ex:components (<#comp-объект> <#comp-культурного> <#comp-наследия>) .\n"
    )
    g = parse_turtle(doc)
    head = next(g.objects(predicate=Iri(EX + "components")))
    base = "http://lod.example.org/res/объект-культурного-наследия#"
    assert flatten_collection(g, head) == [
        Iri(base + "comp-объект"),
        Iri(base + "comp-культурного"),
        Iri(base + "comp-наследия"),
    ]


def test_nil_is_the_empty_collection():
    assert flatten_collection(Graph(), RDF_NIL) == []


def cell(graph, node, first, rest):
    graph.add(Triple(node, RDF_FIRST, first))
    graph.add(Triple(node, RDF_REST, rest))


def test_cyclic_chain_is_rejected():
    g = Graph()
    b1, b2, b3 = BlankNodeId("c1"), BlankNodeId("c2"), BlankNodeId("c3")
    cell(g, b1, Literal("a"), b2)
    cell(g, b2, Literal("b"), b3)
    cell(g, b3, Literal("c"), b1)
    assert flatten_collection(g, b1) is None


def test_double_first_is_rejected():
    g = Graph()
    b = BlankNodeId("c")
    cell(g, b, Literal("a"), RDF_NIL)
    g.add(Triple(b, RDF_FIRST, Literal("b")))
    assert flatten_collection(g, b) is None


def test_dangling_rest_is_rejected():
    g = Graph()
    b = BlankNodeId("c")
    g.add(Triple(b, RDF_FIRST, Literal("a")))
    assert flatten_collection(g, b) is None


def test_cell_with_extra_property_is_rejected():
    g = Graph()
    b = BlankNodeId("c")
    cell(g, b, Literal("a"), RDF_NIL)
    g.add(Triple(b, Iri(EX + "note"), Literal("x")))
    assert flatten_collection(g, b) is None


def test_literal_head_is_rejected():
    assert flatten_collection(Graph(), Literal("x")) is None


def brute_force_members(graph, head):
    """Independent re-derivation: global well-formedness, then walk."""
    if head == RDF_NIL:
        return []
    reachable = []
    node = head
    steps = 0
    while node != RDF_NIL and steps <= len(graph) + 1:
        reachable.append(node)
        rests = [t.object for t in graph if t.subject == node and t.predicate == RDF_REST]
        node = rests[0] if len(rests) == 1 else None
        if node is None:
            return None
        steps += 1
    if node != RDF_NIL or len(set(reachable)) != len(reachable):
        return None
    for n in reachable:
        about = [t for t in graph if t.subject == n]
        firsts = [t for t in about if t.predicate == RDF_FIRST]
        rests = [t for t in about if t.predicate == RDF_REST]
        if len(firsts) != 1 or len(rests) != 1 or len(about) != 2:
            return None
    return [next(t.object for t in graph if t.subject == n and t.predicate == RDF_FIRST) for n in reachable]


def test_flatten_agrees_with_brute_force_on_random_chains():
    rng = random.Random(99)
    for _ in range(300):
        g = Graph()
        nodes = [BlankNodeId(f"n{i}") for i in range(rng.randint(1, 8))]
        for i, node in enumerate(nodes):
            if rng.random() < 0.9:
                g.add(Triple(node, RDF_FIRST, Literal(f"v{i}")))
            if rng.random() < 0.15:
                g.add(Triple(node, RDF_FIRST, Literal("dup")))
            if rng.random() < 0.9:
                nxt = RDF_NIL if i + 1 == len(nodes) else nodes[i + 1]
                if rng.random() < 0.1:
                    nxt = rng.choice(nodes)
                g.add(Triple(node, RDF_REST, nxt))
            if rng.random() < 0.1:
                g.add(Triple(node, Iri(EX + "extra"), Literal("x")))
        assert flatten_collection(g, nodes[0]) == brute_force_members(g, nodes[0])


# --- resolve_label -------------------------------------------------------------


def labeled_graph(*triples):
    return Graph(list(triples))


RDFS_LABEL = Iri("http://www.w3.org/2000/01/rdf-schema#label")
SKOS_PREF = Iri("http://www.w3.org/2004/02/skos/core#prefLabel")


def test_preferred_language_wins():
    g = labeled_graph(
        Triple(MACHINE, RDFS_LABEL, Literal("machine", lang="en")),
        Triple(MACHINE, RDFS_LABEL, Literal("машина", lang="ru")),
    )
    cfg = BuilderConfig(preferred_languages=("ru",))
    assert resolve_label(g, MACHINE, cfg) == "машина"


def test_no_label_triples_gives_none():
    assert resolve_label(Graph(), MACHINE, CFG) is None


def test_language_fallback_follows_preference_order():
    g = labeled_graph(
        Triple(MACHINE, RDFS_LABEL, Literal("maschine", lang="de")),
        Triple(MACHINE, RDFS_LABEL, Literal("machine", lang="en")),
    )
    cfg = BuilderConfig(preferred_languages=("ru", "en"))
    assert resolve_label(g, MACHINE, cfg) == "machine"


def test_property_priority_beats_language_preference():
    g = labeled_graph(
        Triple(MACHINE, RDFS_LABEL, Literal("maschine", lang="de")),
        Triple(MACHINE, SKOS_PREF, Literal("машина", lang="ru")),
    )
    cfg = BuilderConfig(preferred_languages=("ru",))
    # rdfs:label outranks skos:prefLabel, so its German label wins
    assert resolve_label(g, MACHINE, cfg) == "maschine"


def test_label_rule_against_brute_force_enumeration():
    langs = ["de", "en", "ru"]
    for present_mask in range(1, 8):
        present = [l for i, l in enumerate(langs) if present_mask & (1 << i)]
        g = labeled_graph(*(Triple(MACHINE, RDFS_LABEL, Literal(f"l-{l}", lang=l)) for l in present))
        for pref_mask in range(8):
            prefs = tuple(l for i, l in enumerate(langs) if pref_mask & (1 << i))
            expected_lang = next((p for p in prefs if p in present), None)
            if expected_lang is None:
                expected = sorted(f"l-{l}" for l in present)[0]
            else:
                expected = f"l-{expected_lang}"
            assert resolve_label(g, MACHINE, BuilderConfig(preferred_languages=prefs)) == expected


# --- mark_math ------------------------------------------------------------------


def test_inline_dollar_math_is_marked():
    assert mark_math(Literal("Area $S = \\pi r^2$"), CFG) is True


def test_plain_text_is_not_math():
    assert mark_math(Literal("plain text"), CFG) is False


def test_unbalanced_dollar_is_not_math():
    assert mark_math(Literal("price is $5"), CFG) is False


def test_bracket_delimiters():
    assert mark_math(Literal("inline \\(x+1\\) here"), CFG) is True
    assert mark_math(Literal("display \\[x+1\\] here"), CFG) is True


def test_empty_pair_is_not_math():
    assert mark_math(Literal("weird $$ text"), CFG) is False


def test_math_datatype_marks_without_delimiters():
    dt = Iri(EX + "latex")
    cfg = BuilderConfig(math_datatype=dt)
    assert mark_math(Literal("x^2", datatype=dt), cfg) is True
    assert mark_math(Literal("x^2"), cfg) is False


@given(st.text(alphabet=st.characters(blacklist_characters="$\\[]()"), max_size=60))
def test_text_without_delimiters_is_never_math(text):
    assert mark_math(Literal(text), CFG) is False


# --- build_description ------------------------------------------------------------


NESTED_DOC = """
@prefix ex: <http://example.org/vocab#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix wn: <https://globalwordnet.github.io/schemas/wn#> .
<http://lod.example.org/synset/107579787-n> a ex:Synset ;
    rdfs:label "растительное масло"@ru ;
    wn:definition [ rdfs:label "масло, получаемое из растительного сырья"@ru ; ex:source ex:dict ] .
"""

SYNSET = Iri("http://lod.example.org/synset/107579787-n")


def test_blank_node_renders_as_nested_description_not_bare_id():
    bundle = bundle_for(NESTED_DOC, SYNSET)
    desc = build_description(bundle, SYNSET, CFG)
    definition = next(g for g in desc.groups if g.property == Iri("https://globalwordnet.github.io/schemas/wn#definition"))
    (value,) = definition.values
    assert isinstance(value, NestedDescription)
    assert value.properties, "nested node must carry its own property table"
    nested_props = {g.property for g in value.properties}
    assert Iri("http://www.w3.org/2000/01/rdf-schema#label") in nested_props


def test_empty_bundle_gives_empty_description():
    bundle = bundle_for("<http://e.org/unrelated> <http://e.org/p> \"x\" .", Iri("http://e.org/missing"))
    desc = build_description(bundle, Iri("http://e.org/missing"), CFG)
    assert desc.groups == () and desc.label is None and desc.siblings == ()


def test_chain_deeper_than_limit_ends_in_stub():
    doc = (
        "@prefix ex: <http://example.org/vocab#> .\n"
        '<http://e.org/r> ex:p [ ex:l1 [ ex:l2 [ ex:l3 "deep" ] ] ] .\n'
    )
    bundle = bundle_for(doc, Iri("http://e.org/r"))
    desc = build_description(bundle, Iri("http://e.org/r"), BuilderConfig(max_nesting_depth=2))
    level1 = desc.groups[0].values[0]
    level2 = level1.properties[0].values[0]
    level3 = level2.properties[0].values[0]
    assert isinstance(level3, NestedDescription)
    assert level3.truncated and level3.properties == ()


def test_group_ordering_type_labels_alpha_then_inverse():
    doc = """
    @prefix ex: <http://example.org/vocab#> .
    @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
    <http://e.org/r> ex:zzz "1" ; ex:aaa "2" ; a ex:T ; rdfs:label "r" .
    <http://e.org/other> ex:points <http://e.org/r> .
    """
    bundle = bundle_for(doc, Iri("http://e.org/r"))
    desc = build_description(bundle, Iri("http://e.org/r"), CFG)
    order = [(g.property, g.direction) for g in desc.groups]
    assert order == [
        (RDF_TYPE, "direct"),
        (RDFS_LABEL, "direct"),
        (Iri(EX + "aaa"), "direct"),
        (Iri(EX + "zzz"), "direct"),
        (Iri(EX + "points"), "inverse"),
    ]


def test_truncation_populates_totals():
    doc = "\n".join(f'<http://e.org/r> <http://e.org/p> "v{i:02d}" .' for i in range(12))
    bundle = bundle_for(doc, Iri("http://e.org/r"), page_size=5)
    desc = build_description(bundle, Iri("http://e.org/r"), CFG)
    (group,) = desc.groups
    assert group.shown == len(group.values) == 5
    assert group.total == 12


def test_shown_equals_total_when_not_truncated():
    bundle = bundle_for(NESTED_DOC, SYNSET)
    desc = build_description(bundle, SYNSET, CFG)
    assert all(g.shown == g.total for g in desc.groups)


def test_sibling_sections_are_recursive_descriptions():
    doc = """
    @prefix ex: <http://example.org/vocab#> .
    @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
    <http://e.org/entry> rdfs:label "entry" .
    <http://e.org/entry#Form> rdfs:label "form" ; ex:rep "written" .
    """
    bundle = bundle_for(doc, Iri("http://e.org/entry"))
    desc = build_description(bundle, Iri("http://e.org/entry"), CFG)
    ((fragment, sibling),) = desc.siblings
    assert fragment == "Form"
    assert sibling.resource == Iri("http://e.org/entry#Form")
    assert sibling.label == "form"
    assert {g.property for g in sibling.groups} == {RDFS_LABEL, Iri(EX + "rep")}


def test_collection_value_suppresses_structural_triples():
    doc = (
        "@prefix ex: <http://example.org/vocab#> .\n"
        '<http://e.org/r> ex:members ("a" "b" "c") .\n'
    )
    bundle = bundle_for(doc, Iri("http://e.org/r"))
    desc = build_description(bundle, Iri("http://e.org/r"), CFG)
    (group,) = desc.groups
    (value,) = group.values
    assert isinstance(value, CollectionValue)
    assert [m.literal.lexical for m in value.members] == ["a", "b", "c"]
    assert all(g.property not in (RDF_FIRST, RDF_REST) for g in desc.groups)


def test_malformed_collection_renders_raw():
    g = Graph()
    head = BlankNodeId("h")
    cell(g, head, Literal("a"), BlankNodeId("h"))  # self-loop
    g.add(Triple(Iri("http://e.org/r"), Iri(EX + "members"), head))
    from lodlens.store import DescriptionBundle

    bundle = DescriptionBundle(direct=g)
    desc = build_description(bundle, Iri("http://e.org/r"), CFG)
    (value,) = desc.groups[0].values
    assert isinstance(value, NestedDescription)
    raw_props = {pg.property for pg in value.properties}
    assert RDF_FIRST in raw_props and RDF_REST in raw_props


def test_inverse_blank_subject_renders_as_anonymous_node():
    g = Graph([Triple(BlankNodeId("b"), Iri(EX + "about"), Iri("http://e.org/r"))])
    from lodlens.store import DescriptionBundle

    bundle = DescriptionBundle(inverse=g)
    desc = build_description(bundle, Iri("http://e.org/r"), CFG)
    (group,) = desc.groups
    assert group.direction == "inverse"
    assert isinstance(group.values[0], NestedDescription)


def test_build_is_deterministic():
    bundle = bundle_for(NESTED_DOC, SYNSET)
    assert build_description(bundle, SYNSET, CFG) == build_description(bundle, SYNSET, CFG)


# --- conservation of information ---------------------------------------------------


def term_of(value):
    if isinstance(value, LinkedResource):
        return value.iri
    if isinstance(value, LiteralValue):
        return value.literal
    if isinstance(value, NestedDescription):
        return value.node
    return value.chain_nodes[0] if value.chain_nodes else RDF_NIL


def rebuild_triples(desc: ResourceDescription) -> set:
    triples = set()

    def walk_value(value):
        if isinstance(value, NestedDescription):
            walk_groups(value.node, value.properties, None)
        elif isinstance(value, CollectionValue):
            cells = value.chain_nodes
            for i, cell_node in enumerate(cells):
                member = value.members[i]
                triples.add(Triple(cell_node, RDF_FIRST, term_of(member)))
                rest = cells[i + 1] if i + 1 < len(cells) else RDF_NIL
                triples.add(Triple(cell_node, RDF_REST, rest))
                walk_value(member)

    def walk_groups(subject, groups, inverse_target):
        for g in groups:
            for v in g.values:
                if g.direction == "inverse":
                    triples.add(Triple(term_of(v), g.property, inverse_target))
                    continue
                triples.add(Triple(subject, g.property, term_of(v)))
                walk_value(v)

    walk_groups(desc.resource, desc.groups, desc.resource)
    for _, sibling in desc.siblings:
        walk_groups(sibling.resource, sibling.groups, sibling.resource)
    return triples


CONSERVATION_DOC = """
@prefix ex: <http://example.org/vocab#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix entry: <http://lod.ruthes.org/resource/entry/> .

entry:RU-машина-n a ex:Entry ;
    rdfs:label "машина"@ru ;
    ex:parts ("колесо" "мотор" (<http://e.org/nested> "x")) ;
    ex:meta [ ex:depth1 [ ex:note "fine" ] ; ex:flag true ] ;
    ex:empty () ;
    ex:note "Area $S = \\\\pi r^2$" .
<http://lod.ruthes.org/resource/entry/RU-машина-n#Form> ex:rep "машина"@ru .
entry:other ex:link entry:RU-машина-n .
"""


def test_every_bundle_triple_appears_exactly_once():
    bundle = bundle_for(CONSERVATION_DOC, MACHINE)
    desc = build_description(bundle, MACHINE, CFG)
    rebuilt = rebuild_triples(desc)
    original = set(bundle.direct) | set(bundle.inverse)
    assert rebuilt == original
