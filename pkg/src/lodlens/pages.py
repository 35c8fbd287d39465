"""HTML rendering for resource pages and fragments.

Templates here only iterate and escape; every display decision is
already encoded in the ResourceDescription tree. The emitted markup is
kept XML-well-formed so tests can parse it strictly.

Hook names consumed by the browser script (see docs/ui-contract.md):
class ll-expand + data-expand-url, class ll-loadmore + data-uri /
data-property / data-direction / data-offset / data-limit / data-total,
and class ll-math wrapping raw math source.
"""

from dataclasses import dataclass
from typing import Optional, Union
from urllib.parse import quote

from .describe import (
    CollectionValue,
    LinkedResource,
    LiteralValue,
    NestedDescription,
    PropertyGroup,
    ResourceDescription,
)
from .model import RDF_NS, XSD_STRING, BlankNodeId, Iri

MATH_CLASS = "ll-math"
EXPAND_CLASS = "ll-expand"
LOAD_MORE_CLASS = "ll-loadmore"

RDF_LANG_STRING = Iri(RDF_NS + "langString")


def escape_html(text: str) -> str:
    """Escape the four markup-significant characters, nothing else.

    Cyrillic and all other non-ASCII text passes through unchanged.
    Not idempotent: escaping "&amp;" yields "&amp;amp;".
    """
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def fragment_api_url(
    uri: Iri, bnode: Optional[BlankNodeId] = None, depth: Optional[int] = None
) -> str:
    url = "/api/fragment?uri=" + quote(uri.value, safe="")
    if bnode is not None:
        url += "&bnode=" + quote(bnode.label, safe="")
    if depth is not None:
        url += f"&depth={depth}"
    return url


def resource_href(iri: Iri, base_namespace: Iri) -> str:
    """Same-origin path for our own resources, absolute IRI otherwise."""
    base = base_namespace.value.rstrip("/")
    if iri.value.startswith(base + "/"):
        return iri.value[len(base) :]
    return iri.value


@dataclass(frozen=True)
class PageModel:
    description: ResourceDescription
    base_namespace: Iri
    alternate_links: tuple[tuple[str, str], ...]
    asset_paths: tuple[str, ...] = ("/static/style.css",)
    script_paths: tuple[str, ...] = ("/static/lodlens.js",)
    site_title: str = "lodlens"

    def __post_init__(self) -> None:
        paths = [path for _, path in self.alternate_links]
        if not any(p.endswith(".ttl") for p in paths) or not any(p.endswith(".nt") for p in paths):
            raise ValueError("alternate links must cover .ttl and .nt")


def _local_name(iri: Iri) -> str:
    value = iri.value
    for sep in ("#", "/"):
        if sep in value and not value.endswith(sep):
            tail = value.rsplit(sep, 1)[1]
            if tail:
                return tail
    return value


class _Renderer:
    def __init__(self, base_namespace: Iri, root: Union[Iri, BlankNodeId]) -> None:
        self.base = base_namespace.value.rstrip("/")
        # bnode expand targets are addressed relative to the page root
        self.root = root if isinstance(root, Iri) else None

    def is_local(self, iri: Iri) -> bool:
        return iri.value.startswith(self.base + "/")

    def href(self, iri: Iri) -> str:
        return resource_href(iri, Iri(self.base))

    def anchor(self, iri: Iri, text: Optional[str] = None) -> str:
        shown = text if text is not None else iri.value
        return f'<a href="{escape_html(self.href(iri))}">{escape_html(shown)}</a>'

    def expand_button(self, url: str) -> str:
        return (
            f'<button type="button" class="{EXPAND_CLASS}" '
            f'data-expand-url="{escape_html(url)}">+</button>'
        )

    def value_html(self, value, subject_depth: int) -> str:
        if isinstance(value, LiteralValue):
            return self.literal_html(value)
        if isinstance(value, LinkedResource):
            html = self.anchor(value.iri, value.label)
            if value.expandable and self.is_local(value.iri):
                html += " " + self.expand_button(fragment_api_url(value.iri))
            return html
        if isinstance(value, CollectionValue):
            # list cells sit one level down; members hang off the cells
            items = "".join(
                f"<li>{self.value_html(m, subject_depth + 1)}</li>" for m in value.members
            )
            return f'<ol class="ll-collection">{items}</ol>'
        return self.nested_html(value, subject_depth)

    def literal_html(self, value: LiteralValue) -> str:
        lit = value.literal
        if value.is_math:
            body = f'<span class="{MATH_CLASS}">{escape_html(lit.lexical)}</span>'
        else:
            body = f'<span class="ll-literal">{escape_html(lit.lexical)}</span>'
        if lit.lang:
            body += f' <span class="ll-lang">@{escape_html(lit.lang)}</span>'
        elif lit.datatype not in (None, XSD_STRING, RDF_LANG_STRING):
            name = escape_html(_local_name(lit.datatype))
            title = escape_html(lit.datatype.value)
            body += f' <span class="ll-datatype" title="{title}">{name}</span>'
        return body

    def nested_html(self, value: NestedDescription, subject_depth: int) -> str:
        node_depth = subject_depth + 1
        expand_url = ""
        if self.root is not None and isinstance(value.node, BlankNodeId):
            expand_url = fragment_api_url(self.root, value.node, depth=node_depth)
        if value.truncated or not value.properties:
            html = '<span class="ll-bnode">anonymous resource</span>'
            if expand_url:
                html += " " + self.expand_button(expand_url)
            return html
        attrs = f' data-expand-url="{escape_html(expand_url)}"' if expand_url else ""
        rows = self.rows_html(value.node, value.properties, node_depth)
        return (
            f'<details class="ll-nested" open="open"{attrs}>'
            "<summary>anonymous resource</summary>"
            f'<table class="ll-props"><tbody>{rows}</tbody></table>'
            "</details>"
        )

    def rows_html(self, subject, groups, subject_depth: int) -> str:
        return "".join(self.row_html(subject, g, subject_depth) for g in groups)

    def row_html(self, subject, group: PropertyGroup, subject_depth: int) -> str:
        label = group.property_label or _local_name(group.property)
        head = self.anchor(group.property, label)
        if group.direction == "inverse":
            head += ' <span class="ll-direction">(inverse)</span>'
        items = "".join(f"<li>{self.value_html(v, subject_depth)}</li>" for v in group.values)
        cell = f'<ul class="ll-values">{items}</ul>'
        if group.total > group.shown and isinstance(subject, Iri):
            cell += (
                f'<button type="button" class="{LOAD_MORE_CLASS}"'
                f' data-uri="{escape_html(subject.value)}"'
                f' data-property="{escape_html(group.property.value)}"'
                f' data-direction="{group.direction}"'
                f' data-offset="{group.shown}"'
                f' data-limit="{group.shown}"'
                f' data-total="{group.total}">Load more</button>'
            )
        return f'<tr><th scope="row">{head}</th><td>{cell}</td></tr>'

    def table_html(self, description: ResourceDescription, depth: int = 0) -> str:
        if not description.groups:
            return '<p class="ll-empty">No statements about this resource.</p>'
        rows = self.rows_html(description.resource, description.groups, depth)
        return f'<table class="ll-properties"><tbody>{rows}</tbody></table>'


def render_page(model: PageModel) -> str:
    desc = model.description
    r = _Renderer(model.base_namespace, desc.resource)
    heading = desc.label or desc.resource.value
    title = f"{heading} · {model.site_title}"
    head = ['<meta charset="utf-8" />', f"<title>{escape_html(title)}</title>"]
    for path in model.asset_paths:
        head.append(f'<link rel="stylesheet" href="{escape_html(path)}" />')
    for label, path in model.alternate_links:
        head.append(
            f'<link rel="alternate" title="{escape_html(label)}" href="{escape_html(path)}" />'
        )
    formats = " ".join(
        f'<a href="{escape_html(path)}">{escape_html(label)}</a>'
        for label, path in model.alternate_links
    )
    body = [
        "<header>",
        f"<h1>{escape_html(heading)}</h1>",
        f'<p class="ll-iri">{r.anchor(desc.resource)}</p>',
        f'<nav class="ll-formats">{formats}</nav>',
        "</header>",
        "<main>",
        r.table_html(desc),
    ]
    for fragment, sibling in desc.siblings:
        sib_heading = sibling.label or sibling.resource.value
        body.append(f'<section class="ll-sibling" id="{escape_html(fragment)}">')
        body.append(f"<h2>{escape_html(sib_heading)}</h2>")
        body.append(f'<p class="ll-iri">{r.anchor(sibling.resource)}</p>')
        body.append(r.table_html(sibling))
        body.append("</section>")
    body.append("</main>")
    body.append(f"<footer><p>{escape_html(model.site_title)}</p></footer>")
    for path in model.script_paths:
        # module scripts defer by default and can pull lazy chunks
        body.append(f'<script type="module" src="{escape_html(path)}"></script>')
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        f"<head>{''.join(head)}</head>\n"
        f"<body>{''.join(body)}</body>\n"
        "</html>\n"
    )


def render_fragment(
    description: ResourceDescription,
    base_namespace: Iri,
    root: Optional[Iri] = None,
    depth: int = 0,
) -> str:
    """Shell-less markup for in-place insertion next to a value."""
    r = _Renderer(base_namespace, root if root is not None else description.resource)
    return f'<div class="ll-fragment">{r.table_html(description, depth)}</div>'
