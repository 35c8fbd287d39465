"""HTTP front end: URI dereferencing, content negotiation, and the two
JSON/fragment APIs the browser script talks to.

The request path is taken as raw bytes, percent-decoded byte-wise and
then UTF-8 decoded exactly once, so both the encoded and the raw form
of a Cyrillic URL name the same resource. No charset guessing anywhere.
"""

import json
import logging
from dataclasses import dataclass, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Union

from .describe import BuilderConfig, build_description, build_node_description, mark_math
from .model import (
    RDF_NS,
    XSD_STRING,
    BlankNodeId,
    InvalidIriError,
    Iri,
    Literal,
    _canonicalize_escapes,
    parse_iri,
    split_hash,
    union,
)
from .pages import PageModel, render_fragment, render_page, resource_href
from .store import (
    EndpointConfig,
    EndpointError,
    EndpointTimeout,
    EndpointUnreachable,
    Store,
    StoreError,
)
from .turtle import serialize_ntriples, serialize_turtle

logger = logging.getLogger("lodlens.server")

_STATIC_DIR = Path(__file__).parent / "static"
_RDF_LANG_STRING = Iri(RDF_NS + "langString")


# --- routing decisions ----------------------------------------------------


@dataclass(frozen=True)
class Redirect303:
    target: str


@dataclass(frozen=True)
class Serve:
    format: str  # "html" | "turtle" | "ntriples"
    resource_path: str


@dataclass(frozen=True)
class BadRequest:
    reason: str


@dataclass(frozen=True)
class NotFound:
    pass


RouteDecision = Union[Redirect303, Serve, BadRequest, NotFound]

_SUFFIXES = ((".html", "html"), (".ttl", "turtle"), (".nt", "ntriples"), (".n3", "turtle"))
_EXTENSION = {"html": ".html", "turtle": ".ttl", "ntriples": ".nt"}
_CONTENT_TYPE = {
    "html": "text/html; charset=utf-8",
    "turtle": "text/turtle; charset=utf-8",
    "ntriples": "application/n-triples; charset=utf-8",
}


def decode_path(raw: bytes) -> str:
    """Raw request-target bytes to a canonical decoded resource path.

    One strict UTF-8 decode, then the same escape canonicalization the
    IRI model applies: unreserved ASCII and UTF-8 runs decode, escapes
    of reserved delimiters stay escaped. The path therefore concatenates
    with base_namespace into a canonical IRI with no further rewriting.
    """
    return _canonicalize_escapes(raw.decode("utf-8"))


def _decode_component(raw: bytes) -> str:
    """Full percent-decode for opaque query components."""
    out = bytearray()
    i = 0
    while i < len(raw):
        byte = raw[i]
        if byte == 0x25:  # '%'
            escape = raw[i + 1 : i + 3]
            if len(escape) != 2 or not all(chr(b) in "0123456789abcdefABCDEF" for b in escape):
                raise ValueError(f"malformed percent escape at byte {i}")
            out.append(int(escape, 16))
            i += 3
        else:
            out.append(byte)
            i += 1
    return out.decode("utf-8")


def parse_query(raw_query: bytes) -> dict[str, str]:
    params: dict[str, str] = {}
    for part in raw_query.split(b"&"):
        if not part:
            continue
        key, _, value = part.partition(b"=")
        params[_decode_component(key.replace(b"+", b" "))] = _decode_component(
            value.replace(b"+", b" ")
        )
    return params


def _ascii_location(path: str) -> str:
    """Header-safe form of a canonical path: only non-ASCII re-encodes,
    so existing escapes and raw delimiters survive one round trip."""
    out = []
    for ch in path:
        if ord(ch) < 0x80:
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
    return "".join(out)


def preferred_format(accept: Optional[str]) -> str:
    """Best of html/turtle/ntriples for an Accept header; ties and
    wildcards fall back to the machine default, Turtle."""
    if accept is None or not accept.strip():
        return "turtle"
    quality = {"text/html": 0.0, "text/turtle": 0.0, "application/n-triples": 0.0}
    any_wild = text_wild = app_wild = 0.0
    for clause in accept.split(","):
        bits = clause.strip().split(";")
        media = bits[0].strip().lower()
        q = 1.0
        for param in bits[1:]:
            param = param.strip()
            if param.startswith("q="):
                try:
                    q = float(param[2:])
                except ValueError:
                    q = 0.0
        if media == "*/*":
            any_wild = max(any_wild, q)
        elif media == "text/*":
            text_wild = max(text_wild, q)
        elif media == "application/*":
            app_wild = max(app_wild, q)
        elif media in quality:
            quality[media] = max(quality[media], q)
    effective = {
        "html": max(quality["text/html"], text_wild, any_wild),
        "turtle": max(quality["text/turtle"], text_wild, any_wild),
        "ntriples": max(quality["application/n-triples"], app_wild, any_wild),
    }
    best = max(effective.values())
    if best <= 0.0:
        return "turtle"
    for fmt in ("turtle", "html", "ntriples"):
        if effective[fmt] == best:
            return fmt
    raise AssertionError("unreachable")


def negotiate(path: str, accept: Optional[str]) -> Union[Redirect303, Serve]:
    """Suffix wins over Accept; extensionless paths get a 303."""
    for suffix, fmt in _SUFFIXES:
        if path.endswith(suffix):
            return Serve(fmt, path[: -len(suffix)])
    return Redirect303(path + _EXTENSION[preferred_format(accept)])


# --- configuration ----------------------------------------------------------


@dataclass(frozen=True)
class ServerConfig:
    base_namespace: Iri
    endpoint: Optional[EndpointConfig] = None
    builder: BuilderConfig = BuilderConfig()
    address: str = "127.0.0.1"
    port: int = 8080
    page_size: int = 50
    site_title: str = "lodlens"

    def __post_init__(self) -> None:
        parsed = parse_iri(self.base_namespace.value)  # must be an absolute IRI
        if parsed.value != self.base_namespace.value:
            raise ValueError("base_namespace must be in canonical decoded form")
        if "#" in self.base_namespace.value:
            raise ValueError("base_namespace cannot contain a fragment")
        if self.page_size < 1:
            raise ValueError("page_size must be positive")
        if not 0 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")


# --- request handling --------------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    server_version = "lodlens"
    protocol_version = "HTTP/1.1"

    # quiet by default; the CLI turns logging on
    def log_message(self, fmt, *args):
        logger.info("%s " + fmt, self.address_string(), *args)

    @property
    def cfg(self) -> ServerConfig:
        return self.server.config

    @property
    def store(self) -> Store:
        return self.server.store

    def _send(self, status: int, content_type: Optional[str], body: bytes, headers=()) -> None:
        self.send_response(status)
        for name, value in headers:
            self.send_header(name, value)
        if content_type is not None:
            self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_text(self, status: int, message: str, headers=()) -> None:
        self._send(status, "text/plain; charset=utf-8", f"{message}\n".encode("utf-8"), headers)

    def do_GET(self) -> None:
        # http.server decodes the request line as latin-1, which is
        # byte-transparent; undo it to recover the raw target
        raw = self.path.encode("latin-1")
        raw_path, _, raw_query = raw.partition(b"?")
        try:
            path = decode_path(raw_path)
            params = parse_query(raw_query)
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_text(400, f"bad request: {exc}")
            return
        # defensive: fragments never reach a well-behaved server
        path = path.split("#", 1)[0]
        try:
            if path.startswith("/static/"):
                self._serve_static(path)
            elif path == "/api/fragment":
                self._serve_fragment(params)
            elif path == "/api/values":
                self._serve_values(params)
            else:
                self._serve_resource(path)
        except EndpointTimeout as exc:
            self._send_text(504, f"SPARQL endpoint timed out: {exc}")
        except (EndpointUnreachable, EndpointError, StoreError) as exc:
            self._send_text(502, f"SPARQL endpoint failure: {exc}")

    def _serve_static(self, path: str) -> None:
        name = path[len("/static/") :]
        target = _STATIC_DIR / name
        if "/" in name or not name or not target.is_file():
            self._send_text(404, "no such asset")
            return
        types = {".css": "text/css; charset=utf-8", ".js": "application/javascript; charset=utf-8"}
        content_type = types.get(target.suffix, "application/octet-stream")
        self._send(200, content_type, target.read_bytes())

    def _serve_resource(self, path: str) -> None:
        decision = negotiate(path, self.headers.get("Accept"))
        resource_path = path if isinstance(decision, Redirect303) else decision.resource_path
        resource = Iri(self.cfg.base_namespace.value.rstrip("/") + resource_path)
        try:
            parse_iri(resource.value)
        except InvalidIriError as exc:
            self._send_text(400, f"bad resource path: {exc}")
            return
        if not self.store.ask_exists(resource):
            self._send_text(404, f"resource not found: {resource.value}")
            return
        if isinstance(decision, Redirect303):
            location = _ascii_location(decision.target)
            self._send(303, None, b"", headers=(("Location", location), ("Vary", "Accept")))
            return
        bundle = self.store.fetch_description(resource, self.cfg.page_size)
        if decision.format == "html":
            description = build_description(bundle, resource, self.cfg.builder)
            model = PageModel(
                description=description,
                base_namespace=self.cfg.base_namespace,
                alternate_links=(
                    ("Turtle", decision.resource_path + ".ttl"),
                    ("N-Triples", decision.resource_path + ".nt"),
                ),
                site_title=self.cfg.site_title,
            )
            body = render_page(model)
        elif decision.format == "turtle":
            body = serialize_turtle(union(bundle.direct, bundle.inverse))
        else:
            body = serialize_ntriples(union(bundle.direct, bundle.inverse))
        self._send(200, _CONTENT_TYPE[decision.format], body.encode("utf-8"))

    def _fragment_root(self, params: dict[str, str]):
        """(bundle root IRI, node to describe) for a fragment request."""
        resource = parse_iri(params["uri"])
        base, fragment = split_hash(resource)
        if "bnode" in params:
            return base, BlankNodeId(params["bnode"])
        return base, (resource if fragment is not None else base)

    def _serve_fragment(self, params: dict[str, str]) -> None:
        if "uri" not in params:
            self._send_text(400, "missing uri parameter")
            return
        try:
            base, node = self._fragment_root(params)
            depth = int(params.get("depth", "0"))
        except (InvalidIriError, ValueError) as exc:
            self._send_text(400, f"bad fragment request: {exc}")
            return
        if not 0 <= depth <= 32:
            self._send_text(400, f"depth out of range: {depth}")
            return
        # fetch deep enough that the addressed node's own triples are present
        bundle = self.store.fetch_description(
            base, self.cfg.page_size, closure_depth=max(3, depth)
        )
        shallow = replace(self.cfg.builder, max_nesting_depth=1)
        description = build_node_description(bundle, node, shallow)
        if description is None:
            self._send_text(404, "no such resource in this description")
            return
        body = render_fragment(description, self.cfg.base_namespace, root=base, depth=depth)
        self._send(200, "text/html; charset=utf-8", body.encode("utf-8"))

    def _serve_values(self, params: dict[str, str]) -> None:
        try:
            resource = parse_iri(params["uri"])
            prop = parse_iri(params["property"])
        except KeyError as exc:
            self._send_text(400, f"missing parameter: {exc.args[0]}")
            return
        except InvalidIriError as exc:
            self._send_text(400, f"bad IRI parameter: {exc}")
            return
        direction = params.get("direction", "direct")
        if direction not in ("direct", "inverse"):
            self._send_text(400, f"bad direction: {direction}")
            return
        try:
            offset = int(params.get("offset", "0"))
            limit = int(params.get("limit", str(self.cfg.page_size)))
        except ValueError as exc:
            self._send_text(400, f"bad paging parameter: {exc}")
            return
        if offset < 0 or limit < 1 or limit > self.cfg.page_size:
            self._send_text(400, "paging parameters out of range")
            return
        values, total = self.store.fetch_property_page(resource, prop, direction, offset, limit)
        payload = {
            "values": [self._value_json(v) for v in values],
            "offset": offset,
            "limit": limit,
            "total": total,
        }
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self._send(200, "application/json; charset=utf-8", body)

    def _value_json(self, term) -> dict:
        if isinstance(term, Literal):
            value = {"kind": "literal", "text": term.lexical, "is_math": mark_math(term, self.cfg.builder)}
            if term.lang:
                value["language"] = term.lang
            elif term.datatype not in (None, XSD_STRING, _RDF_LANG_STRING):
                value["datatype"] = term.datatype.value
            return value
        if isinstance(term, Iri):
            return {
                "kind": "iri",
                "text": term.value,
                "link": resource_href(term, self.cfg.base_namespace),
                "is_math": False,
            }
        return {"kind": "bnode", "text": "_:" + term.label, "is_math": False}


class LodServer(ThreadingHTTPServer):
    """Shares only the immutable config and the store handle across
    handler threads; shutdown() drains in-flight requests."""

    def __init__(self, config: ServerConfig, store: Store) -> None:
        self.config = config
        self.store = store
        super().__init__((config.address, config.port), _Handler)

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"
