"""Command line entry point.

Exit codes: 0 clean shutdown, 1 configuration error, 2 bind failure.
"""

import argparse
import logging
import signal
import sys
import threading
from pathlib import Path
from typing import Optional

from .model import parse_iri
from .server import LodServer, ServerConfig
from .store import EndpointConfig, MemoryStore, SparqlGateway, Store

logger = logging.getLogger("lodlens.cli")

_CONFIG_KEYS = {
    "address",
    "port",
    "endpoint",
    "base_namespace",
    "page_size",
    "site_title",
    "fixtures",
}


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # bad usage is a config error (exit 1), not argparse's exit 2
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lodlens", description="Linked Data front end for RDF datasets.")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--address", help="listen address (default 127.0.0.1)")
    parser.add_argument("--port", type=int, help="listen port (default 8080)")
    parser.add_argument("--endpoint", help="SPARQL endpoint URL")
    parser.add_argument("--base-namespace", help="URI prefix this server answers for")
    parser.add_argument("--page-size", type=int, help="values per property page")
    parser.add_argument("--site-title", help="title shown in page chrome")
    parser.add_argument("--fixtures", help="Turtle file served from memory instead of an endpoint")
    return parser


def load_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def resolve_settings(args: argparse.Namespace) -> dict[str, str]:
    """File values first, flags override."""
    settings: dict[str, str] = {}
    if args.config:
        settings.update(load_config_file(Path(args.config)))
    for key in _CONFIG_KEYS - {"base_namespace"}:
        value = getattr(args, key)
        if value is not None:
            settings[key] = str(value)
    if args.base_namespace is not None:
        settings["base_namespace"] = args.base_namespace
    return settings


def prepare(settings: dict[str, str]) -> tuple[ServerConfig, Store]:
    if "base_namespace" not in settings:
        raise ValueError("base_namespace is required (flag or config file)")
    endpoint_url = settings.get("endpoint")
    fixtures = settings.get("fixtures")
    if bool(endpoint_url) == bool(fixtures):
        raise ValueError("exactly one of endpoint and fixtures must be configured")
    config = ServerConfig(
        base_namespace=parse_iri(settings["base_namespace"]),
        endpoint=EndpointConfig(endpoint_url=parse_iri(endpoint_url)) if endpoint_url else None,
        address=settings.get("address", "127.0.0.1"),
        port=int(settings.get("port", "8080")),
        page_size=int(settings.get("page_size", "50")),
        site_title=settings.get("site_title", "lodlens"),
    )
    if fixtures:
        store: Store = MemoryStore.from_turtle(Path(fixtures).read_text(encoding="utf-8"))
    else:
        store = SparqlGateway(config.endpoint)
    return config, store


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    try:
        args = build_parser().parse_args(argv)
        config, store = prepare(resolve_settings(args))
    except (ValueError, OSError) as exc:
        print(f"lodlens: {exc}", file=sys.stderr)
        return 1
    try:
        server = LodServer(config, store)
    except OSError as exc:
        print(f"lodlens: cannot bind {config.address}:{config.port}: {exc}", file=sys.stderr)
        return 2

    def request_shutdown(signum, frame):
        # no logging or other IO here: the handler may interrupt a write
        threading.Thread(target=server.shutdown, daemon=True).start()

    previous = {}
    for sig in (signal.SIGINT, signal.SIGTERM):
        previous[sig] = signal.signal(sig, request_shutdown)
    logger.info("serving %s at %s", config.base_namespace.value, server.url)
    try:
        server.serve_forever()
    finally:
        server.server_close()
        for sig, handler in previous.items():
            signal.signal(sig, handler)
    logger.info("shut down cleanly")
    return 0


if __name__ == "__main__":
    sys.exit(main())
