"""Bundled example graphs and resolution plans.

Fixtures are addressable everywhere a file path is accepted by prefixing
``fixture:``, e.g. ``fixture:bundles_2_3``.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..graphs import ParseError, SeparatedGraph, parse_graph

FIXTURE_SCHEME = "fixture:"


def _root():
    return resources.files(__package__)


def graph_names() -> list[str]:
    out = []
    for entry in _root().iterdir():
        if entry.name.endswith(".graph"):
            out.append(entry.name[: -len(".graph")])
    return sorted(out)


def plan_names() -> list[str]:
    out = []
    for entry in _root().iterdir():
        if entry.name.endswith(".plan"):
            out.append(entry.name[: -len(".plan")])
    return sorted(out)


def graph_text(name: str) -> str:
    path = _root() / f"{name}.graph"
    try:
        return path.read_text()
    except FileNotFoundError:
        raise ParseError(f"no bundled graph named {name!r}; "
                         f"available: {', '.join(graph_names())}") from None


def plan_text(name: str) -> str:
    path = _root() / f"{name}.plan"
    try:
        return path.read_text()
    except FileNotFoundError:
        raise ParseError(f"no bundled plan named {name!r}; "
                         f"available: {', '.join(plan_names())}") from None


def load_graph(name: str) -> SeparatedGraph:
    return parse_graph(graph_text(name), name_hint=name)


def load_graph_ref(ref: str) -> SeparatedGraph:
    """Load a graph from ``fixture:NAME`` or from a file path."""
    if ref.startswith(FIXTURE_SCHEME):
        return load_graph(ref[len(FIXTURE_SCHEME):])
    text = Path(ref).read_text()
    return parse_graph(text, name_hint=Path(ref).stem)


def plan_text_ref(ref: str) -> str:
    """Read a plan from ``fixture:NAME`` or from a file path."""
    if ref.startswith(FIXTURE_SCHEME):
        return plan_text(ref[len(FIXTURE_SCHEME):])
    return Path(ref).read_text()
