"""Directed graphs with partitioned out-edges.

A graph here is a finite directed graph together with, at every non-sink
vertex, a partition of that vertex's outgoing edges into named nonempty
blocks, plus a chosen subset of "full" blocks. Full blocks are the ones whose
range projections are declared to add up to the vertex in the associated
algebra, and whose range sum equals the vertex in the associated commutative
monoid; the remaining blocks only contribute partial relations.

The module owns parsing and printing of the line-oriented description format,
structure-preserving map checking, generated subobjects, the block-collapsing
extension digraph, the sink-adjoining completion that makes every block full,
and DOT export.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping


NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_.@-]*$")


class GraphError(ValueError):
    """Raised for structurally invalid graphs or graph operations."""


class ParseError(ValueError):
    """Raised for malformed graph/expression/element text."""


def _check_name(kind: str, name: str) -> None:
    if not NAME_RE.match(name):
        raise GraphError(f"bad {kind} name {name!r}: names start with a letter "
                         "and use letters, digits, '_', '.', '@', '-'")
    if kind in ("vertex", "edge") and name.startswith("q."):
        raise GraphError(f"bad {kind} name {name!r}: the 'q.' prefix is "
                         "reserved for block residue generators")


class SeparatedGraph:
    """A finite directed graph with a block partition of each out-edge set.

    Instances are immutable after construction and hash/compare by their
    canonical printed description.
    """

    def __init__(
        self,
        name: str,
        vertices: Iterable[str],
        edges: Mapping[str, tuple[str, str]],
        blocks: Mapping[str, Iterable[str]],
        full_blocks: Iterable[str],
    ):
        _check_name("graph", name)
        self.name = name
        self.vertices: tuple[str, ...] = tuple(sorted(vertices))
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex name")
        for v in self.vertices:
            _check_name("vertex", v)
        vset = set(self.vertices)

        self._src: dict[str, str] = {}
        self._rng: dict[str, str] = {}
        for e in sorted(edges):
            _check_name("edge", e)
            if e in vset:
                raise GraphError(f"name {e!r} used for both a vertex and an edge")
            s, r = edges[e]
            if s not in vset:
                raise GraphError(f"edge {e!r}: unknown source vertex {s!r}")
            if r not in vset:
                raise GraphError(f"edge {e!r}: unknown range vertex {r!r}")
            self._src[e] = s
            self._rng[e] = r
        self.edges: tuple[str, ...] = tuple(sorted(self._src))
        eset = set(self.edges)

        self._block_edges: dict[str, tuple[str, ...]] = {}
        self._block_vertex: dict[str, str] = {}
        self._block_of: dict[str, str] = {}
        for x in sorted(blocks):
            _check_name("block", x)
            if x in self._block_edges:
                raise GraphError(f"duplicate block name {x!r}")
            members = tuple(sorted(blocks[x]))
            if not members:
                raise GraphError(f"block {x!r} is empty")
            for e in members:
                if e not in eset:
                    raise GraphError(f"block {x!r}: unknown edge {e!r}")
                if e in self._block_of:
                    raise GraphError(f"edge {e!r} appears in two blocks")
                self._block_of[e] = x
            sources = {self._src[e] for e in members}
            if len(sources) != 1:
                raise GraphError(f"block {x!r} mixes edges from different vertices")
            self._block_edges[x] = members
            self._block_vertex[x] = next(iter(sources))
        uncovered = eset - set(self._block_of)
        if uncovered:
            raise GraphError(f"edges not covered by any block: {sorted(uncovered)}")

        self.full_blocks: frozenset[str] = frozenset(full_blocks)
        for x in self.full_blocks:
            if x not in self._block_edges:
                raise GraphError(f"unknown full block {x!r}")

        at: dict[str, list[str]] = {v: [] for v in self.vertices}
        for x, v in self._block_vertex.items():
            at[v].append(x)
        self._blocks_at: dict[str, tuple[str, ...]] = {
            v: tuple(sorted(bs)) for v, bs in at.items()
        }
        self._key = print_graph(self)

    # -- lookups ---------------------------------------------------------

    def src(self, e: str) -> str:
        return self._src[e]

    def rng(self, e: str) -> str:
        return self._rng[e]

    def out_edges(self, v: str) -> tuple[str, ...]:
        return tuple(e for e in self.edges if self._src[e] == v)

    def blocks_at(self, v: str) -> tuple[str, ...]:
        return self._blocks_at[v]

    def all_blocks(self) -> tuple[str, ...]:
        return tuple(sorted(self._block_edges))

    def block_edges(self, x: str) -> tuple[str, ...]:
        return self._block_edges[x]

    def block_vertex(self, x: str) -> str:
        return self._block_vertex[x]

    def block_of(self, e: str) -> str:
        return self._block_of[e]

    def is_sink(self, v: str) -> bool:
        return not self._blocks_at[v]

    def is_full(self, x: str) -> bool:
        return x in self.full_blocks

    def has_vertex(self, v: str) -> bool:
        return v in self._blocks_at

    def has_edge(self, e: str) -> bool:
        return e in self._src

    # -- identity --------------------------------------------------------

    def key(self) -> str:
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SeparatedGraph) and other._key == self._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return (f"SeparatedGraph({self.name!r}: {len(self.vertices)} vertices, "
                f"{len(self.edges)} edges, {len(self._block_edges)} blocks)")


def with_full_blocks(g: SeparatedGraph, full: Iterable[str]) -> SeparatedGraph:
    """The same graph with a different choice of full blocks."""
    return SeparatedGraph(
        g.name,
        g.vertices,
        {e: (g.src(e), g.rng(e)) for e in g.edges},
        {x: g.block_edges(x) for x in g.all_blocks()},
        full,
    )


# -- parsing and printing -------------------------------------------------


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_graph(text: str, name_hint: str = "") -> SeparatedGraph:
    """Parse the line-oriented graph description format.

    Statements: ``graph NAME``, ``vertex v1 v2 ...``,
    ``edge e : v -> w``, ``partition v { X = e1 e2 ; Y = f1 }``
    (the braces may span lines), and ``s X Y`` / ``s *`` / ``s -``.
    ``#`` starts a comment.
    """
    logical: list[tuple[int, str]] = []
    pending: tuple[int, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if pending is not None:
            pending = (pending[0], pending[1] + " " + line)
            if "}" in line:
                logical.append(pending)
                pending = None
            continue
        if line.startswith("partition") and "{" in line and "}" not in line:
            pending = (lineno, line)
            continue
        logical.append((lineno, line))
    if pending is not None:
        raise ParseError(f"line {pending[0]}: unterminated partition block")

    name = name_hint or "unnamed"
    saw_header = False
    vertices: list[str] = []
    edges: dict[str, tuple[str, str]] = {}
    blocks: dict[str, list[str]] = {}
    s_decl: tuple[int, list[str]] | None = None

    for lineno, line in logical:
        words = line.replace("{", " { ").replace("}", " } ") \
                    .replace(";", " ; ").replace("=", " = ").split()
        head = words[0]
        if head == "graph":
            if len(words) != 2:
                raise ParseError(f"line {lineno}: expected 'graph NAME'")
            name = words[1]
            saw_header = True
        elif head == "vertex":
            if len(words) < 2:
                raise ParseError(f"line {lineno}: 'vertex' needs at least one name")
            vertices.extend(words[1:])
        elif head == "edge":
            m = re.match(r"^edge\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$", line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'edge e : v -> w'")
            e, s, r = m.groups()
            if e in edges:
                raise ParseError(f"line {lineno}: duplicate edge name {e!r}")
            edges[e] = (s, r)
        elif head == "partition":
            if len(words) < 4 or words[2] != "{" or words[-1] != "}":
                raise ParseError(f"line {lineno}: expected "
                                 "'partition v { X = e1 e2 ; Y = f1 }'")
            inner = words[3:-1]
            for group in _split_on(inner, ";"):
                if len(group) < 3 or group[1] != "=":
                    raise ParseError(f"line {lineno}: expected 'BLOCK = edges...'")
                bname, members = group[0], group[2:]
                if bname in blocks:
                    raise ParseError(f"line {lineno}: duplicate block name {bname!r}")
                blocks[bname] = members
        elif head == "s":
            if s_decl is not None:
                raise ParseError(f"line {lineno}: duplicate 's' declaration")
            s_decl = (lineno, words[1:])
        else:
            raise ParseError(f"line {lineno}: unknown statement {head!r}")

    if not saw_header and not name_hint:
        raise ParseError("missing 'graph NAME' header")

    if s_decl is None or s_decl[1] == ["-"]:
        full: list[str] = []
    elif s_decl[1] == ["*"]:
        full = list(blocks)
    else:
        full = s_decl[1]
        for x in full:
            if x not in blocks:
                raise ParseError(f"line {s_decl[0]}: unknown block {x!r} in 's'")

    try:
        return SeparatedGraph(name, vertices, edges, blocks, full)
    except GraphError as exc:
        raise GraphError(f"graph {name!r}: {exc}") from exc


def _split_on(tokens: list[str], sep: str) -> list[list[str]]:
    out: list[list[str]] = [[]]
    for t in tokens:
        if t == sep:
            out.append([])
        else:
            out[-1].append(t)
    return [g for g in out if g]


def print_graph(g: SeparatedGraph) -> str:
    """Canonical text form; ``parse_graph(print_graph(g)) == g``."""
    lines = [f"graph {g.name}"]
    if g.vertices:
        lines.append("vertex " + " ".join(g.vertices))
    for e in g.edges:
        lines.append(f"edge {e} : {g.src(e)} -> {g.rng(e)}")
    for v in g.vertices:
        bs = g.blocks_at(v)
        if not bs:
            continue
        parts = " ; ".join(f"{x} = " + " ".join(g.block_edges(x)) for x in bs)
        lines.append(f"partition {v} {{ {parts} }}")
    all_blocks = g.all_blocks()
    if not all_blocks or not g.full_blocks:
        lines.append("s -")
    elif set(all_blocks) == set(g.full_blocks):
        lines.append("s *")
    else:
        lines.append("s " + " ".join(sorted(g.full_blocks)))
    return "\n".join(lines) + "\n"


# -- structure-preserving maps --------------------------------------------


@dataclass(frozen=True)
class GraphMorphism:
    source: SeparatedGraph
    target: SeparatedGraph
    vertex_map: tuple[tuple[str, str], ...]
    edge_map: tuple[tuple[str, str], ...]

    @staticmethod
    def of(source: SeparatedGraph, target: SeparatedGraph,
           vertex_map: Mapping[str, str], edge_map: Mapping[str, str]) -> "GraphMorphism":
        return GraphMorphism(source, target,
                             tuple(sorted(vertex_map.items())),
                             tuple(sorted(edge_map.items())))

    @property
    def vmap(self) -> dict[str, str]:
        return dict(self.vertex_map)

    @property
    def emap(self) -> dict[str, str]:
        return dict(self.edge_map)


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    failures: tuple[str, ...]
    block_map: tuple[tuple[str, str], ...] | None

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


def check_morphism(m: GraphMorphism) -> MorphismReport:
    """Check the three conditions for a map of partitioned graphs.

    (1) the vertex map is total, lands in the target, commutes with
        source/range, and is injective;
    (2) each block maps injectively into a single target block (yielding the
        induced block map);
    (3) full blocks map onto full target blocks bijectively.

    Failures are reported in that order; the induced block map is included
    when condition (2) holds for every block.
    """
    g, h = m.source, m.target
    vmap, emap = m.vmap, m.emap
    failures: list[str] = []

    for v in g.vertices:
        if v not in vmap:
            failures.append(f"condition 1: vertex {v!r} has no image")
        elif not h.has_vertex(vmap[v]):
            failures.append(f"condition 1: image vertex {vmap[v]!r} not in target")
    for e in g.edges:
        if e not in emap:
            failures.append(f"condition 1: edge {e!r} has no image")
        elif not h.has_edge(emap[e]):
            failures.append(f"condition 1: image edge {emap[e]!r} not in target")
    if failures:
        return MorphismReport(False, tuple(failures), None)

    seen: dict[str, str] = {}
    for v in g.vertices:
        if vmap[v] in seen:
            failures.append(f"condition 1: vertices {seen[vmap[v]]!r} and {v!r} "
                            f"share the image {vmap[v]!r}")
        seen[vmap[v]] = v
    for e in g.edges:
        if h.src(emap[e]) != vmap[g.src(e)]:
            failures.append(f"condition 1: edge {e!r} image source mismatch")
        if h.rng(emap[e]) != vmap[g.rng(e)]:
            failures.append(f"condition 1: edge {e!r} image range mismatch")
    if failures:
        return MorphismReport(False, tuple(failures), None)

    block_map: dict[str, str] = {}
    block_ok = True
    for x in g.all_blocks():
        members = g.block_edges(x)
        images = [emap[e] for e in members]
        if len(set(images)) != len(images):
            failures.append(f"condition 2: block {x!r} does not map injectively")
            block_ok = False
            continue
        targets = {h.block_of(e) for e in images}
        if len(targets) != 1:
            failures.append(f"condition 2: block {x!r} maps into several target "
                            f"blocks {sorted(targets)}")
            block_ok = False
            continue
        block_map[x] = next(iter(targets))

    for x in sorted(g.full_blocks):
        if x not in block_map:
            continue
        y = block_map[x]
        if not h.is_full(y):
            failures.append(f"condition 3: full block {x!r} maps into the "
                            f"non-full block {y!r}")
        elif len(g.block_edges(x)) != len(h.block_edges(y)):
            failures.append(f"condition 3: full block {x!r} does not map onto "
                            f"{y!r} ({len(g.block_edges(x))} vs "
                            f"{len(h.block_edges(y))} edges)")

    ok = not failures
    bm = tuple(sorted(block_map.items())) if block_ok else None
    return MorphismReport(ok, tuple(failures), bm)


# -- generated subobjects --------------------------------------------------


def finite_complete_subobject(
    g: SeparatedGraph, items: Iterable[str]
) -> tuple[SeparatedGraph, GraphMorphism]:
    """The smallest subobject containing the given vertices and edges.

    Starting from the listed items, first take the subgraph they generate,
    then close each collected vertex's edge set: keep its collected out-edges
    and pull in every full block that the collected edges touch (full blocks
    must be present in whole when present at all). Range vertices of pulled-in
    edges are added as sinks of the subobject. Returns the subobject and the
    inclusion map; the inclusion always satisfies ``check_morphism``.
    """
    items = list(items)
    seed_edges: set[str] = set()
    seed_verts: set[str] = set()
    for it in items:
        if g.has_edge(it):
            seed_edges.add(it)
        elif g.has_vertex(it):
            seed_verts.add(it)
        else:
            raise GraphError(f"unknown item {it!r}")
    for e in seed_edges:
        seed_verts.add(g.src(e))
        seed_verts.add(g.rng(e))

    f_edges: set[str] = set()
    for v in sorted(seed_verts):
        for e in g.out_edges(v):
            if e in seed_edges:
                f_edges.add(e)
        for x in g.blocks_at(v):
            if g.is_full(x) and any(e in seed_edges for e in g.block_edges(x)):
                f_edges.update(g.block_edges(x))

    f_verts = set(seed_verts)
    for e in f_edges:
        f_verts.add(g.src(e))
        f_verts.add(g.rng(e))

    blocks: dict[str, list[str]] = {}
    full: list[str] = []
    for x in g.all_blocks():
        members = [e for e in g.block_edges(x) if e in f_edges]
        if members:
            blocks[x] = members
            if g.is_full(x):
                full.append(x)

    sub = SeparatedGraph(
        f"{g.name}.sub",
        sorted(f_verts),
        {e: (g.src(e), g.rng(e)) for e in f_edges},
        blocks,
        full,
    )
    incl = GraphMorphism.of(sub, g, {v: v for v in sub.vertices},
                            {e: e for e in sub.edges})
    report = check_morphism(incl)
    assert report.ok, f"inclusion must be structure preserving: {report.failures}"
    return sub, incl


# -- block-collapsing extension --------------------------------------------


@dataclass(frozen=True)
class ExtensionGraph:
    """Plain digraph obtained by adjoining one sink per non-full block.

    Every non-full block X becomes a fresh sink vertex with a single new edge
    from the block's source vertex; full blocks contribute nothing. Hereditary
    subsets of this digraph (with two saturation rules) mirror the admissible
    pairs of the original graph.
    """

    name: str
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (name, source, range)
    block_vertex: tuple[tuple[str, str], ...]  # block name -> adjoined vertex

    @property
    def block_vertex_map(self) -> dict[str, str]:
        return dict(self.block_vertex)

    def out_neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(r for _, s, r in self.edges if s == v))


def cs_extension(g: SeparatedGraph) -> ExtensionGraph:
    taken = set(g.vertices) | set(g.edges)
    block_vertex: dict[str, str] = {}
    for x in g.all_blocks():
        if g.is_full(x):
            continue
        cand = x
        while cand in taken:
            cand = cand + "@blk"
        block_vertex[x] = cand
        taken.add(cand)

    vertices = list(g.vertices) + sorted(block_vertex.values())
    edges = [(e, g.src(e), g.rng(e)) for e in g.edges]
    for x, bv in sorted(block_vertex.items()):
        edges.append((f"xe@{x}", g.block_vertex(x), bv))
    return ExtensionGraph(
        f"{g.name}.ext",
        tuple(sorted(vertices)),
        tuple(sorted(edges)),
        tuple(sorted(block_vertex.items())),
    )


# -- sink-adjoining completion ---------------------------------------------


def remove_s(g: SeparatedGraph) -> tuple[SeparatedGraph, dict[str, str]]:
    """Make every block full by absorbing each partial block's remainder.

    Each non-full block X receives one fresh sink vertex and one fresh edge
    from X's source vertex into that sink, after which the enlarged block is
    declared full. The returned dictionary sends each previously non-full
    block name to its adjoined sink vertex, which represents that block's
    residue generator in the monoid of the new graph. Applying the operation
    twice changes nothing (the second pass has no non-full blocks).
    """
    partial = [x for x in g.all_blocks() if not g.is_full(x)]
    if not partial:
        return g, {}

    taken = set(g.vertices) | set(g.edges)

    def fresh(base: str) -> str:
        cand = base
        while cand in taken:
            cand = cand + "@x"
        taken.add(cand)
        return cand

    sink_of: dict[str, str] = {}
    edge_of: dict[str, str] = {}
    for x in partial:
        sink_of[x] = fresh(f"w@{x}")
        edge_of[x] = fresh(f"f@{x}")

    vertices = list(g.vertices) + [sink_of[x] for x in partial]
    edges = {e: (g.src(e), g.rng(e)) for e in g.edges}
    blocks = {x: list(g.block_edges(x)) for x in g.all_blocks()}
    for x in partial:
        edges[edge_of[x]] = (g.block_vertex(x), sink_of[x])
        blocks[x].append(edge_of[x])

    out = SeparatedGraph(f"{g.name}.full", vertices, edges, blocks,
                         g.all_blocks())
    return out, sink_of


# -- DOT export -------------------------------------------------------------


_PALETTE = (
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a",
    "#66a61e", "#e6ab02", "#a6761d", "#666666",
)


def dot_export(g: SeparatedGraph) -> str:
    """Deterministic DOT text; blocks are shown as edge color/label groups."""
    color: dict[str, str] = {}
    for i, x in enumerate(g.all_blocks()):
        color[x] = _PALETTE[i % len(_PALETTE)]
    lines = [f'digraph "{g.name}" {{', "  rankdir=LR;"]
    for v in g.vertices:
        shape = "doublecircle" if g.is_sink(v) else "circle"
        lines.append(f'  "{v}" [shape={shape}];')
    for e in g.edges:
        x = g.block_of(e)
        mark = "*" if g.is_full(x) else ""
        lines.append(f'  "{g.src(e)}" -> "{g.rng(e)}" '
                     f'[label="{e} [{x}{mark}]", color="{color[x]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def extension_dot(x: ExtensionGraph) -> str:
    block_verts = {bv for _, bv in x.block_vertex}
    lines = [f'digraph "{x.name}" {{', "  rankdir=LR;"]
    for v in x.vertices:
        shape = "box" if v in block_verts else "circle"
        lines.append(f'  "{v}" [shape={shape}];')
    for name, s, r in x.edges:
        lines.append(f'  "{s}" -> "{r}" [label="{name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
