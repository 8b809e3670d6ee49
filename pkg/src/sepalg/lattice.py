"""Closed vertex sets, the pair lattice, simplicity, and cofinality.

A vertex set is closed when it absorbs edge ranges (hereditary) and pulls in
the source of any full block whose ranges it already contains (saturated).
Pairs of a closed set and a choice of boundary residue blocks form a lattice
that mirrors both the order ideals of the graph monoid and the trace ideals
of the algebra; this module enumerates that lattice two independent ways and
decides simplicity and cofinality with explicit certificates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphs import SeparatedGraph, cs_extension
from .monoid import Budget, PiResult, _g_of, pi_homomorphism


class LatticeError(ValueError):
    pass


# -- closures ----------------------------------------------------------------


def hereditary_closure(g: SeparatedGraph, seed: Iterable[str]) -> frozenset[str]:
    """Smallest vertex set containing the seed and all ranges reachable
    along edges."""
    out = set()
    stack = list(seed)
    for v in stack:
        if not g.has_vertex(v):
            raise LatticeError(f"unknown vertex {v!r}")
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        for e in g.out_edges(v):
            stack.append(g.rng(e))
    return frozenset(out)


def saturation_closure(g: SeparatedGraph, seed: Iterable[str]) -> frozenset[str]:
    """Smallest closed vertex set containing the seed.

    Alternates the hereditary closure with the saturation rule (a full block
    all of whose ranges lie inside forces its source inside) until neither
    adds a vertex.
    """
    current = hereditary_closure(g, seed)
    while True:
        added = set(current)
        for x in g.all_blocks():
            if not g.is_full(x):
                continue
            if g.block_vertex(x) in added:
                continue
            if all(g.rng(e) in current for e in g.block_edges(x)):
                added.add(g.block_vertex(x))
        if added == current:
            return frozenset(current)
        current = hereditary_closure(g, added)


def is_closed(g: SeparatedGraph, h: Iterable[str]) -> bool:
    hset = frozenset(h)
    return saturation_closure(g, hset) == hset if hset else True


def hereditary_saturated_sets(g: SeparatedGraph,
                              method: str = "closure") -> list[frozenset[str]]:
    """All closed vertex sets, smallest first.

    Two independent constructions are available: ``closure`` generates the
    family from singleton closures and pairwise joins; ``filter`` tests every
    subset (guarded) against the two defining conditions directly.
    """
    if method == "closure":
        family: set[frozenset[str]] = {frozenset()}
        for v in g.vertices:
            family.add(saturation_closure(g, [v]))
        changed = True
        while changed:
            changed = False
            for a, b in itertools.combinations(sorted(family, key=sorted), 2):
                join = saturation_closure(g, a | b) if (a | b) else frozenset()
                if join not in family:
                    family.add(join)
                    changed = True
        return sorted(family, key=lambda s: (len(s), sorted(s)))
    if method == "filter":
        n = len(g.vertices)
        if n > 16:
            raise LatticeError("filter method is limited to 16 vertices")
        out = []
        for bits in range(1 << n):
            h = frozenset(v for i, v in enumerate(g.vertices) if bits >> i & 1)
            if _hereditary_ok(g, h) and _saturated_ok(g, h):
                out.append(h)
        return sorted(out, key=lambda s: (len(s), sorted(s)))
    raise LatticeError(f"unknown method {method!r}")


def _hereditary_ok(g: SeparatedGraph, h: frozenset[str]) -> bool:
    return all(g.rng(e) in h for v in h for e in g.out_edges(v))


def _saturated_ok(g: SeparatedGraph, h: frozenset[str]) -> bool:
    for x in g.all_blocks():
        if not g.is_full(x) or g.block_vertex(x) in h:
            continue
        if all(g.rng(e) in h for e in g.block_edges(x)):
            return False
    return True


# -- admissible pairs --------------------------------------------------------


def residue_blocks(g: SeparatedGraph, h: Iterable[str]) -> frozenset[str]:
    """Non-full blocks with at least one range outside the vertex set."""
    return _g_of(g, frozenset(h))


def blocks_inside(g: SeparatedGraph, h: Iterable[str]) -> frozenset[str]:
    """Blocks whose source vertex lies in the vertex set."""
    hset = frozenset(h)
    return frozenset(x for x in g.all_blocks() if g.block_vertex(x) in hset)


@dataclass(frozen=True)
class AdmissiblePair:
    h: frozenset[str]
    g: frozenset[str]

    def sort_key(self):
        return (len(self.h), sorted(self.h), len(self.g), sorted(self.g))

    def __str__(self) -> str:
        hs = ", ".join(sorted(self.h))
        gs = ", ".join(sorted(self.g))
        return "H = {%s}; G = {%s}" % (hs, gs)


def make_pair(g: SeparatedGraph, h: Iterable[str],
              blocks: Iterable[str]) -> AdmissiblePair:
    hset = frozenset(h)
    gset = frozenset(blocks)
    if not is_closed(g, hset):
        raise LatticeError(f"vertex set {sorted(hset)} is not closed")
    allowed = residue_blocks(g, hset)
    bad = gset - allowed
    if bad:
        raise LatticeError(
            f"blocks {sorted(bad)} are not residue blocks along the set")
    return AdmissiblePair(hset, gset)


def parse_pair(g: SeparatedGraph, text: str) -> AdmissiblePair:
    """Parse ``H = {v, w}; G = {X}`` (either braces may be empty)."""
    import re
    m = re.match(r"^\s*H\s*=\s*\{([^{}]*)\}\s*;\s*G\s*=\s*\{([^{}]*)\}\s*$",
                 text)
    if not m:
        raise LatticeError(f"bad pair text {text!r}")

    def names(chunk: str) -> list[str]:
        chunk = chunk.strip()
        if not chunk:
            return []
        return [t.strip() for t in chunk.split(",")]

    return make_pair(g, names(m.group(1)), names(m.group(2)))


def enumerate_admissible_pairs(g: SeparatedGraph) -> list[AdmissiblePair]:
    """Every admissible pair, ordered by the pair sort key."""
    pairs: list[AdmissiblePair] = []
    for h in hereditary_saturated_sets(g):
        candidates = sorted(residue_blocks(g, h))
        if len(candidates) > 20:
            raise LatticeError("too many residue blocks to enumerate")
        for k in range(len(candidates) + 1):
            for combo in itertools.combinations(candidates, k):
                pairs.append(AdmissiblePair(h, frozenset(combo)))
    return sorted(pairs, key=AdmissiblePair.sort_key)


def pair_leq(g: SeparatedGraph, a: AdmissiblePair, b: AdmissiblePair) -> bool:
    if not a.h <= b.h:
        return False
    return a.g <= b.g | blocks_inside(g, b.h)


def pair_inf(g: SeparatedGraph, a: AdmissiblePair,
             b: AdmissiblePair) -> AdmissiblePair:
    h = a.h & b.h
    allowed = residue_blocks(g, h)
    gset = (allowed
            & (a.g | blocks_inside(g, a.h))
            & (b.g | blocks_inside(g, b.h)))
    return AdmissiblePair(h, gset)


def pair_sup(g: SeparatedGraph, a: AdmissiblePair,
             b: AdmissiblePair) -> AdmissiblePair:
    """Least upper bound, computed as the meet of all enumerated upper
    bounds."""
    uppers = [q for q in enumerate_admissible_pairs(g)
              if pair_leq(g, a, q) and pair_leq(g, b, q)]
    if not uppers:
        raise LatticeError("no upper bound found")
    out = uppers[0]
    for q in uppers[1:]:
        out = pair_inf(g, out, q)
    return out


def order_ideal_generators(g: SeparatedGraph,
                           pair: AdmissiblePair) -> list[str]:
    """Monoid generators of the order ideal the pair cuts out."""
    gens = sorted(pair.h)
    gens.extend("q." + x for x in sorted(pair.g))
    return gens


def trace_ideal_generators(g: SeparatedGraph, pair: AdmissiblePair,
                           field=None) -> list:
    """Idempotent algebra elements generating the matching trace ideal."""
    from .algebra import q_idempotent, vertex_element
    from .fields import QQ
    f = QQ if field is None else field
    gens = [vertex_element(g, v, f) for v in sorted(pair.h)]
    for x in sorted(pair.g):
        gens.append(q_idempotent(g, g.block_vertex(x), g.block_edges(x), f))
    return gens


def pair_roundtrip_check(g: SeparatedGraph, pair: AdmissiblePair,
                         budget: Budget = Budget()) -> PiResult:
    """Quotient by the pair and read it back from the kernel."""
    return pi_homomorphism(g, pair.h, pair.g, budget)


def lattice_dot(g: SeparatedGraph) -> str:
    """The pair lattice as a DOT Hasse diagram (covers point upward)."""
    pairs = enumerate_admissible_pairs(g)
    index = {p: i for i, p in enumerate(pairs)}
    lines = ["digraph lattice {", "  rankdir=BT;",
             '  node [shape=box, fontname="monospace"];']
    for p, i in index.items():
        label = str(p).replace('"', r'\"')
        lines.append(f'  n{i} [label="{label}"];')
    for a in pairs:
        for b in pairs:
            if a == b or not pair_leq(g, a, b):
                continue
            strictly_between = any(
                c != a and c != b and pair_leq(g, a, c) and pair_leq(g, c, b)
                for c in pairs)
            if not strictly_between:
                lines.append(f"  n{index[a]} -> n{index[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- simplicity --------------------------------------------------------------


@dataclass(frozen=True)
class SimplicityReport:
    verdict: str  # "simple" | "not-simple"
    reason: str
    witness: str | None = None

    @property
    def is_simple(self) -> bool:
        return self.verdict == "simple"


def is_simple(g: SeparatedGraph) -> SimplicityReport:
    """Simplicity of the pair lattice: only the trivial quotients exist.

    A graph with a block left out of the full family is never simple (the
    block's residue generates a proper ideal), and neither is a graph where
    some vertex fails to see everything through its closure.
    """
    if not g.vertices:
        return SimplicityReport("not-simple", "empty graph has a zero monoid")
    for x in g.all_blocks():
        if not g.is_full(x):
            return SimplicityReport(
                "not-simple",
                f"block {x} is not full, so its residue spans a proper ideal",
                witness=x)
    everything = frozenset(g.vertices)
    for v in g.vertices:
        closure = saturation_closure(g, [v])
        if closure != everything:
            return SimplicityReport(
                "not-simple",
                f"closure of {v} misses {', '.join(sorted(everything - closure))}",
                witness=v)
    return SimplicityReport("simple",
                            "every singleton closure is the whole vertex set")


# -- cofinality --------------------------------------------------------------


@dataclass(frozen=True)
class MultipathPrefix:
    """A depth-limited branching of paths, one continuation per block.

    Paths are tuples of edge names starting at ``start``; every path either
    reaches the full depth or stops at a sink, and at every interior stage
    each block of the current vertex contributes a continuation.
    """

    start: str
    depth: int
    paths: tuple[tuple[str, ...], ...]


def check_multipath(g: SeparatedGraph, prefix: MultipathPrefix,
                    inside: frozenset[str] | None = None) -> list[str]:
    """Validity failures of a multipath prefix (empty list when valid)."""
    problems: list[str] = []
    if not g.has_vertex(prefix.start):
        return [f"unknown start vertex {prefix.start!r}"]
    if inside is not None and prefix.start not in inside:
        problems.append("start vertex escapes the designated set")
    for path in prefix.paths:
        at = prefix.start
        for e in path:
            if not g.has_edge(e) or g.src(e) != at:
                problems.append(f"path {path} breaks at {e!r}")
                break
            at = g.rng(e)
            if inside is not None and at not in inside:
                problems.append(f"path {path} escapes the set at {at!r}")
                break
        else:
            if len(path) != prefix.depth and not g.is_sink(at):
                problems.append(
                    f"path {path} stops early at non-sink {at!r}")
    prefixes = {path[:n] for path in prefix.paths for n in range(len(path) + 1)}
    for stem in prefixes:
        at = prefix.start
        for e in stem:
            at = g.rng(e)
        if g.is_sink(at) or len(stem) >= prefix.depth:
            continue
        for x in g.blocks_at(at):
            block = set(g.block_edges(x))
            if not any(path[:len(stem)] == stem and len(path) > len(stem)
                       and path[len(stem)] in block
                       for path in prefix.paths):
                problems.append(
                    f"no continuation through block {x} after {stem}")
    return problems


@dataclass(frozen=True)
class CofinalityReport:
    verdict: str  # "cofinal" | "not-cofinal"
    reason: str
    witness_vertex: str | None = None
    h: frozenset[str] = frozenset()
    trapped: frozenset[str] = frozenset()
    prefix: MultipathPrefix | None = None

    @property
    def is_cofinal(self) -> bool:
        return self.verdict == "cofinal"


def _reachable(g: SeparatedGraph, v: str) -> frozenset[str]:
    return hereditary_closure(g, [v])


def _trapped_set(g: SeparatedGraph, avoid: frozenset[str]) -> frozenset[str]:
    """Greatest subset of the complement in which every block of every
    non-sink member keeps an edge inside."""
    current = set(g.vertices) - avoid
    changed = True
    while changed:
        changed = False
        for u in sorted(current):
            if g.is_sink(u):
                continue
            for x in g.blocks_at(u):
                if not any(g.rng(e) in current for e in g.block_edges(x)):
                    current.discard(u)
                    changed = True
                    break
    return frozenset(current)


def _greedy_multipath(g: SeparatedGraph, inside: frozenset[str], start: str,
                      depth: int) -> MultipathPrefix:
    def grow(at: str, remaining: int) -> list[tuple[str, ...]]:
        if remaining == 0 or g.is_sink(at):
            return [()]
        out: list[tuple[str, ...]] = []
        for x in g.blocks_at(at):
            candidates = [e for e in g.block_edges(x) if g.rng(e) in inside]
            e = candidates[0]
            for tail in grow(g.rng(e), remaining - 1):
                out.append((e,) + tail)
        return out

    return MultipathPrefix(start, depth, tuple(grow(start, depth)))


def is_c_cofinal(g: SeparatedGraph, depth: int = 6) -> CofinalityReport:
    """Whether every vertex eventually meets every branching future.

    Requires every block to be declared full. For each vertex the procedure
    computes the set unreachable from it, prunes vertices that cannot keep
    all their blocks inside that set, and reports the first nonempty fixed
    point as a certificate: the reachable set is hereditary, and the greedy
    multipath prefix inside the trapped set witnesses a future the vertex
    never meets. The procedure is total, so the verdict is always definite.
    """
    if set(g.all_blocks()) != set(g.full_blocks):
        raise LatticeError(
            "cofinality analysis requires every block to be full")
    if depth < 1:
        raise LatticeError("depth must be positive")
    for w in g.vertices:
        reach = _reachable(g, w)
        trapped = _trapped_set(g, reach)
        if trapped:
            start = sorted(trapped)[0]
            prefix = _greedy_multipath(g, trapped, start, depth)
            assert not check_multipath(g, prefix, trapped)
            return CofinalityReport(
                "not-cofinal",
                f"vertex {w} never reaches the future branching from {start}",
                witness_vertex=w, h=reach, trapped=trapped, prefix=prefix)
    return CofinalityReport(
        "cofinal", "every vertex reaches every branching future")


# -- the extension digraph model ----------------------------------------------


def xe_saturated_sets(g: SeparatedGraph) -> list[frozenset[str]]:
    """Hereditary saturated subsets of the sink-extended digraph.

    Brute force over subsets, so guarded by the extended vertex count. The
    two saturation rules use the original block structure: a full block pulls
    its source in once all its ranges are in, and a non-full block does the
    same only when its adjoined sink is also in.
    """
    ext = cs_extension(g)
    n = len(ext.vertices)
    if n > 18:
        raise LatticeError("extension digraph too large for brute force")
    bv = ext.block_vertex_map
    out: list[frozenset[str]] = []
    for bits in range(1 << n):
        h = frozenset(v for i, v in enumerate(ext.vertices) if bits >> i & 1)
        ok = True
        for v in h:
            if any(r not in h for r in ext.out_neighbors(v)):
                ok = False
                break
        if not ok:
            continue
        for x in g.all_blocks():
            src = g.block_vertex(x)
            if src in h:
                continue
            ranges_in = all(g.rng(e) in h for e in g.block_edges(x))
            if not ranges_in:
                continue
            if g.is_full(x) or bv.get(x) in h:
                ok = False
                break
        if ok:
            out.append(h)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def xe_to_pair(g: SeparatedGraph, h_ext: frozenset[str]) -> AdmissiblePair:
    bv = cs_extension(g).block_vertex_map
    h = h_ext & frozenset(g.vertices)
    gset = frozenset(x for x, w in bv.items()
                     if w in h_ext and g.block_vertex(x) not in h)
    return AdmissiblePair(h, gset)


def pair_to_xe(g: SeparatedGraph, pair: AdmissiblePair) -> frozenset[str]:
    bv = cs_extension(g).block_vertex_map
    extra = {bv[x] for x in pair.g}
    for x in bv:
        if g.block_vertex(x) in pair.h:
            extra.add(bv[x])
    return pair.h | extra


@dataclass(frozen=True)
class XeIsoReport:
    ok: bool
    pair_count: int
    xe_count: int
    failures: tuple[str, ...]


def xe_order_iso_report(g: SeparatedGraph) -> XeIsoReport:
    """Verify that the two lattice models agree, element by element and
    order by order."""
    pairs = enumerate_admissible_pairs(g)
    sets = xe_saturated_sets(g)
    failures: list[str] = []
    if len(pairs) != len(sets):
        failures.append(f"count mismatch: {len(pairs)} pairs vs {len(sets)} sets")
    for h_ext in sets:
        pair = xe_to_pair(g, h_ext)
        if pair_to_xe(g, pair) != h_ext:
            failures.append(f"set {sorted(h_ext)} does not round-trip")
    for pair in pairs:
        h_ext = pair_to_xe(g, pair)
        if h_ext not in set(sets):
            failures.append(f"pair {pair} maps outside the family")
        elif xe_to_pair(g, h_ext) != pair:
            failures.append(f"pair {pair} does not round-trip")
    for a in pairs:
        for b in pairs:
            left = pair_leq(g, a, b)
            right = pair_to_xe(g, a) <= pair_to_xe(g, b)
            if left != right:
                failures.append(f"order disagrees on {a} vs {b}")
    return XeIsoReport(not failures, len(pairs), len(sets), tuple(failures))
