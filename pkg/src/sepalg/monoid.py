"""The commutative monoid attached to a partitioned graph.

Generators are the vertices plus one residue generator ``q.X`` for every
block that is not declared full; each block gives one defining relation
identifying its source vertex with the sum of its edge ranges (plus the
residue when the block is not full). Elements are finite multisets of
generators written additively.

Equality of elements is decided, within an explicit budget, by exploring
the congruence generated by single substitution steps. Positive certificates
are step traces that replay; negative certificates are either differing
ideal signatures or a fully enumerated congruence class.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graphs import SeparatedGraph


class MonoidError(ValueError):
    pass


RESIDUE_PREFIX = "q."

_TERM_RE = re.compile(r"^(?:(\d+)\s+)?([A-Za-z][A-Za-z0-9_.@-]*|q\.[A-Za-z][A-Za-z0-9_.@-]*)$")


@dataclass(frozen=True)
class MonoidElement:
    """A multiset of generators, kept sorted by generator name."""

    terms: tuple[tuple[str, int], ...]

    @staticmethod
    def of(counts: Mapping[str, int]) -> "MonoidElement":
        items = []
        for gen, c in counts.items():
            if c < 0:
                raise MonoidError(f"negative multiplicity for {gen!r}")
            if c:
                items.append((gen, c))
        return MonoidElement(tuple(sorted(items)))

    @staticmethod
    def zero() -> "MonoidElement":
        return MonoidElement(())

    @staticmethod
    def single(gen: str, count: int = 1) -> "MonoidElement":
        return MonoidElement.of({gen: count})

    def count(self, gen: str) -> int:
        for g, c in self.terms:
            if g == gen:
                return c
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.terms)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(g for g, _ in self.terms)

    @property
    def size(self) -> int:
        return sum(c for _, c in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MonoidElement") -> "MonoidElement":
        counts = self.as_dict()
        for g, c in other.terms:
            counts[g] = counts.get(g, 0) + c
        return MonoidElement.of(counts)

    def __sub__(self, other: "MonoidElement") -> "MonoidElement":
        counts = self.as_dict()
        for g, c in other.terms:
            have = counts.get(g, 0)
            if have < c:
                raise MonoidError(f"cannot subtract: missing {c - have} of {g!r}")
            counts[g] = have - c
        return MonoidElement.of(counts)

    def scale(self, k: int) -> "MonoidElement":
        if k < 0:
            raise MonoidError("negative scale")
        return MonoidElement.of({g: c * k for g, c in self.terms})

    def leq(self, other: "MonoidElement") -> bool:
        return all(other.count(g) >= c for g, c in self.terms)

    def min_with(self, other: "MonoidElement") -> "MonoidElement":
        return MonoidElement.of(
            {g: min(c, other.count(g)) for g, c in self.terms})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for g, c in self.terms:
            parts.append(g if c == 1 else f"{c} {g}")
        return " + ".join(parts)


def parse_element(text: str) -> MonoidElement:
    """Parse ``v + 2 w + q.X``; a lone ``0`` is the zero element."""
    body = text.strip()
    if body == "0":
        return MonoidElement.zero()
    if not body:
        raise MonoidError("empty element text")
    counts: dict[str, int] = {}
    for chunk in body.split("+"):
        term = chunk.strip()
        m = _TERM_RE.match(term)
        if not m:
            raise MonoidError(f"bad term {term!r}")
        count = int(m.group(1)) if m.group(1) else 1
        if count == 0:
            raise MonoidError(f"zero multiplicity in term {term!r}")
        gen = m.group(2)
        counts[gen] = counts.get(gen, 0) + count
    return MonoidElement.of(counts)


# -- presentations -----------------------------------------------------------


@dataclass(frozen=True)
class MonoidRelation:
    vertex: str
    block: str
    full: bool
    rhs: MonoidElement


class MonoidPresentation:
    """Generators and substitution relations read off a graph."""

    def __init__(self, graph: SeparatedGraph):
        self.graph = graph
        gens = list(graph.vertices)
        rels: list[MonoidRelation] = []
        for x in graph.all_blocks():
            v = graph.block_vertex(x)
            counts: dict[str, int] = {}
            for e in graph.block_edges(x):
                r = graph.rng(e)
                counts[r] = counts.get(r, 0) + 1
            full = graph.is_full(x)
            if not full:
                gens.append(RESIDUE_PREFIX + x)
                counts[RESIDUE_PREFIX + x] = 1
            rels.append(MonoidRelation(v, x, full, MonoidElement.of(counts)))
        self.generators: tuple[str, ...] = tuple(sorted(gens))
        self.relations: tuple[MonoidRelation, ...] = tuple(
            sorted(rels, key=lambda r: (r.vertex, r.block)))
        self._by_vertex: dict[str, tuple[MonoidRelation, ...]] = {}
        for r in self.relations:
            self._by_vertex.setdefault(r.vertex, ())
            self._by_vertex[r.vertex] = self._by_vertex[r.vertex] + (r,)
        self._by_block = {r.block: r for r in self.relations}

    def relations_at(self, vertex: str) -> tuple[MonoidRelation, ...]:
        return self._by_vertex.get(vertex, ())

    def relation_of(self, block: str) -> MonoidRelation:
        if block not in self._by_block:
            raise MonoidError(f"unknown block {block!r}")
        return self._by_block[block]

    @property
    def residue_generators(self) -> tuple[str, ...]:
        return tuple(g for g in self.generators if g.startswith(RESIDUE_PREFIX))

    def validate(self, x: MonoidElement) -> None:
        known = set(self.generators)
        for g, _ in x.terms:
            if g not in known:
                raise MonoidError(f"unknown generator {g!r}")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MonoidPresentation) and self.graph == other.graph

    def __hash__(self) -> int:
        return hash(self.graph)

    def __repr__(self) -> str:
        return f"MonoidPresentation({self.graph.name!r})"


@functools.lru_cache(maxsize=None)
def _presentation_cache(graph: SeparatedGraph) -> MonoidPresentation:
    return MonoidPresentation(graph)


def presentation_of(graph: SeparatedGraph) -> MonoidPresentation:
    return _presentation_cache(graph)


def rho(p: MonoidPresentation, block: str) -> MonoidElement:
    """The right-hand side substituted for the block's source vertex."""
    return p.relation_of(block).rhs


# -- substitution steps ------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One substitution: forward replaces a vertex occurrence by the block's
    sum, reverse collapses such a sum back to the vertex."""

    forward: bool
    vertex: str
    block: str

    def describe(self) -> str:
        if self.forward:
            return f"expand {self.vertex} via {self.block}"
        return f"collapse {self.block} to {self.vertex}"


def apply_step(p: MonoidPresentation, x: MonoidElement, step: Step) -> MonoidElement:
    rel = p.relation_of(step.block)
    if rel.vertex != step.vertex:
        raise MonoidError(f"block {step.block!r} does not sit at {step.vertex!r}")
    if step.forward:
        if x.count(step.vertex) < 1:
            raise MonoidError(f"no occurrence of {step.vertex!r} to expand")
        return x - MonoidElement.single(step.vertex) + rel.rhs
    if not rel.rhs.leq(x):
        raise MonoidError(f"cannot collapse {step.block!r}: sum not contained")
    return x - rel.rhs + MonoidElement.single(step.vertex)


def replay(p: MonoidPresentation, start: MonoidElement,
           steps: Sequence[Step]) -> MonoidElement:
    cur = start
    for s in steps:
        cur = apply_step(p, cur, s)
    return cur


def forward_steps(p: MonoidPresentation,
                  x: MonoidElement) -> list[tuple[Step, MonoidElement]]:
    """All single forward substitutions, deduplicated by resulting element.

    When two blocks produce the same result the lexicographically least
    (vertex, block) descriptor is kept, so the listing is deterministic.
    """
    seen: dict[MonoidElement, Step] = {}
    for g, _ in x.terms:
        for rel in p.relations_at(g):
            step = Step(True, rel.vertex, rel.block)
            result = x - MonoidElement.single(g) + rel.rhs
            if result not in seen:
                seen[result] = step
    return sorted(((s, r) for r, s in seen.items()),
                  key=lambda pair: (pair[0].vertex, pair[0].block, str(pair[1])))


def reverse_steps(p: MonoidPresentation,
                  x: MonoidElement) -> list[tuple[Step, MonoidElement]]:
    """All single reverse substitutions, deduplicated by resulting element."""
    seen: dict[MonoidElement, Step] = {}
    for rel in p.relations:
        if rel.rhs.leq(x):
            step = Step(False, rel.vertex, rel.block)
            result = x - rel.rhs + MonoidElement.single(rel.vertex)
            if result not in seen:
                seen[result] = step
    return sorted(((s, r) for r, s in seen.items()),
                  key=lambda pair: (pair[0].vertex, pair[0].block, str(pair[1])))


def parallel_step(p: MonoidPresentation, x: MonoidElement,
                  moves: Sequence[tuple[str, str]]) -> MonoidElement:
    """Apply several forward substitutions at once.

    Each move names a vertex occurrence and the block to substitute for it;
    the number of moves at a vertex may not exceed its multiplicity. The
    result is checked against a sequential replay of the same moves.
    """
    needed: dict[str, int] = {}
    for v, x_block in moves:
        rel = p.relation_of(x_block)
        if rel.vertex != v:
            raise MonoidError(f"block {x_block!r} does not sit at {v!r}")
        needed[v] = needed.get(v, 0) + 1
    for v, k in needed.items():
        if x.count(v) < k:
            raise MonoidError(
                f"{k} substitutions at {v!r} but only {x.count(v)} occurrences")
    counts = x.as_dict()
    for v, x_block in moves:
        counts[v] -= 1
        for g, c in rho(p, x_block).terms:
            counts[g] = counts.get(g, 0) + c
    result = MonoidElement.of(counts)
    sequential = replay(p, x, [Step(True, v, b) for v, b in moves])
    assert sequential == result
    return result


def one_parallel_images(p: MonoidPresentation,
                        x: MonoidElement) -> set[MonoidElement]:
    """Every element reachable by one parallel step (any number of
    occurrences substituted simultaneously, including none)."""
    per_generator: list[list[MonoidElement]] = []
    for g, c in x.terms:
        options: list[MonoidElement] = [MonoidElement.single(g)]
        for rel in p.relations_at(g):
            options.append(rel.rhs)
        combos = []
        for pick in itertools.combinations_with_replacement(options, c):
            total = MonoidElement.zero()
            for piece in pick:
                total = total + piece
            combos.append(total)
        per_generator.append(combos)
    images: set[MonoidElement] = set()
    for assembly in itertools.product(*per_generator):
        total = MonoidElement.zero()
        for piece in assembly:
            total = total + piece
        images.add(total)
    if not per_generator:
        images.add(MonoidElement.zero())
    return images


# -- the common-image test ---------------------------------------------------


@dataclass(frozen=True)
class StarPair:
    vertex: str
    left: str
    right: str
    ok: bool
    example: str | None


@dataclass(frozen=True)
class StarReport:
    ok: bool
    pairs: tuple[StarPair, ...]

    @property
    def failing_pairs(self) -> tuple[StarPair, ...]:
        return tuple(pr for pr in self.pairs if not pr.ok)


@functools.lru_cache(maxsize=None)
def check_star(p: MonoidPresentation) -> StarReport:
    """For every pair of distinct blocks at a vertex, test whether the two
    substituted sums admit a common image under one parallel step each.

    The image sets are enumerated exhaustively, so a pair reported as
    failing genuinely has no common one-parallel-step image.
    """
    results: list[StarPair] = []
    for v in p.graph.vertices:
        blocks = p.graph.blocks_at(v)
        for left, right in itertools.combinations(blocks, 2):
            a_images = one_parallel_images(p, rho(p, left))
            b_images = one_parallel_images(p, rho(p, right))
            common = a_images & b_images
            if common:
                example = min(common, key=lambda e: (e.size, str(e)))
                results.append(StarPair(v, left, right, True, str(example)))
            else:
                results.append(StarPair(v, left, right, False, None))
    return StarReport(all(r.ok for r in results), tuple(results))


# -- ideal signatures --------------------------------------------------------


def _g_of(graph: SeparatedGraph, h: frozenset[str]) -> frozenset[str]:
    """Blocks that are not full and have at least one range outside h."""
    out = set()
    for x in graph.all_blocks():
        if graph.is_full(x):
            continue
        if any(graph.rng(e) not in h for e in graph.block_edges(x)):
            out.add(x)
    return frozenset(out)


def ideal_signature(p: MonoidPresentation,
                    x: MonoidElement) -> tuple[frozenset[str], frozenset[str]]:
    """The closure of the element's support under the substitution rules.

    Returns the closed vertex set together with the residue blocks of its
    complement boundary; congruent elements always share this signature, so
    differing signatures certify inequality.
    """
    g = p.graph
    h = {gen for gen, _ in x.terms if not gen.startswith(RESIDUE_PREFIX)}
    q = {gen[len(RESIDUE_PREFIX):] for gen, _ in x.terms
         if gen.startswith(RESIDUE_PREFIX)}
    changed = True
    while changed:
        changed = False
        for v in list(h):
            for e in g.out_edges(v):
                if g.rng(e) not in h:
                    h.add(g.rng(e))
                    changed = True
            for blk in g.blocks_at(v):
                if not g.is_full(blk) and blk not in q:
                    q.add(blk)
                    changed = True
        for blk in g.all_blocks():
            ranges_in = all(g.rng(e) in h for e in g.block_edges(blk))
            if not ranges_in:
                continue
            src = g.block_vertex(blk)
            if src in h:
                continue
            if g.is_full(blk) or blk in q:
                h.add(src)
                changed = True
    hset = frozenset(h)
    return hset, frozenset(q) & _g_of(g, hset)


# -- equality ----------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    max_size: int = 64
    max_frontier: int = 50000
    max_depth: int = 12


@dataclass(frozen=True)
class EqResult:
    verdict: str  # "equal" | "not-equal" | "unknown"
    reason: str
    witness: str | None = None
    trace_a: tuple[Step, ...] = ()
    trace_b: tuple[Step, ...] = ()
    explored: int = 0

    @property
    def is_equal(self) -> bool:
        return self.verdict == "equal"

    @property
    def is_not_equal(self) -> bool:
        return self.verdict == "not-equal"

    @property
    def is_unknown(self) -> bool:
        return self.verdict == "unknown"


def _forward_closure(p: MonoidPresentation, start: MonoidElement,
                     budget: Budget):
    """Breadth-first forward closure with parent pointers.

    Returns (parents, complete); parents maps each reached element to the
    (previous element, step) pair that first produced it.
    """
    parents: dict[MonoidElement, tuple[MonoidElement, Step] | None] = {start: None}
    frontier = [start]
    complete = True
    depth = 0
    while frontier:
        if depth >= budget.max_depth:
            complete = False
            break
        nxt: list[MonoidElement] = []
        for cur in frontier:
            for step, result in forward_steps(p, cur):
                if result in parents:
                    continue
                if result.size > budget.max_size:
                    complete = False
                    continue
                if len(parents) >= budget.max_frontier:
                    complete = False
                    break
                parents[result] = (cur, step)
                nxt.append(result)
            if len(parents) >= budget.max_frontier and nxt:
                break
        frontier = nxt
        depth += 1
    return parents, complete


def _extract_trace(parents, node) -> tuple[Step, ...]:
    steps: list[Step] = []
    cur = node
    while parents[cur] is not None:
        prev, step = parents[cur]
        steps.append(step)
        cur = prev
    return tuple(reversed(steps))


def _forward_meet(p: MonoidPresentation, a: MonoidElement, b: MonoidElement,
                  budget: Budget):
    """Search the forward closures of both elements for a common value."""
    pa, _ = _forward_closure(p, a, budget)
    pb, _ = _forward_closure(p, b, budget)
    common = set(pa) & set(pb)
    explored = len(pa) + len(pb)
    if not common:
        return None, (), (), explored
    gamma = min(common, key=lambda e: (e.size, str(e)))
    return gamma, _extract_trace(pa, gamma), _extract_trace(pb, gamma), explored


def _class_search(p: MonoidPresentation, start: MonoidElement,
                  target: MonoidElement, budget: Budget):
    """Breadth-first search of the congruence class of start.

    Returns (found, complete, parents, visited); complete means the whole
    class was enumerated without hitting any budget cap.
    """
    parents: dict[MonoidElement, tuple[MonoidElement, Step] | None] = {start: None}
    frontier = [start]
    complete = True
    depth = 0
    found = target in parents
    while frontier and not found:
        if depth >= budget.max_depth:
            complete = False
            break
        nxt: list[MonoidElement] = []
        for cur in frontier:
            neighbors = forward_steps(p, cur) + reverse_steps(p, cur)
            for step, result in neighbors:
                if result in parents:
                    continue
                if result.size > budget.max_size:
                    complete = False
                    continue
                if len(parents) >= budget.max_frontier:
                    complete = False
                    break
                parents[result] = (cur, step)
                nxt.append(result)
                if result == target:
                    found = True
                    break
            if found or (len(parents) >= budget.max_frontier and not complete):
                break
        if found:
            break
        frontier = nxt
        depth += 1
    return found, complete, parents, len(parents)


def monoid_eq(p: MonoidPresentation, a: MonoidElement, b: MonoidElement,
              budget: Budget = Budget()) -> EqResult:
    """Decide whether two elements are identified by the presentation.

    The procedure tries, in order: syntactic identity, the ideal-signature
    separator, a forward meet (only when the common-image test holds for the
    whole presentation, which makes forward rewriting confluent enough to
    trust), and finally a bidirectional congruence search whose exhaustion
    certifies inequality.
    """
    p.validate(a)
    p.validate(b)
    if a == b:
        return EqResult("equal", "identical elements")

    sig_a = ideal_signature(p, a)
    sig_b = ideal_signature(p, b)
    if sig_a != sig_b:
        return EqResult(
            "not-equal",
            "ideal signatures differ",
            witness=(f"({' '.join(sorted(sig_a[0])) or '-'} | "
                     f"{' '.join(sorted(sig_a[1])) or '-'}) vs "
                     f"({' '.join(sorted(sig_b[0])) or '-'} | "
                     f"{' '.join(sorted(sig_b[1])) or '-'})"))

    explored_total = 0
    if check_star(p).ok:
        gamma, ta, tb, explored = _forward_meet(p, a, b, budget)
        explored_total += explored
        if gamma is not None:
            return EqResult("equal", "common forward image",
                            witness=str(gamma), trace_a=ta, trace_b=tb,
                            explored=explored_total)

    found, complete, parents, visited = _class_search(p, a, b, budget)
    explored_total += visited
    if found:
        return EqResult("equal", "connected by substitution steps",
                        witness=str(b), trace_a=_extract_trace(parents, b),
                        explored=explored_total)
    if complete:
        return EqResult("not-equal",
                        "congruence class of the first element is finite "
                        "and was fully enumerated",
                        witness=str(a), explored=explored_total)

    found, complete, parents, visited = _class_search(p, b, a, budget)
    explored_total += visited
    if found:
        return EqResult("equal", "connected by substitution steps",
                        witness=str(a), trace_b=_extract_trace(parents, a),
                        explored=explored_total)
    if complete:
        return EqResult("not-equal",
                        "congruence class of the second element is finite "
                        "and was fully enumerated",
                        witness=str(b), explored=explored_total)

    return EqResult("unknown", "budget exhausted in both directions",
                    explored=explored_total)


# -- refinement --------------------------------------------------------------


@dataclass(frozen=True)
class RefinementMatrix:
    c11: MonoidElement
    c12: MonoidElement
    c21: MonoidElement
    c22: MonoidElement

    def row_sums(self) -> tuple[MonoidElement, MonoidElement]:
        return self.c11 + self.c12, self.c21 + self.c22

    def col_sums(self) -> tuple[MonoidElement, MonoidElement]:
        return self.c11 + self.c21, self.c12 + self.c22


@dataclass(frozen=True)
class RefineResult:
    verdict: str  # "refined" | "unknown"
    reason: str
    meet: MonoidElement | None = None
    matrix: RefinementMatrix | None = None
    trace_a: tuple[Step, ...] = ()
    trace_b: tuple[Step, ...] = ()
    checks: tuple[EqResult, ...] = ()
    explored: int = 0

    @property
    def ok(self) -> bool:
        return (self.verdict == "refined"
                and all(c.is_equal for c in self.checks))


def _divide(p: MonoidPresentation, first: MonoidElement, second: MonoidElement,
            steps: Sequence[Step]) -> tuple[MonoidElement, MonoidElement]:
    """Replay forward steps on a two-part split of their starting element.

    Each step is charged to the first part that still holds an occurrence of
    the substituted vertex, so the parts end up summing to the final value.
    """
    u1, u2 = first, second
    for step in steps:
        if not step.forward:
            raise MonoidError("division replay expects forward steps only")
        rel = p.relation_of(step.block)
        if u1.count(step.vertex) > 0:
            u1 = u1 - MonoidElement.single(step.vertex) + rel.rhs
        elif u2.count(step.vertex) > 0:
            u2 = u2 - MonoidElement.single(step.vertex) + rel.rhs
        else:
            raise MonoidError(
                f"no occurrence of {step.vertex!r} left in either part")
    return u1, u2


def refine(p: MonoidPresentation, a1: MonoidElement, a2: MonoidElement,
           b1: MonoidElement, b2: MonoidElement,
           budget: Budget = Budget()) -> RefineResult:
    """Produce a common refinement of the two sum decompositions a1 + a2 and
    b1 + b2 of congruent elements, as a 2x2 matrix whose row sums match the
    a-parts and column sums match the b-parts.

    Both sums are rewritten forward to a common value, the rewriting is
    replayed on each part separately, and the refined parts are split by a
    componentwise minimum. All four cell identities are then verified
    independently; the result records those verdicts.
    """
    for x in (a1, a2, b1, b2):
        p.validate(x)
    a = a1 + a2
    b = b1 + b2
    gamma, ta, tb, explored = _forward_meet(p, a, b, budget)
    if gamma is None:
        return RefineResult("unknown",
                            "no common forward image within budget",
                            explored=explored)
    a1p, a2p = _divide(p, a1, a2, ta)
    b1p, b2p = _divide(p, b1, b2, tb)
    assert a1p + a2p == gamma
    assert b1p + b2p == gamma
    c11 = a1p.min_with(b1p)
    c12 = a1p - c11
    c21 = b1p - c11
    c22 = gamma - c11 - c12 - c21
    matrix = RefinementMatrix(c11, c12, c21, c22)
    checks = (
        monoid_eq(p, a1, c11 + c12, budget),
        monoid_eq(p, a2, c21 + c22, budget),
        monoid_eq(p, b1, c11 + c21, budget),
        monoid_eq(p, b2, c12 + c22, budget),
    )
    return RefineResult("refined", "common image found and divided",
                        meet=gamma, matrix=matrix, trace_a=ta, trace_b=tb,
                        checks=checks, explored=explored)


# -- quotient maps -----------------------------------------------------------


def _is_hereditary(g: SeparatedGraph, h: frozenset[str]) -> str | None:
    for v in h:
        for e in g.out_edges(v):
            if g.rng(e) not in h:
                return f"edge {e} leaves {v} but ends outside at {g.rng(e)}"
    return None


def _is_saturated(g: SeparatedGraph, h: frozenset[str]) -> str | None:
    for x in g.all_blocks():
        if not g.is_full(x):
            continue
        if g.block_vertex(x) in h:
            continue
        if all(g.rng(e) in h for e in g.block_edges(x)):
            return (f"full block {x} has all ranges inside but "
                    f"source {g.block_vertex(x)} outside")
    return None


@dataclass(frozen=True)
class PiRelationCheck:
    vertex: str
    block: str
    result: EqResult


@dataclass(frozen=True)
class PiResult:
    pair: tuple[frozenset[str], frozenset[str]]
    quotient: SeparatedGraph
    gen_map: dict[str, MonoidElement]
    relation_checks: tuple[PiRelationCheck, ...]
    raw_zero_vertices: frozenset[str]
    raw_zero_residues: frozenset[str]
    readout: tuple[frozenset[str], frozenset[str]]

    @property
    def relations_ok(self) -> bool:
        return all(c.result.is_equal for c in self.relation_checks)

    @property
    def roundtrip_ok(self) -> bool:
        return self.readout == self.pair

    @property
    def ok(self) -> bool:
        return self.relations_ok and self.roundtrip_ok


def pi_homomorphism(g: SeparatedGraph, h: Iterable[str], gset: Iterable[str],
                    budget: Budget = Budget()) -> PiResult:
    """The quotient map collapsing an admissible pair to zero.

    Builds the quotient graph, maps every generator of the source monoid to
    an element of the quotient monoid, verifies each defining relation in
    the quotient, and reads the pair back from the kernel generators. The
    raw zero sets and the filtered readout are both reported.
    """
    hset = frozenset(h)
    gs = frozenset(gset)
    for v in hset:
        if not g.has_vertex(v):
            raise MonoidError(f"unknown vertex {v!r}")
    problem = _is_hereditary(g, hset) or _is_saturated(g, hset)
    if problem:
        raise MonoidError(f"vertex set not closed: {problem}")
    boundary = _g_of(g, hset)
    for x in gs:
        if x not in boundary:
            raise MonoidError(
                f"block {x!r} is not a residue block along the vertex set")

    new_vertices = [v for v in g.vertices if v not in hset]
    new_edges = {e: (g.src(e), g.rng(e)) for e in g.edges
                 if g.rng(e) not in hset}
    new_blocks: dict[str, list[str]] = {}
    for x in g.all_blocks():
        members = [e for e in g.block_edges(x) if e in new_edges]
        if members:
            new_blocks[x] = members
    new_full = [x for x in new_blocks
                if (g.is_full(x) or x in gs)]
    quotient = SeparatedGraph(g.name + ".pi", new_vertices, new_edges,
                              new_blocks, new_full)

    p = presentation_of(g)
    q = presentation_of(quotient)
    gen_map: dict[str, MonoidElement] = {}
    for v in g.vertices:
        gen_map[v] = (MonoidElement.zero() if v in hset
                      else MonoidElement.single(v))
    for x in g.all_blocks():
        if g.is_full(x):
            continue
        key = RESIDUE_PREFIX + x
        if g.block_vertex(x) in hset or x in gs:
            gen_map[key] = MonoidElement.zero()
        elif all(g.rng(e) in hset for e in g.block_edges(x)):
            gen_map[key] = MonoidElement.single(g.block_vertex(x))
        else:
            gen_map[key] = MonoidElement.single(key)

    def push(x: MonoidElement) -> MonoidElement:
        total = MonoidElement.zero()
        for gen, c in x.terms:
            total = total + gen_map[gen].scale(c)
        return total

    checks: list[PiRelationCheck] = []
    for rel in p.relations:
        lhs = gen_map[rel.vertex]
        rhs = push(rel.rhs)
        checks.append(PiRelationCheck(
            rel.vertex, rel.block, monoid_eq(q, lhs, rhs, budget)))

    raw_zero_vertices = frozenset(v for v in g.vertices
                                  if gen_map[v].is_zero())
    raw_zero_residues = frozenset(
        x for x in g.all_blocks()
        if not g.is_full(x) and gen_map[RESIDUE_PREFIX + x].is_zero())
    readout_h = raw_zero_vertices
    readout_g = raw_zero_residues & _g_of(g, readout_h)
    return PiResult((hset, gs), quotient, gen_map, tuple(checks),
                    raw_zero_vertices, raw_zero_residues,
                    (readout_h, readout_g))


# -- presentations as graphs -------------------------------------------------


@dataclass(frozen=True)
class PresentedGraph:
    graph: SeparatedGraph
    row_vertices: tuple[str, ...]
    generator_vertices: tuple[str, ...]
    recovered: bool


def presentation_to_graph(generators: Sequence[str],
                          rows: Sequence[tuple[Mapping[str, int], Mapping[str, int]]],
                          name: str = "presented") -> PresentedGraph:
    """Realize a finite list of sum equations as a partitioned graph.

    Each generator becomes a sink; each equation contributes a fresh source
    vertex carrying two full blocks, one per side, with edge multiplicities
    given by the coefficients. The graph monoid then identifies the source
    with both sides, so the sinks satisfy exactly the given equations. The
    construction is checked by reading the relations back off the graph.
    """
    gens = list(generators)
    if len(set(gens)) != len(gens):
        raise MonoidError("duplicate generator name")
    vertices = list(gens)
    row_names: list[str] = []
    edges: dict[str, tuple[str, str]] = {}
    blocks: dict[str, list[str]] = {}
    for i, (lhs, rhs) in enumerate(rows, start=1):
        row = f"u{i}"
        while row in gens:
            row = row + "@x"
        row_names.append(row)
        vertices.append(row)
        for side_tag, side in (("L", lhs), ("R", rhs)):
            block_name = f"{side_tag}{i}"
            members: list[str] = []
            for gen in sorted(side):
                if gen not in gens:
                    raise MonoidError(f"row {i}: unknown generator {gen!r}")
                c = side[gen]
                if c < 0:
                    raise MonoidError(f"row {i}: negative coefficient")
                for t in range(1, c + 1):
                    ename = f"{side_tag.lower()}{i}.{gen}.{t}"
                    edges[ename] = (row, gen)
                    members.append(ename)
            if not members:
                raise MonoidError(f"row {i}: empty side")
            blocks[block_name] = members
    graph = SeparatedGraph(name, vertices, edges, blocks, list(blocks))

    p = presentation_of(graph)
    recovered = True
    for i, (lhs, rhs) in enumerate(rows, start=1):
        want_l = MonoidElement.of(dict(lhs))
        want_r = MonoidElement.of(dict(rhs))
        if rho(p, f"L{i}") != want_l or rho(p, f"R{i}") != want_r:
            recovered = False
    return PresentedGraph(graph, tuple(row_names), tuple(gens), recovered)
