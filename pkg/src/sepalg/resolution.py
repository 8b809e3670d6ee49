"""Sink-adjoining resolutions of block overlaps, staged and certified.

Each resolved triple takes two distinct blocks at a vertex and adjoins a grid
of fresh sinks, one per pair of edges (with a chosen positive multiplicity),
together with new full blocks at the edge ranges that identify each range
with a row or column of the grid. Iterating the construction stage by stage
drives every pair of blocks toward a common refinement; this module builds
the stages, embeds the resulting monoids, and provides the probes used to
certify what the construction achieves.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .graphs import GraphError, GraphMorphism, SeparatedGraph, check_morphism
from .monoid import (
    Budget,
    EqResult,
    MonoidElement,
    MonoidError,
    MonoidPresentation,
    Step,
    check_star,
    forward_steps,
    monoid_eq,
    one_parallel_images,
    presentation_of,
    presentation_to_graph,
    rho,
)


class ResolutionError(ValueError):
    pass


# -- one resolution pass -------------------------------------------------------


@dataclass(frozen=True)
class TripleSpec:
    """A block pair to resolve: two distinct blocks at one vertex, plus the
    sink multiplicity for every pair of their edges."""

    vertex: str
    left: str
    right: str
    delta: tuple[tuple[tuple[str, str], int], ...]

    @staticmethod
    def of(vertex: str, left: str, right: str,
           delta: Mapping[tuple[str, str], int]) -> "TripleSpec":
        return TripleSpec(vertex, left, right, tuple(sorted(delta.items())))

    @property
    def delta_map(self) -> dict[tuple[str, str], int]:
        return dict(self.delta)


@dataclass(frozen=True)
class ResolvedTriple:
    """The name tables produced by resolving one triple."""

    index: int
    vertex: str
    left: str
    right: str
    delta: tuple[tuple[tuple[str, str], int], ...]
    sink_names: tuple[tuple[tuple[str, str], str], ...]
    left_blocks: tuple[tuple[str, str], ...]
    right_blocks: tuple[tuple[str, str], ...]

    @property
    def delta_map(self) -> dict[tuple[str, str], int]:
        return dict(self.delta)

    @property
    def sink_map(self) -> dict[tuple[str, str], str]:
        return dict(self.sink_names)

    @property
    def left_block_map(self) -> dict[str, str]:
        return dict(self.left_blocks)

    @property
    def right_block_map(self) -> dict[str, str]:
        return dict(self.right_blocks)


def uniform_delta(g: SeparatedGraph, left: str, right: str,
                  value: int) -> dict[tuple[str, str], int]:
    if value < 1:
        raise ResolutionError("sink multiplicity must be positive")
    return {(e, f): value
            for e in g.block_edges(left) for f in g.block_edges(right)}


def delta_t_resolution(
    g: SeparatedGraph,
    specs: Sequence[TripleSpec],
    start_index: int = 1,
) -> tuple[SeparatedGraph, tuple[ResolvedTriple, ...], int]:
    """Adjoin the sink grids for the given triples in one pass.

    Triples are numbered consecutively from start_index; all generated names
    carry that number, so repeated passes never collide. Returns the enlarged
    graph, the name tables, and the next free number.
    """
    taken = set(g.vertices) | set(g.edges) | set(g.all_blocks())

    def fresh(base: str) -> str:
        cand = base
        while cand in taken:
            cand = cand + "@x"
        taken.add(cand)
        return cand

    vertices = list(g.vertices)
    edges = {e: (g.src(e), g.rng(e)) for e in g.edges}
    blocks = {x: list(g.block_edges(x)) for x in g.all_blocks()}
    full = set(g.full_blocks)

    records: list[ResolvedTriple] = []
    k = start_index
    for spec in specs:
        if spec.left == spec.right:
            raise ResolutionError("triple needs two distinct blocks")
        for x in (spec.left, spec.right):
            if x not in g.all_blocks():
                raise ResolutionError(f"unknown block {x!r}")
            if g.block_vertex(x) != spec.vertex:
                raise ResolutionError(
                    f"block {x!r} does not sit at {spec.vertex!r}")
        dmap = spec.delta_map
        left_edges = g.block_edges(spec.left)
        right_edges = g.block_edges(spec.right)
        for e in left_edges:
            for f in right_edges:
                if dmap.get((e, f), 0) < 1:
                    raise ResolutionError(
                        f"multiplicity missing for edge pair ({e}, {f})")

        sink_names: dict[tuple[str, str], str] = {}
        left_members: dict[str, list[str]] = {e: [] for e in left_edges}
        right_members: dict[str, list[str]] = {f: [] for f in right_edges}
        for e in left_edges:
            for f in right_edges:
                sink = fresh(f"v@{k}.{e}.{f}")
                sink_names[(e, f)] = sink
                vertices.append(sink)
                for j in range(1, dmap[(e, f)] + 1):
                    ge = fresh(f"g@{k}.{e}.{f}.{j}")
                    he = fresh(f"h@{k}.{e}.{f}.{j}")
                    edges[ge] = (g.rng(e), sink)
                    edges[he] = (g.rng(f), sink)
                    left_members[e].append(ge)
                    right_members[f].append(he)

        left_names: dict[str, str] = {}
        right_names: dict[str, str] = {}
        for e in left_edges:
            name = fresh(f"{spec.left}@{k}.{e}")
            left_names[e] = name
            blocks[name] = left_members[e]
            full.add(name)
        for f in right_edges:
            name = fresh(f"{spec.right}@{k}.{f}")
            right_names[f] = name
            blocks[name] = right_members[f]
            full.add(name)

        records.append(ResolvedTriple(
            k, spec.vertex, spec.left, spec.right, spec.delta,
            tuple(sorted(sink_names.items())),
            tuple(sorted(left_names.items())),
            tuple(sorted(right_names.items()))))
        k += 1

    out = SeparatedGraph(g.name, vertices, edges, blocks, full)
    return out, tuple(records), k


# -- staged resolutions --------------------------------------------------------


TRIPLE_MODES = ("symmetric", "one_per_pair")
DELTA_MODES = ("ones", "factorial")


@dataclass(frozen=True)
class ResolutionPlan:
    base: str
    stages: int
    triples: str = "symmetric"
    delta: str = "factorial"
    skip_satisfied: bool = False


def parse_plan(text: str) -> ResolutionPlan:
    """Parse a plan file: one ``resolve`` line plus comments.

    ``resolve <base> stages=N [triples=symmetric|one_per_pair]
    [delta=ones|factorial] [skip_satisfied=true|false]``
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if len(lines) != 1:
        raise ResolutionError("plan must contain exactly one resolve line")
    words = lines[0].split()
    if len(words) < 3 or words[0] != "resolve":
        raise ResolutionError("plan line must start with 'resolve <base>'")
    base = words[1]
    opts = {"stages": None, "triples": "symmetric", "delta": "factorial",
            "skip_satisfied": "false"}
    for w in words[2:]:
        if "=" not in w:
            raise ResolutionError(f"bad plan option {w!r}")
        key, val = w.split("=", 1)
        if key not in opts:
            raise ResolutionError(f"unknown plan option {key!r}")
        opts[key] = val
    if opts["stages"] is None or not re.match(r"^\d+$", opts["stages"]):
        raise ResolutionError("plan needs stages=N")
    stages = int(opts["stages"])
    if stages < 1:
        raise ResolutionError("stages must be at least 1")
    if opts["triples"] not in TRIPLE_MODES:
        raise ResolutionError(f"unknown triples mode {opts['triples']!r}")
    if opts["delta"] not in DELTA_MODES:
        raise ResolutionError(f"unknown delta mode {opts['delta']!r}")
    if opts["skip_satisfied"] not in ("true", "false"):
        raise ResolutionError("skip_satisfied must be true or false")
    return ResolutionPlan(base, stages, opts["triples"], opts["delta"],
                          opts["skip_satisfied"] == "true")


@dataclass(frozen=True)
class StageGraph:
    """One stage of a staged resolution, with its provenance."""

    graph: SeparatedGraph
    base: SeparatedGraph
    stage: int
    triples: tuple[ResolvedTriple, ...]
    inclusion: GraphMorphism | None
    vertex_birth: tuple[tuple[str, int], ...]
    block_birth: tuple[tuple[str, int], ...]

    @property
    def vertex_birth_map(self) -> dict[str, int]:
        return dict(self.vertex_birth)

    @property
    def block_birth_map(self) -> dict[str, int]:
        return dict(self.block_birth)

    def vertices_born_by(self, stage: int) -> list[str]:
        return [v for v, s in self.vertex_birth if s <= stage]


def _stage_pairs(g: SeparatedGraph, block_birth: Mapping[str, int],
                 building: int, mode: str,
                 skip_satisfied: bool) -> list[tuple[str, str, str]]:
    """The (vertex, left, right) pairs to resolve when building a stage.

    A pair is considered only when at least one of its blocks appeared in
    the previous stage; pairs of strictly older blocks were already resolved.
    """
    p = presentation_of(g) if skip_satisfied else None
    out: list[tuple[str, str, str]] = []
    for v in g.vertices:
        blocks = g.blocks_at(v)
        if len(blocks) < 2:
            continue
        if mode == "symmetric":
            candidates = list(itertools.permutations(blocks, 2))
        else:
            candidates = list(itertools.combinations(blocks, 2))
        for left, right in candidates:
            if (block_birth[left] <= building - 2
                    and block_birth[right] <= building - 2):
                continue
            if skip_satisfied:
                a = one_parallel_images(p, rho(p, left))
                b = one_parallel_images(p, rho(p, right))
                if a & b:
                    continue
            out.append((v, left, right))
    return sorted(out)


def build_resolution(base: SeparatedGraph, stages: int,
                     triples: str = "symmetric", delta: str = "factorial",
                     skip_satisfied: bool = False) -> list[StageGraph]:
    """Run the staged construction and return all stages, base first.

    The multiplicity used while building stage n is n factorial under the
    ``factorial`` policy and 1 under ``ones``. Triple numbering is global
    across stages.
    """
    if triples not in TRIPLE_MODES:
        raise ResolutionError(f"unknown triples mode {triples!r}")
    if delta not in DELTA_MODES:
        raise ResolutionError(f"unknown delta mode {delta!r}")
    if stages < 0:
        raise ResolutionError("stage count cannot be negative")

    vertex_birth = {v: 0 for v in base.vertices}
    block_birth = {x: 0 for x in base.all_blocks()}
    out = [StageGraph(base, base, 0, (), None,
                      tuple(sorted(vertex_birth.items())),
                      tuple(sorted(block_birth.items())))]
    next_k = 1
    for n in range(1, stages + 1):
        prev = out[-1].graph
        pairs = _stage_pairs(prev, block_birth, n, triples, skip_satisfied)
        value = 1
        if delta == "factorial":
            for i in range(2, n + 1):
                value *= i
        specs = [TripleSpec.of(v, left, right,
                               uniform_delta(prev, left, right, value))
                 for v, left, right in pairs]
        enlarged, records, next_k = delta_t_resolution(prev, specs, next_k)
        for rec in records:
            for _, sink in rec.sink_names:
                vertex_birth[sink] = n
            for _, name in rec.left_blocks:
                block_birth[name] = n
            for _, name in rec.right_blocks:
                block_birth[name] = n
        inclusion = GraphMorphism.of(
            prev, enlarged,
            {v: v for v in prev.vertices},
            {e: e for e in prev.edges})
        report = check_morphism(inclusion)
        assert report.ok, report.first_failure
        out.append(StageGraph(enlarged, base, n, records, inclusion,
                              tuple(sorted(vertex_birth.items())),
                              tuple(sorted(block_birth.items()))))
    return out


def run_plan(plan: ResolutionPlan,
             loader: Callable[[str], SeparatedGraph]) -> list[StageGraph]:
    base = loader(plan.base)
    return build_resolution(base, plan.stages, plan.triples, plan.delta,
                            plan.skip_satisfied)


# -- monoid transfer -----------------------------------------------------------


def unitary_image(stage: StageGraph) -> dict[str, MonoidElement]:
    """The generator-wise inclusion of the base monoid into a stage monoid.

    Base blocks survive each pass unchanged, so base generators keep their
    names; the map is the identity on them.
    """
    base_p = presentation_of(stage.base)
    return {gen: MonoidElement.single(gen) for gen in base_p.generators}


@dataclass(frozen=True)
class TransferRow:
    a: MonoidElement
    b: MonoidElement
    base_result: EqResult
    stage_result: EqResult

    @property
    def consistent(self) -> bool:
        # images of equal elements can never become distinguishable
        if self.base_result.is_equal:
            return not self.stage_result.is_not_equal
        return True


def transfer_verdicts(stage: StageGraph,
                      pairs: Sequence[tuple[MonoidElement, MonoidElement]],
                      budget: Budget = Budget()) -> tuple[TransferRow, ...]:
    """Decide each pair in the base monoid and again in the stage monoid."""
    base_p = presentation_of(stage.base)
    stage_p = presentation_of(stage.graph)
    rows = []
    for a, b in pairs:
        rows.append(TransferRow(
            a, b,
            monoid_eq(base_p, a, b, budget),
            monoid_eq(stage_p, a, b, budget)))
    return tuple(rows)


# -- the refinement lifting property --------------------------------------------


@dataclass(frozen=True)
class LiftCheck:
    label: str
    result: EqResult


@dataclass(frozen=True)
class LiftResult:
    ok: bool
    checks: tuple[LiftCheck, ...]
    images: dict[str, MonoidElement]

    @property
    def failures(self) -> tuple[LiftCheck, ...]:
        return tuple(c for c in self.checks if not c.result.is_equal)


def delta_refinement_lift(stage: StageGraph, target: MonoidPresentation,
                          images: Mapping[str, MonoidElement],
                          sink_images: Mapping[str, MonoidElement],
                          budget: Budget = Budget()) -> LiftResult:
    """Extend a base-monoid map through the staged construction.

    ``images`` sends every base generator into the target monoid;
    ``sink_images`` chooses a refinement witness for every adjoined sink.
    The extended map is checked against every defining relation of the stage
    graph's monoid, which covers both the base relations and each triple's
    row and column identities; the extension restricted along the inclusion
    is the original map by construction.
    """
    base_p = presentation_of(stage.base)
    stage_p = presentation_of(stage.graph)
    extended: dict[str, MonoidElement] = {}
    for gen in base_p.generators:
        if gen not in images:
            raise ResolutionError(f"missing image for base generator {gen!r}")
        extended[gen] = images[gen]
    for gen in stage_p.generators:
        if gen in extended:
            continue
        if gen not in sink_images:
            raise ResolutionError(f"missing image for adjoined sink {gen!r}")
        extended[gen] = sink_images[gen]

    def push(x: MonoidElement) -> MonoidElement:
        total = MonoidElement.zero()
        for gen, c in x.terms:
            total = total + extended[gen].scale(c)
        return total

    checks: list[LiftCheck] = []
    for rel in stage_p.relations:
        label = f"{rel.vertex} via {rel.block}"
        lhs = push(MonoidElement.single(rel.vertex))
        rhs = push(rel.rhs)
        checks.append(LiftCheck(label, monoid_eq(target, lhs, rhs, budget)))
    ok = all(c.result.is_equal for c in checks)
    return LiftResult(ok, tuple(checks), extended)


# -- divisibility --------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    verdict: str  # "divisible" | "unknown"
    modulus: int
    witness: MonoidElement | None = None
    quotient: MonoidElement | None = None
    trace: tuple[Step, ...] = ()
    explored: int = 0

    @property
    def is_divisible(self) -> bool:
        return self.verdict == "divisible"


def divisibility_probe(p: MonoidPresentation, vertex: str, modulus: int,
                       budget: Budget = Budget()) -> ProbeResult:
    """Search forward from a vertex for a nonzero multiple of the modulus.

    Finds an element congruent to the vertex all of whose multiplicities are
    divisible by the modulus, which exhibits the vertex as a multiple in the
    monoid; the trace replays the substitutions.
    """
    if modulus < 2:
        raise ResolutionError("modulus must be at least 2")
    start = MonoidElement.single(vertex)
    p.validate(start)
    parents: dict[MonoidElement, tuple[MonoidElement, Step] | None] = {start: None}
    frontier = [start]
    depth = 0
    while frontier and depth < budget.max_depth:
        nxt: list[MonoidElement] = []
        for cur in frontier:
            for step, result in forward_steps(p, cur):
                if result in parents:
                    continue
                if result.size > budget.max_size:
                    continue
                if len(parents) >= budget.max_frontier:
                    break
                parents[result] = (cur, step)
                if (not result.is_zero()
                        and all(c % modulus == 0 for _, c in result.terms)):
                    steps = []
                    node = result
                    while parents[node] is not None:
                        prev, st = parents[node]
                        steps.append(st)
                        node = prev
                    quotient = MonoidElement.of(
                        {gen: c // modulus for gen, c in result.terms})
                    return ProbeResult("divisible", modulus, result, quotient,
                                       tuple(reversed(steps)), len(parents))
                nxt.append(result)
            if len(parents) >= budget.max_frontier:
                break
        frontier = nxt
        depth += 1
    return ProbeResult("unknown", modulus, explored=len(parents))


# -- free covers of one-relation monoids ----------------------------------------


@dataclass(frozen=True)
class InjectivityReport:
    ok: bool
    forms: int
    collisions: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class DivisorReport:
    divides: bool
    lam_low: int
    lam_high: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    verified: bool


class FreeCover:
    """The embedding of a one-relation sum monoid into a free monoid.

    The monoid has generators split into a row family and a column family,
    subject only to the two total sums being equal; a positive integer matrix
    sends each row generator to its weighted row and each column generator to
    its weighted column in the free monoid on the matrix positions. Elements
    are handled through canonical forms in which the column part touches
    zero.
    """

    def __init__(self, delta: Sequence[Sequence[int]]):
        self.delta = tuple(tuple(int(c) for c in row) for row in delta)
        self.m = len(self.delta)
        if self.m < 1 or any(len(r) != len(self.delta[0]) for r in self.delta):
            raise ResolutionError("matrix must be rectangular and nonempty")
        self.n = len(self.delta[0])
        if self.n < 1 or any(c < 1 for row in self.delta for c in row):
            raise ResolutionError("matrix entries must be positive")

    # elements are (row multiplicities, column multiplicities)
    def canon(self, lam: Sequence[int], mu: Sequence[int]):
        lam = list(lam)
        mu = list(mu)
        if len(lam) != self.m or len(mu) != self.n:
            raise ResolutionError("element shape does not match the matrix")
        if any(c < 0 for c in lam + mu):
            raise ResolutionError("negative multiplicity")
        shift = min(mu)
        return (tuple(l + shift for l in lam), tuple(u - shift for u in mu))

    def equal(self, u, v) -> bool:
        return self.canon(*u) == self.canon(*v)

    def image(self, lam: Sequence[int], mu: Sequence[int]) -> tuple[int, ...]:
        out = []
        for i in range(self.m):
            for j in range(self.n):
                out.append(self.delta[i][j] * (lam[i] + mu[j]))
        return tuple(out)

    def canonical_forms(self, bound: int):
        """All canonical forms with every multiplicity at most the bound."""
        forms = []
        for lam in itertools.product(range(bound + 1), repeat=self.m):
            for mu in itertools.product(range(bound + 1), repeat=self.n):
                if min(mu) == 0:
                    forms.append((lam, mu))
        return forms

    def injectivity_test(self, bound: int) -> InjectivityReport:
        """Check the map is one-to-one on all canonical forms up to a bound."""
        forms = self.canonical_forms(bound)
        seen: dict[tuple[int, ...], tuple] = {}
        collisions = []
        for form in forms:
            img = self.image(*form)
            if img in seen and seen[img] != form:
                collisions.append((str(seen[img]), str(form)))
            else:
                seen[img] = form
        return InjectivityReport(not collisions, len(forms), tuple(collisions))

    def divisor_check(self, u, uprime) -> DivisorReport:
        """When the image of one element divides the image of another, the
        division must already happen upstairs; exhibit the quotient."""
        lam, mu = self.canon(*u)
        lamp, mup = self.canon(*uprime)
        img_u = self.image(lam, mu)
        img_up = self.image(lamp, mup)
        if any(a > b for a, b in zip(img_u, img_up)):
            return DivisorReport(False, 0, -1, None, True)
        low = max(lam[i] - lamp[i] for i in range(self.m))
        high = min(mup[j] - mu[j] for j in range(self.n))
        if low > high:
            return DivisorReport(True, low, high, None, False)
        t = max(low, min(high, 0))
        w_lam = tuple(lamp[i] + t - lam[i] for i in range(self.m))
        w_mu = tuple(mup[j] - mu[j] - t for j in range(self.n))
        sum_ok = tuple(a + b for a, b in zip(img_u, self.image(w_lam, w_mu))) \
            == img_up
        total = (tuple(lam[i] + w_lam[i] for i in range(self.m)),
                 tuple(mu[j] + w_mu[j] for j in range(self.n)))
        verified = sum_ok and self.equal(total, (lamp, mup))
        return DivisorReport(True, low, high, (w_lam, w_mu), verified)

    def cofinal_bound(self, f: Sequence[int]) -> int:
        """A multiple of the total row sum whose image dominates f."""
        if len(f) != self.m * self.n:
            raise ResolutionError("free element shape mismatch")
        need = 0
        idx = 0
        for i in range(self.m):
            for j in range(self.n):
                need = max(need, -(-int(f[idx]) // self.delta[i][j]))
                idx += 1
        lam = tuple(need for _ in range(self.m))
        mu = tuple(0 for _ in range(self.n))
        img = self.image(lam, mu)
        assert all(a <= b for a, b in zip(f, img))
        return need

    def as_graph_presentation(self):
        """The same monoid as a partitioned graph, for cross-checking."""
        xs = [f"x{i}" for i in range(1, self.m + 1)]
        ys = [f"y{j}" for j in range(1, self.n + 1)]
        lhs = {x: 1 for x in xs}
        rhs = {y: 1 for y in ys}
        presented = presentation_to_graph(xs + ys, [(lhs, rhs)],
                                          name="free_cover_check")
        return presented

    def to_monoid_element(self, lam, mu) -> MonoidElement:
        counts = {f"x{i + 1}": lam[i] for i in range(self.m)}
        for j in range(self.n):
            counts[f"y{j + 1}"] = mu[j]
        return MonoidElement.of(counts)

    def cross_check(self, samples: int = 25, seed: int = 0,
                    budget: Budget = Budget()) -> bool:
        """Canonical-form equality must agree with the graph monoid's own
        decision procedure on random pairs."""
        rng = random.Random(seed)
        presented = self.as_graph_presentation()
        assert presented.recovered
        p = presentation_of(presented.graph)
        for _ in range(samples):
            u = (tuple(rng.randrange(3) for _ in range(self.m)),
                 tuple(rng.randrange(3) for _ in range(self.n)))
            v = (tuple(rng.randrange(3) for _ in range(self.m)),
                 tuple(rng.randrange(3) for _ in range(self.n)))
            want = self.equal(u, v)
            got = monoid_eq(p, self.to_monoid_element(*u),
                            self.to_monoid_element(*v), budget)
            if want and not got.is_equal:
                return False
            if not want and not got.is_not_equal:
                return False
        return True
