"""Relation checking and induced algebra homomorphisms.

The relation engine is deliberately generic: a relation is a pair of formal
sums of products of generator keys, and verification happens under any target
that provides ring operations and an equality test. The same engine checks

* the defining relations of a partitioned graph's algebra, under images in
  another graph algebra or in a square-matrix target, and
* the presentation of a matrix ring over the universal algebra generated by a
  rectangular isometry-like family (matrix units, centrality of the family,
  and the two product identities), used to certify the standard isomorphism
  for the two-bundle graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import (
    AlgebraElement,
    AlgebraError,
    AlgebraOps,
    Word,
    edge_element,
    ghost_element,
    make_word,
    normalize,
    star,
    vertex_element,
    vertex_word,
    zero_element,
)
from .fields import QQ
from .graphs import GraphMorphism, SeparatedGraph, check_morphism


# A relation is name, lhs, rhs; each side is a list of (sign, product) with
# the product a tuple of generator keys. Empty side means zero.
Side = Sequence[tuple[int, tuple[str, ...]]]


@dataclass(frozen=True)
class Relation:
    name: str
    lhs: tuple[tuple[int, tuple[str, ...]], ...]
    rhs: tuple[tuple[int, tuple[str, ...]], ...]

    @staticmethod
    def of(name: str, lhs: Side, rhs: Side) -> "Relation":
        return Relation(name, tuple((s, tuple(p)) for s, p in lhs),
                        tuple((s, tuple(p)) for s, p in rhs))


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    checked: int
    failures: tuple[str, ...]

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


def _eval_side(side, images, ops):
    total = ops.zero
    for sign, product in side:
        acc = None
        for key in product:
            if key not in images:
                raise AlgebraError(f"no image given for generator {key!r}")
            val = images[key]
            acc = val if acc is None else ops.mul(acc, val)
        if acc is None:
            raise AlgebraError("empty product in relation")
        total = ops.add(total, acc) if sign > 0 else ops.sub(total, acc)
    return total


def verify_relations(relations: Sequence[Relation], images: Mapping[str, object],
                     ops, max_failures: int = 5) -> RelationReport:
    """Evaluate every relation under the images; collect the first failures."""
    failures: list[str] = []
    checked = 0
    for rel in relations:
        checked += 1
        lhs = _eval_side(rel.lhs, images, ops)
        rhs = _eval_side(rel.rhs, images, ops)
        if not ops.eq(lhs, rhs):
            failures.append(rel.name)
            if len(failures) >= max_failures:
                break
    return RelationReport(not failures, checked, tuple(failures))


def graph_relations(g: SeparatedGraph) -> list[Relation]:
    """The defining relations of the graph's algebra.

    Generator keys are vertex names, edge names, and ghost names ``e*``.
    """
    rels: list[Relation] = []
    for u in g.vertices:
        for v in g.vertices:
            rhs = [(1, (u,))] if u == v else []
            rels.append(Relation.of(f"orth {u} {v}", [(1, (u, v))], rhs))
    for e in g.edges:
        s, r = g.src(e), g.rng(e)
        rels.append(Relation.of(f"lmult {e}", [(1, (s, e))], [(1, (e,))]))
        rels.append(Relation.of(f"rmult {e}", [(1, (e, r))], [(1, (e,))]))
        rels.append(Relation.of(f"lmult {e}*", [(1, (r, e + "*"))],
                                [(1, (e + "*",))]))
        rels.append(Relation.of(f"rmult {e}*", [(1, (e + "*", s))],
                                [(1, (e + "*",))]))
    for x in g.all_blocks():
        members = g.block_edges(x)
        for e in members:
            for f in members:
                rhs = [(1, (g.rng(e),))] if e == f else []
                rels.append(Relation.of(f"cancel {x} {e} {f}",
                                        [(1, (e + "*", f))], rhs))
    for x in sorted(g.full_blocks):
        v = g.block_vertex(x)
        rhs = [(1, (e, e + "*")) for e in g.block_edges(x)]
        rels.append(Relation.of(f"full {x}", [(1, (v,))], rhs))
    return rels


def generator_keys(g: SeparatedGraph) -> list[str]:
    keys = list(g.vertices)
    for e in g.edges:
        keys.append(e)
        keys.append(e + "*")
    return keys


def verify_hom(g: SeparatedGraph, images: Mapping[str, object],
               ops) -> RelationReport:
    """Check that generator images satisfy all of g's algebra relations.

    Images must be supplied for every vertex, edge, and ghost ``e*``; the
    target is anything the ops object can compute in.
    """
    for key in generator_keys(g):
        if key not in images:
            raise AlgebraError(f"missing image for generator {key!r}")
    return verify_relations(graph_relations(g), images, ops)


def evaluate_images(x: AlgebraElement, images: Mapping[str, object], ops):
    """Push an algebra element through generator images into the target."""
    total = ops.zero
    for w, c in x.terms:
        if w.is_vertex():
            acc = images[w.vertex]
        else:
            acc = None
            for e, ghost in w.letters:
                val = images[e + "*"] if ghost else images[e]
                acc = val if acc is None else ops.mul(acc, val)
        total = ops.add(total, ops.scale(acc, c))
    return total


# -- induced homomorphisms ---------------------------------------------------


@dataclass(frozen=True)
class AlgebraHom:
    """The algebra map induced by a structure-preserving graph map."""

    morphism: GraphMorphism

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        vmap, emap = self.morphism.vmap, self.morphism.emap
        target = self.morphism.target
        out: dict[Word, object] = {}
        for w, c in x.terms:
            if w.is_vertex():
                nw = vertex_word(target, vmap[w.vertex])
            else:
                nw = make_word(target, [(emap[e], ghost) for e, ghost in w.letters])
            out[nw] = out.get(nw, x.field.zero) + c
        return normalize(AlgebraElement(target, out, x.field))


def induced_hom(m: GraphMorphism) -> AlgebraHom:
    report = check_morphism(m)
    if not report.ok:
        raise AlgebraError(f"not a morphism: {report.first_failure}")
    return AlgebraHom(m)


def hom_images(m: GraphMorphism, field=QQ) -> dict[str, AlgebraElement]:
    """Generator images of the induced map, for the relation checker."""
    target = m.target
    images: dict[str, AlgebraElement] = {}
    for v, tv in m.vertex_map:
        images[v] = vertex_element(target, tv, field)
    for e, te in m.edge_map:
        images[e] = edge_element(target, te, field)
        images[e + "*"] = ghost_element(target, te, field)
    return images


# -- matrices over an algebra -------------------------------------------------


class MatrixOps:
    """Square matrices with entries driven by a base ops object."""

    def __init__(self, base, size: int):
        self.base = base
        self.size = size

    @property
    def zero(self):
        z = self.base.zero
        return tuple(tuple(z for _ in range(self.size)) for _ in range(self.size))

    def single(self, i: int, j: int, value):
        """Matrix with one nonzero entry at 1-based position (i, j)."""
        z = self.base.zero
        return tuple(
            tuple(value if (r, c) == (i - 1, j - 1) else z
                  for c in range(self.size))
            for r in range(self.size)
        )

    def diagonal(self, value):
        z = self.base.zero
        return tuple(
            tuple(value if r == c else z for c in range(self.size))
            for r in range(self.size)
        )

    def add(self, a, b):
        return tuple(
            tuple(self.base.add(a[r][c], b[r][c]) for c in range(self.size))
            for r in range(self.size)
        )

    def sub(self, a, b):
        return tuple(
            tuple(self.base.sub(a[r][c], b[r][c]) for c in range(self.size))
            for r in range(self.size)
        )

    def mul(self, a, b):
        out = []
        for r in range(self.size):
            row = []
            for c in range(self.size):
                acc = self.base.zero
                for k in range(self.size):
                    acc = self.base.add(acc, self.base.mul(a[r][k], b[k][c]))
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def scale(self, a, coeff):
        return tuple(
            tuple(self.base.scale(a[r][c], coeff) for c in range(self.size))
            for r in range(self.size)
        )

    def is_zero(self, a) -> bool:
        return all(self.base.is_zero(a[r][c])
                   for r in range(self.size) for c in range(self.size))

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))


# -- the two-bundle matrix model ----------------------------------------------


def bundle_graph(m: int, n: int) -> SeparatedGraph:
    """Two vertices joined by two full edge bundles of sizes n and m.

    Edges ``a1..an`` form block ``A`` and ``b1..bm`` form block ``B``; both
    blocks are full, so the source vertex equals each bundle's projection sum.
    """
    if m < 1 or n < 1:
        raise AlgebraError("bundle sizes must be positive")
    edges = {f"a{i}": ("v", "w") for i in range(1, n + 1)}
    edges.update({f"b{j}": ("v", "w") for j in range(1, m + 1)})
    blocks = {"A": [f"a{i}" for i in range(1, n + 1)],
              "B": [f"b{j}" for j in range(1, m + 1)]}
    return SeparatedGraph(f"bundles_{m}_{n}", ["v", "w"], edges, blocks,
                          ["A", "B"])


def matrix_ring_relations(m: int, n: int) -> list[Relation]:
    """Presentation of (m+1)-square matrices over the universal algebra on an
    m x n family with the two product identities.

    Generator keys: matrix units ``e.k.l`` (1-based), and central generators
    ``X.i.j`` / ``X*.i.j`` standing for scalar matrices. The unit is the sum
    of the diagonal matrix units.
    """
    size = m + 1
    rels: list[Relation] = []
    for k in range(1, size + 1):
        for l in range(1, size + 1):
            for p in range(1, size + 1):
                for q in range(1, size + 1):
                    rhs = [(1, (f"e.{k}.{q}",))] if l == p else []
                    rels.append(Relation.of(
                        f"unit {k}{l}x{p}{q}",
                        [(1, (f"e.{k}.{l}", f"e.{p}.{q}"))], rhs))
    scalars = [f"X.{i}.{j}" for i in range(1, m + 1) for j in range(1, n + 1)]
    scalars += [f"X*.{i}.{j}" for i in range(1, m + 1) for j in range(1, n + 1)]
    for s in scalars:
        for k in range(1, size + 1):
            for l in range(1, size + 1):
                rels.append(Relation.of(
                    f"central {s} e.{k}.{l}",
                    [(1, (s, f"e.{k}.{l}"))],
                    [(1, (f"e.{k}.{l}", s))]))
    unit = [(1, (f"e.{k}.{k}",)) for k in range(1, size + 1)]
    for i in range(1, m + 1):
        for k in range(1, m + 1):
            lhs = [(1, (f"X.{i}.{j}", f"X*.{k}.{j}")) for j in range(1, n + 1)]
            rels.append(Relation.of(f"rows {i}{k}", lhs,
                                    unit if i == k else []))
    for j in range(1, n + 1):
        for l in range(1, n + 1):
            lhs = [(1, (f"X*.{i}.{j}", f"X.{i}.{l}")) for i in range(1, m + 1)]
            rels.append(Relation.of(f"cols {j}{l}", lhs,
                                    unit if j == l else []))
    return rels


def matrix_ring_generator_keys(m: int, n: int) -> list[str]:
    size = m + 1
    keys = [f"e.{k}.{l}" for k in range(1, size + 1) for l in range(1, size + 1)]
    keys += [f"X.{i}.{j}" for i in range(1, m + 1) for j in range(1, n + 1)]
    keys += [f"X*.{i}.{j}" for i in range(1, m + 1) for j in range(1, n + 1)]
    return keys


class BundleModel:
    """The mutually inverse maps between a two-bundle graph algebra and the
    (m+1)-square matrix model over the corner family ``X.i.j = b_i* a_j``.

    One direction sends graph generators to matrices over the graph algebra
    itself (the family lives in the corner at the range vertex); the inverse
    direction is the corner sum ``M |-> sum_k B_k M[k][l] B_l*`` with
    ``B_k = b_k`` for ``k <= m`` and ``B_{m+1} = w``.
    """

    def __init__(self, m: int, n: int, field=QQ):
        self.m = m
        self.n = n
        self.field = field
        self.graph = bundle_graph(m, n)
        self.size = m + 1
        self.aops = AlgebraOps(self.graph, field)
        self.mops = MatrixOps(self.aops, self.size)
        g, f = self.graph, field
        self._w = vertex_element(g, "w", f)
        self._b = [edge_element(g, f"b{j}", f) for j in range(1, m + 1)]
        self._bs = [ghost_element(g, f"b{j}", f) for j in range(1, m + 1)]
        self._a = [edge_element(g, f"a{i}", f) for i in range(1, n + 1)]
        self._as = [ghost_element(g, f"a{i}", f) for i in range(1, n + 1)]

    # corner realization of the rectangular family
    def corner_x(self, i: int, j: int) -> AlgebraElement:
        return normalize(concat(self._bs[i - 1], self._a[j - 1]))

    def psi_images(self) -> dict[str, object]:
        """Graph generators as matrices (the forward direction)."""
        g, f, size = self.graph, self.field, self.size
        mops = self.mops
        images: dict[str, object] = {}
        diag_v = mops.zero
        for l in range(1, self.m + 1):
            diag_v = mops.add(diag_v, mops.single(l, l, self._w))
        images["v"] = diag_v
        images["w"] = mops.single(size, size, self._w)
        for i in range(1, self.n + 1):
            col = mops.zero
            row = mops.zero
            for l in range(1, self.m + 1):
                x = self.corner_x(l, i)
                col = mops.add(col, mops.single(l, size, x))
                row = mops.add(row, mops.single(size, l, normalize(star(x))))
            images[f"a{i}"] = col
            images[f"a{i}*"] = row
        for j in range(1, self.m + 1):
            images[f"b{j}"] = mops.single(j, size, self._w)
            images[f"b{j}*"] = mops.single(size, j, self._w)
        return images

    def corner_apply(self, mat) -> AlgebraElement:
        """The inverse direction on a matrix with corner entries."""
        g, f = self.graph, self.field
        left = self._b + [self._w]
        right = self._bs + [self._w]
        out = zero_element(g, f)
        for k in range(self.size):
            for l in range(self.size):
                out = out + concat(concat(left[k], mat[k][l]), right[l])
        return normalize(out)

    def matrix_generator(self, key: str):
        """The matrix standing for a matrix-ring generator key."""
        mops = self.mops
        kind, *parts = key.split(".")
        if kind == "e":
            k, l = int(parts[0]), int(parts[1])
            return mops.single(k, l, self._w)
        i, j = int(parts[0]), int(parts[1])
        x = self.corner_x(i, j)
        if kind == "X":
            return mops.diagonal(x)
        if kind == "X*":
            return mops.diagonal(normalize(star(x)))
        raise AlgebraError(f"unknown matrix generator {key!r}")

    def phi_images(self) -> dict[str, AlgebraElement]:
        """Matrix-ring generators as graph algebra elements (the inverse)."""
        g, f = self.graph, self.field
        left = self._b + [self._w]
        right = self._bs + [self._w]
        images: dict[str, AlgebraElement] = {}
        for k in range(1, self.size + 1):
            for l in range(1, self.size + 1):
                images[f"e.{k}.{l}"] = normalize(concat(left[k - 1], right[l - 1]))
        for i in range(1, self.m + 1):
            for j in range(1, self.n + 1):
                x = self.corner_x(i, j)
                total = x
                for l in range(self.m):
                    total = total + concat(concat(self._b[l], x), self._bs[l])
                img = normalize(total)
                images[f"X.{i}.{j}"] = img
                images[f"X*.{i}.{j}"] = normalize(star(img))
        return images


def concat(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    from .algebra import concat_product
    return concat_product(a, b)


@dataclass(frozen=True)
class BundleReport:
    forward_relations: RelationReport
    inverse_relations: RelationReport
    fixed_by_back_forth: tuple[tuple[str, bool], ...]
    fixed_by_forth_back: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return (self.forward_relations.ok and self.inverse_relations.ok
                and all(b for _, b in self.fixed_by_back_forth)
                and all(b for _, b in self.fixed_by_forth_back))


def bundle_isomorphism_report(m: int, n: int, field=QQ) -> BundleReport:
    """Certify the matrix-model isomorphism for the (m, n) two-bundle graph.

    Checks that the forward generator matrices satisfy the graph relations,
    that the inverse images satisfy the matrix-ring presentation, and that
    both composites fix every generator after normalization.
    """
    model = BundleModel(m, n, field)
    g = model.graph
    psi = model.psi_images()
    phi = model.phi_images()

    forward = verify_hom(g, psi, model.mops)
    inverse = verify_relations(matrix_ring_relations(m, n), phi, model.aops)

    gen_elems: dict[str, AlgebraElement] = {}
    for v in g.vertices:
        gen_elems[v] = vertex_element(g, v, field)
    for e in g.edges:
        gen_elems[e] = edge_element(g, e, field)
        gen_elems[e + "*"] = ghost_element(g, e, field)

    back_forth = []
    for key in generator_keys(g):
        got = model.corner_apply(psi[key])
        back_forth.append((key, got == normalize(gen_elems[key])))

    forth_back = []
    for key in matrix_ring_generator_keys(m, n):
        mat = evaluate_images(phi[key], psi, model.mops)
        want = model.matrix_generator(key)
        normalized = tuple(tuple(normalize(x) for x in row) for row in mat)
        want_n = tuple(tuple(normalize(x) for x in row) for row in want)
        forth_back.append((key, normalized == want_n))

    return BundleReport(forward, inverse, tuple(back_forth), tuple(forth_back))
