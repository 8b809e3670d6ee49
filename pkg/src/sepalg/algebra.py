"""Exact arithmetic and normal forms in the algebra of a partitioned graph.

The algebra is presented by the graph's vertices (orthogonal idempotents),
edges, and formal adjoints ("ghost" letters), subject to the usual
composability relations, to ghost-edge cancellation inside a single block,
and, for each full block, to the relation letting the block's projections sum
to the block's vertex.

Elements are finite linear combinations of composable words over edge and
ghost letters. Composability is structural: a word that would multiply
through a mismatched junction simply does not exist, and such products are
zero. The two rewrite rules that remain explicit are

* ghost-edge: ``e* f`` with ``e``, ``f`` in one block collapses to the range
  vertex when ``e == f`` and to zero otherwise;
* pivot-collapse: for a full block ``X`` with pivot edge ``p`` (the least
  edge name in ``X``), ``p p*`` rewrites to the block's vertex minus the sum
  of ``f f*`` over the other edges ``f`` of ``X``.

Rewriting terminates because every step strictly drops a word weight in
which pivot edges weigh 2 and all other letters weigh 1; this drop is
asserted at every step. The normal form does not depend on the order in
which redexes are picked; ``normalize`` exposes a leftmost and a seeded
random strategy so the independence is testable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .fields import QQ, PrimeField, Rationals
from .graphs import ParseError, SeparatedGraph


class AlgebraError(ValueError):
    pass


Letter = tuple[str, bool]  # (edge name, ghost?)


@dataclass(frozen=True)
class Word:
    """A composable word of edge/ghost letters, or a single vertex."""

    letters: tuple[Letter, ...]
    vertex: str = ""

    def is_vertex(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        if self.is_vertex():
            return self.vertex
        return " ".join(e + ("*" if ghost else "") for e, ghost in self.letters)

    def key(self) -> tuple[int, str]:
        return (len(self.letters), str(self))


def letter_src(g: SeparatedGraph, letter: Letter) -> str:
    e, ghost = letter
    return g.rng(e) if ghost else g.src(e)


def letter_rng(g: SeparatedGraph, letter: Letter) -> str:
    e, ghost = letter
    return g.src(e) if ghost else g.rng(e)


def word_src(g: SeparatedGraph, w: Word) -> str:
    return w.vertex if w.is_vertex() else letter_src(g, w.letters[0])


def word_rng(g: SeparatedGraph, w: Word) -> str:
    return w.vertex if w.is_vertex() else letter_rng(g, w.letters[-1])


def vertex_word(g: SeparatedGraph, v: str) -> Word:
    if not g.has_vertex(v):
        raise AlgebraError(f"unknown vertex {v!r}")
    return Word((), v)


def make_word(g: SeparatedGraph, letters: Iterable[Letter]) -> Word:
    """Validate composability and build a word (empty input is rejected)."""
    ls = tuple(letters)
    if not ls:
        raise AlgebraError("use vertex_word for empty words")
    for e, _ in ls:
        if not g.has_edge(e):
            raise AlgebraError(f"unknown edge {e!r}")
    for a, b in zip(ls, ls[1:]):
        if letter_rng(g, a) != letter_src(g, b):
            raise AlgebraError(f"non-composable letters {a} {b}")
    return Word(ls)


def pivot_edge(g: SeparatedGraph, block: str) -> str:
    """The distinguished edge of a block: the least edge name in it."""
    return g.block_edges(block)[0]


def word_weight(g: SeparatedGraph, w: Word) -> int:
    if w.is_vertex():
        return 1
    total = 0
    for e, ghost in w.letters:
        x = g.block_of(e)
        heavy = (not ghost) and g.is_full(x) and pivot_edge(g, x) == e
        total += 2 if heavy else 1
    return total


def word_degree(w: Word) -> int:
    return sum(-1 if ghost else 1 for _, ghost in w.letters)


def star_word(w: Word) -> Word:
    if w.is_vertex():
        return w
    return Word(tuple((e, not ghost) for e, ghost in reversed(w.letters)))


# -- elements ----------------------------------------------------------------


class AlgebraElement:
    """A finite linear combination of composable words.

    Immutable; terms are kept sorted by (length, text) with zero coefficients
    dropped. Equality is structural, so semantically equal elements compare
    equal exactly when both are in normal form.
    """

    __slots__ = ("graph", "field", "terms")

    def __init__(self, graph: SeparatedGraph, coeffs: Mapping[Word, object],
                 field: Rationals | PrimeField = QQ):
        self.graph = graph
        self.field = field
        zero = field.zero
        cleaned = {w: c for w, c in coeffs.items() if c != zero}
        self.terms: tuple[tuple[Word, object], ...] = tuple(
            sorted(cleaned.items(), key=lambda item: item[0].key())
        )

    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict[Word, object]:
        return dict(self.terms)

    def _compat(self, other: "AlgebraElement") -> None:
        if self.graph != other.graph:
            raise AlgebraError("elements live over different graphs")
        if self.field != other.field:
            raise AlgebraError("elements live over different scalar fields")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._compat(other)
        out = dict(self.terms)
        for w, c in other.terms:
            out[w] = out.get(w, self.field.zero) + c
        return AlgebraElement(self.graph, out, self.field)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.graph, {w: -c for w, c in self.terms},
                              self.field)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(self.graph, {w: cc * c for w, cc in self.terms},
                              self.field)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        """Concatenation product followed by normalization."""
        return normalize(concat_product(self, other))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, AlgebraElement)
                and other.graph == self.graph
                and other.field == self.field
                and other.terms == self.terms)

    def __hash__(self) -> int:
        return hash((self.graph, self.field, self.terms))

    def __str__(self) -> str:
        return print_expr(self)

    def __repr__(self) -> str:
        return f"<{print_expr(self)}>"


def zero_element(g: SeparatedGraph, field=QQ) -> AlgebraElement:
    return AlgebraElement(g, {}, field)


def vertex_element(g: SeparatedGraph, v: str, field=QQ) -> AlgebraElement:
    return AlgebraElement(g, {vertex_word(g, v): field.one}, field)


def edge_element(g: SeparatedGraph, e: str, field=QQ) -> AlgebraElement:
    return AlgebraElement(g, {make_word(g, [(e, False)]): field.one}, field)


def ghost_element(g: SeparatedGraph, e: str, field=QQ) -> AlgebraElement:
    return AlgebraElement(g, {make_word(g, [(e, True)]): field.one}, field)


def word_concat(g: SeparatedGraph, a: Word, b: Word) -> Word | None:
    """Concatenation, or None when the junction does not compose."""
    if a.is_vertex():
        return b if word_src(g, b) == a.vertex else None
    if b.is_vertex():
        return a if word_rng(g, a) == b.vertex else None
    if word_rng(g, a) != word_src(g, b):
        return None
    return Word(a.letters + b.letters)


def concat_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """The raw bilinear concatenation product (not normalized)."""
    a._compat(b)
    out: dict[Word, object] = {}
    zero = a.field.zero
    for wa, ca in a.terms:
        for wb, cb in b.terms:
            w = word_concat(a.graph, wa, wb)
            if w is None:
                continue
            out[w] = out.get(w, zero) + ca * cb
    return AlgebraElement(a.graph, out, a.field)


def star(x: AlgebraElement) -> AlgebraElement:
    """The adjoint: reverses words, swaps edge and ghost letters."""
    return AlgebraElement(x.graph, {star_word(w): c for w, c in x.terms},
                          x.field)


def degree_split(x: AlgebraElement) -> dict[int, AlgebraElement]:
    """Split into homogeneous parts by (edge count - ghost count)."""
    parts: dict[int, dict[Word, object]] = {}
    for w, c in x.terms:
        parts.setdefault(word_degree(w), {})[w] = c
    return {d: AlgebraElement(x.graph, coeffs, x.field)
            for d, coeffs in sorted(parts.items())}


def q_idempotent(g: SeparatedGraph, v: str, edges: Iterable[str],
                 field=QQ) -> AlgebraElement:
    """The idempotent ``v - sum(e e* for e in Z)`` for Z inside one block.

    Z must be a nonempty subset of a single block at v. The result is zero
    exactly when Z is the whole of a full block.
    """
    zs = sorted(set(edges))
    if not zs:
        raise AlgebraError("need a nonempty edge subset")
    blocks = {g.block_of(e) for e in zs}
    if len(blocks) != 1:
        raise AlgebraError(f"edges {zs} do not lie in a single block")
    x = next(iter(blocks))
    if g.block_vertex(x) != v:
        raise AlgebraError(f"block {x!r} is not based at {v!r}")
    out = vertex_element(g, v, field)
    for e in zs:
        w = make_word(g, [(e, False), (e, True)])
        out = out - AlgebraElement(g, {w: field.one}, field)
    return normalize(out)


# -- rewriting ----------------------------------------------------------------


def _redex_positions(g: SeparatedGraph, letters: tuple[Letter, ...]) -> list[int]:
    out = []
    for i in range(len(letters) - 1):
        (a, ga), (b, gb) = letters[i], letters[i + 1]
        if ga and not gb:
            if g.block_of(a) == g.block_of(b):
                out.append(i)
        elif not ga and gb:
            if a == b:
                x = g.block_of(a)
                if g.is_full(x) and pivot_edge(g, x) == a:
                    out.append(i)
    return out


def _apply_redex(g: SeparatedGraph, letters: tuple[Letter, ...],
                 i: int) -> list[tuple[Word, int]]:
    """Rewrite the redex at position i; returns (word, sign) children."""
    (a, ga), (b, _gb) = letters[i], letters[i + 1]
    rest = letters[:i] + letters[i + 2:]

    def as_word(ls: tuple[Letter, ...], spot_vertex: str) -> Word:
        return Word(ls) if ls else Word((), spot_vertex)

    if ga:  # ghost-edge inside one block
        if a != b:
            return []
        return [(as_word(rest, g.rng(a)), 1)]
    # pivot-collapse: a == b == pivot of a full block
    x = g.block_of(a)
    children: list[tuple[Word, int]] = [(as_word(rest, g.src(a)), 1)]
    for f in g.block_edges(x):
        if f == a:
            continue
        ls = letters[:i] + ((f, False), (f, True)) + letters[i + 2:]
        children.append((Word(ls), -1))
    return children


def _reduce_word(g: SeparatedGraph, w: Word, pick, field) -> dict[Word, object]:
    """Fully reduce one word; pick(positions) chooses the redex to fire."""
    out: dict[Word, object] = {}
    stack: list[tuple[Word, object]] = [(w, field.one)]
    while stack:
        cur, coeff = stack.pop()
        if cur.is_vertex():
            out[cur] = out.get(cur, field.zero) + coeff
            continue
        positions = _redex_positions(g, cur.letters)
        if not positions:
            out[cur] = out.get(cur, field.zero) + coeff
            continue
        i = pick(positions)
        parent_weight = word_weight(g, cur)
        for child, sign in _apply_redex(g, cur.letters, i):
            assert word_weight(g, child) < parent_weight, \
                f"rewrite failed to drop weight on {cur} -> {child}"
            stack.append((child, coeff if sign > 0 else -coeff))
    return out


def normalize(x: AlgebraElement, strategy: str = "leftmost",
              seed: int = 0) -> AlgebraElement:
    """Rewrite to the canonical normal form.

    ``strategy="leftmost"`` always fires the leftmost redex;
    ``strategy="random"`` picks uniformly with the given seed. The result is
    the same either way; normalization is idempotent.
    """
    if strategy == "leftmost":
        pick = lambda positions: positions[0]
    elif strategy == "random":
        rng = random.Random(seed)
        pick = lambda positions: positions[rng.randrange(len(positions))]
    else:
        raise AlgebraError(f"unknown strategy {strategy!r}")

    out: dict[Word, object] = {}
    zero = x.field.zero
    for w, c in x.terms:
        for nw, nc in _reduce_word(x.graph, w, pick, x.field).items():
            out[nw] = out.get(nw, zero) + nc * c
    return AlgebraElement(x.graph, out, x.field)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Product in the algebra: concatenate, then normalize."""
    return normalize(concat_product(a, b))


def is_normal_word(g: SeparatedGraph, w: Word) -> bool:
    return w.is_vertex() or not _redex_positions(g, w.letters)


# -- basis enumeration ---------------------------------------------------------


def _letter_can_follow(g: SeparatedGraph, prev: Letter | None,
                       nxt: Letter) -> bool:
    if prev is not None:
        if letter_rng(g, prev) != letter_src(g, nxt):
            return False
        (a, ga), (b, gb) = prev, nxt
        if ga and not gb and g.block_of(a) == g.block_of(b):
            return False
        if not ga and gb and a == b:
            x = g.block_of(a)
            if g.is_full(x) and pivot_edge(g, x) == a:
                return False
    return True


def enumerate_basis(g: SeparatedGraph, max_len: int) -> list[Word]:
    """All normal-form words of length at most ``max_len``.

    These words form a linear basis of the algebra: vertices, then words
    built letter by letter so that no junction carries a redex.
    """
    if max_len < 0:
        raise AlgebraError("max_len must be >= 0")
    letters: list[Letter] = []
    for e in g.edges:
        letters.append((e, False))
        letters.append((e, True))

    out: list[Word] = [vertex_word(g, v) for v in g.vertices]
    layer: list[tuple[Letter, ...]] = [()]
    for _ in range(max_len):
        nxt: list[tuple[Letter, ...]] = []
        for ls in layer:
            prev = ls[-1] if ls else None
            for letter in letters:
                if ls and letter_rng(g, prev) != letter_src(g, letter):
                    continue
                if not _letter_can_follow(g, prev, letter):
                    continue
                nxt.append(ls + (letter,))
        out.extend(Word(ls) for ls in nxt)
        layer = nxt
    out.sort(key=Word.key)
    return out


# -- direct product formula (no full blocks) -----------------------------------


def _chop_last(g: SeparatedGraph, w: Word) -> Word:
    ls = w.letters[:-1]
    return Word(ls) if ls else Word((), letter_src(g, w.letters[-1]))


def _chop_first(g: SeparatedGraph, w: Word) -> Word:
    ls = w.letters[1:]
    return Word(ls) if ls else Word((), letter_rng(g, w.letters[0]))


def _cohn_word_product(g: SeparatedGraph, u: Word, v: Word) -> Word | None:
    if u.is_vertex():
        return v if word_src(g, v) == u.vertex else None
    if v.is_vertex():
        return u if word_rng(g, u) == v.vertex else None
    if word_rng(g, u) != word_src(g, v):
        return None
    (a, ga), (b, gb) = u.letters[-1], v.letters[0]
    if ga and not gb and g.block_of(a) == g.block_of(b):
        if a != b:
            return None
        return _cohn_word_product(g, _chop_last(g, u), _chop_first(g, v))
    return Word(u.letters + v.letters)


def cohn_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Closed-form product valid when the graph has no full blocks.

    Cancels the touching ghost/edge runs letter by letter and splices the
    remainders; serves as an independent oracle for ``multiply``.
    """
    a._compat(b)
    g = a.graph
    if g.full_blocks:
        raise AlgebraError("direct product formula requires no full blocks")
    out: dict[Word, object] = {}
    zero = a.field.zero
    for wa, ca in a.terms:
        for wb, cb in b.terms:
            w = _cohn_word_product(g, wa, wb)
            if w is None:
                continue
            out[w] = out.get(w, zero) + ca * cb
    return AlgebraElement(a.graph, out, a.field)


# -- expression text -----------------------------------------------------------


_TOKEN_RE = None


def _tokenize_expr(text: str) -> list[str]:
    import re
    global _TOKEN_RE
    if _TOKEN_RE is None:
        _TOKEN_RE = re.compile(
            r"\s*(\(|\)|/|\+|-|\*|[A-Za-z][A-Za-z0-9_.@-]*\*?|[0-9]+)")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad expression near {text[pos:pos+12]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_expr(g: SeparatedGraph, text: str, field=QQ) -> AlgebraElement:
    """Parse ``(c/d) * a1 a2* ... + ...`` style element expressions.

    Terms are joined with ``+``/``-``; each term is an optional integer or
    parenthesized fraction coefficient, an optional ``*`` separator, and a
    juxtaposed run of atoms. Atoms are vertex names, edge names, or ghost
    names ``e*``. The bare expression ``0`` is the zero element.
    """
    tokens = _tokenize_expr(text)
    if not tokens:
        raise ParseError("empty expression")
    if tokens == ["0"]:
        return zero_element(g, field)

    out: dict[Word, object] = {}
    i = 0
    sign = 1
    first = True
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        if tok in "+-":
            if first:
                if tok == "-":
                    sign = -sign
                i += 1
                first = False
                continue
            sign = 1 if tok == "+" else -1
            i += 1
        elif first:
            first = False
        else:
            raise ParseError(f"expected '+' or '-' before {tok!r}")

        coeff = field.one
        if i < n and tokens[i].isdigit():
            coeff = field.of(int(tokens[i]))
            i += 1
        elif i < n and tokens[i] == "(":
            if i + 4 < n and tokens[i+1].isdigit() and tokens[i+2] == "/" \
                    and tokens[i+3].isdigit() and tokens[i+4] == ")":
                coeff = field.of(int(tokens[i+1]), int(tokens[i+3]))
                i += 5
            else:
                raise ParseError("expected '(c/d)' coefficient")
        if i < n and tokens[i] == "*":
            i += 1

        atoms: list[str] = []
        while i < n and tokens[i] not in "+-":
            atoms.append(tokens[i])
            i += 1
        if not atoms:
            raise ParseError("term with a coefficient but no atoms")

        word: Word | None = None
        for atom in atoms:
            ghost = atom.endswith("*")
            name = atom[:-1] if ghost else atom
            if g.has_vertex(name):
                if ghost:
                    raise ParseError(f"vertex {name!r} cannot carry '*'")
                piece = vertex_word(g, name)
            elif g.has_edge(name):
                piece = Word(((name, ghost),))
            else:
                raise ParseError(f"unknown atom {name!r}")
            if word is None:
                word = piece
            else:
                word = word_concat(g, word, piece)
                if word is None:
                    break
        if word is None:  # non-composable: the term is zero
            continue
        c = coeff if sign > 0 else -coeff
        out[word] = out.get(word, field.zero) + c
    return AlgebraElement(g, out, field)


def _coeff_text(c) -> tuple[bool, str]:
    """Returns (negative?, magnitude text or '' when the magnitude is 1)."""
    if isinstance(c, Fraction):
        neg = c < 0
        mag = -c if neg else c
        if mag == 1:
            return neg, ""
        if mag.denominator == 1:
            return neg, str(mag.numerator)
        return neg, f"({mag.numerator}/{mag.denominator})"
    # prime-field values have no sign; print the representative
    return False, "" if c.value == 1 else str(c.value)


def print_expr(x: AlgebraElement) -> str:
    if x.is_zero():
        return "0"
    parts: list[str] = []
    for idx, (w, c) in enumerate(x.terms):
        neg, mag = _coeff_text(c)
        body = f"{mag} * {w}" if mag else str(w)
        if idx == 0:
            parts.append(f"- {body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


# -- ops protocol ---------------------------------------------------------------


class AlgebraOps:
    """Ring operations on algebra elements, for the relation checker."""

    def __init__(self, graph: SeparatedGraph, field=QQ):
        self.graph = graph
        self.field = field

    @property
    def zero(self) -> AlgebraElement:
        return zero_element(self.graph, self.field)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return multiply(a, b)

    def scale(self, a, c):
        return a.scale(c)

    def is_zero(self, a) -> bool:
        return normalize(a).is_zero()

    def eq(self, a, b) -> bool:
        return self.is_zero(a - b)
