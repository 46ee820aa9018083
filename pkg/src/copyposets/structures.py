"""Finite binary relational structures.

A :class:`BinaryStructure` is a relation on the points ``0..n-1``. Everything
here is exhaustive and meant for desk-scale inputs (a dozen points or so):
embeddings are found by plain backtracking, copies by enumerating subsets.

Embeddings follow the strict convention: an injection ``f`` is an embedding
iff ``(x1, x2) in rho  <=>  (f(x1), f(x2)) in tau`` for *every* ordered pair,
the diagonal included, so loops are preserved in both directions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .common import DEFAULT_CAP, DomainError, ParseError, ResourceError

Pair = tuple[int, int]


class Shape(enum.Enum):
    """Recognised connected shapes.

    The two ``INVERSE_*`` tags only make a difference for countably infinite
    components (the reversed order of omega is not isomorphic to omega);
    :func:`shape_of` never reports them for finite structures.
    """

    FULL_RELATION = "full"
    COMPLETE_GRAPH = "complete"
    STRICT_LINEAR_ORDER = "strict_order"
    REFLEXIVE_LINEAR_ORDER = "reflexive_order"
    INVERSE_STRICT_LINEAR_ORDER = "inverse_strict_order"
    INVERSE_REFLEXIVE_LINEAR_ORDER = "inverse_reflexive_order"
    SINGLETON_NO_LOOP = "point"
    SINGLETON_LOOP = "loop_point"
    OTHER = "other"

    @classmethod
    def parse(cls, token: str) -> "Shape":
        t = token.strip()
        for member in cls:
            if t.lower() == member.value or t.upper() == member.name:
                return member
        aliases = {
            "fullrelation": cls.FULL_RELATION,
            "completegraph": cls.COMPLETE_GRAPH,
            "strictlinearorder": cls.STRICT_LINEAR_ORDER,
            "reflexivelinearorder": cls.REFLEXIVE_LINEAR_ORDER,
            "inversestrictlinearorder": cls.INVERSE_STRICT_LINEAR_ORDER,
            "inversereflexivelinearorder": cls.INVERSE_REFLEXIVE_LINEAR_ORDER,
            "singletonnoloop": cls.SINGLETON_NO_LOOP,
            "singletonloop": cls.SINGLETON_LOOP,
            "f": cls.FULL_RELATION,
            "k": cls.COMPLETE_GRAPH,
            "l": cls.STRICT_LINEAR_ORDER,
        }
        try:
            return aliases[t.lower().replace("_", "")]
        except KeyError:
            raise ValueError(f"unknown shape {token!r}") from None


@dataclass(frozen=True)
class BinaryStructure:
    """A binary relation on the points ``0..n-1`` (loops allowed)."""

    n: int
    relation: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"negative point count {self.n}")
        rel = frozenset((int(u), int(v)) for u, v in self.relation)
        for u, v in rel:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"pair ({u}, {v}) outside points 0..{self.n - 1}")
        object.__setattr__(self, "relation", rel)

    @property
    def points(self) -> range:
        return range(self.n)

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.relation:
            masks[u] |= 1 << v
        return tuple(masks)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.relation:
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def signatures(self) -> tuple[tuple[int, int, int], ...]:
        """Per point: (has loop, out-degree, in-degree), loops excluded from degrees."""
        sigs = []
        for x in range(self.n):
            bit = 1 << x
            loop = 1 if self.out_masks[x] & bit else 0
            sigs.append((loop, (self.out_masks[x] & ~bit).bit_count(), (self.in_masks[x] & ~bit).bit_count()))
        return tuple(sigs)

    def related(self, u: int, v: int) -> bool:
        return bool(self.out_masks[u] >> v & 1)

    def __repr__(self) -> str:
        pairs = sorted(self.relation)
        return f"BinaryStructure(n={self.n}, relation={pairs})"


# -- Standard structures ------------------------------------------------------

def empty(n: int) -> BinaryStructure:
    return BinaryStructure(n, frozenset())


def diagonal(n: int) -> BinaryStructure:
    return BinaryStructure(n, frozenset((i, i) for i in range(n)))


def full(n: int) -> BinaryStructure:
    """F_n: every ordered pair, loops included."""
    return BinaryStructure(n, frozenset((i, j) for i in range(n) for j in range(n)))


def complete(n: int) -> BinaryStructure:
    """K_n: all off-diagonal pairs."""
    return BinaryStructure(n, frozenset((i, j) for i in range(n) for j in range(n) if i != j))


def strict_order(n: int) -> BinaryStructure:
    """L_n: the chain 0 < 1 < ... < n-1."""
    return BinaryStructure(n, frozenset((i, j) for i in range(n) for j in range(n) if i < j))


def reflexive_order(n: int) -> BinaryStructure:
    return BinaryStructure(n, frozenset((i, j) for i in range(n) for j in range(n) if i <= j))


def path(n: int) -> BinaryStructure:
    """Undirected path graph 0 - 1 - ... - n-1 (symmetric, irreflexive)."""
    rel = set()
    for i in range(n - 1):
        rel |= {(i, i + 1), (i + 1, i)}
    return BinaryStructure(n, frozenset(rel))


def cycle(n: int) -> BinaryStructure:
    """Undirected cycle graph on n >= 3 points."""
    if n < 3:
        raise DomainError("a cycle needs at least 3 points")
    rel = set()
    for i in range(n):
        j = (i + 1) % n
        rel |= {(i, j), (j, i)}
    return BinaryStructure(n, frozenset(rel))


def oriented_cycle(n: int) -> BinaryStructure:
    if n < 2:
        raise DomainError("an oriented cycle needs at least 2 points")
    return BinaryStructure(n, frozenset((i, (i + 1) % n) for i in range(n)))


_SHAPE_BUILDERS = {
    Shape.FULL_RELATION: full,
    Shape.COMPLETE_GRAPH: complete,
    Shape.STRICT_LINEAR_ORDER: strict_order,
    Shape.REFLEXIVE_LINEAR_ORDER: reflexive_order,
    Shape.INVERSE_STRICT_LINEAR_ORDER: strict_order,
    Shape.INVERSE_REFLEXIVE_LINEAR_ORDER: reflexive_order,
    Shape.SINGLETON_NO_LOOP: empty,
    Shape.SINGLETON_LOOP: diagonal,
}


def shape_structure(shape: Shape, n: int) -> BinaryStructure:
    """The finite structure of the given shape on ``n`` points.

    Finite inverse orders are isomorphic to the orders themselves, so the
    plain chain is returned for them.
    """
    if shape is Shape.OTHER:
        raise DomainError("Shape.OTHER has no canonical structure")
    if shape in (Shape.SINGLETON_NO_LOOP, Shape.SINGLETON_LOOP) and n != 1:
        raise DomainError(f"{shape.name} has exactly one point, not {n}")
    return _SHAPE_BUILDERS[shape](n)


def disjoint_union(parts: Iterable[BinaryStructure]) -> BinaryStructure:
    rel = []
    offset = 0
    for part in parts:
        rel.extend((u + offset, v + offset) for u, v in part.relation)
        offset += part.n
    return BinaryStructure(offset, frozenset(rel))


def relabel(X: BinaryStructure, perm: Sequence[int]) -> BinaryStructure:
    """Image of ``X`` under the bijection ``x -> perm[x]``."""
    if sorted(perm) != list(range(X.n)):
        raise DomainError("perm is not a permutation of the points")
    return BinaryStructure(X.n, frozenset((perm[u], perm[v]) for u, v in X.relation))


# -- Operations ---------------------------------------------------------------

def induced(X: BinaryStructure, A: Iterable[int]) -> BinaryStructure:
    """Substructure on ``A``, relabelled ascending to ``0..|A|-1``."""
    pts = sorted(set(A))
    if pts and (pts[0] < 0 or pts[-1] >= X.n):
        raise DomainError(f"subset {pts} is not contained in the points of X")
    index = {p: i for i, p in enumerate(pts)}
    rel = frozenset((index[u], index[v]) for u, v in X.relation if u in index and v in index)
    return BinaryStructure(len(pts), rel)


@dataclass(frozen=True)
class ComponentPartition:
    blocks: tuple[frozenset[int], ...]
    block_of: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.blocks)


def components(X: BinaryStructure) -> ComponentPartition:
    """Classes of the equivalence generated by the relation, ordered by least point."""
    adjacency = [X.out_masks[x] | X.in_masks[x] for x in range(X.n)]
    block_of = [-1] * X.n
    blocks = []
    for start in range(X.n):
        if block_of[start] != -1:
            continue
        idx = len(blocks)
        seen = 1 << start
        frontier = [start]
        while frontier:
            x = frontier.pop()
            new = adjacency[x] & ~seen
            seen |= new
            while new:
                low = new & -new
                frontier.append(low.bit_length() - 1)
                new ^= low
        members = frozenset(i for i in range(X.n) if seen >> i & 1)
        for i in members:
            block_of[i] = idx
        blocks.append(members)
    return ComponentPartition(tuple(blocks), tuple(block_of))


def is_connected(X: BinaryStructure) -> bool:
    return X.n > 0 and len(components(X)) == 1


def _consistent(X: BinaryStructure, Y: BinaryStructure, x: int, y: int, assigned: list[tuple[int, int]]) -> bool:
    if X.related(x, x) != Y.related(y, y):
        return False
    xo, xi = X.out_masks[x], X.in_masks[x]
    yo, yi = Y.out_masks[y], Y.in_masks[y]
    for x2, y2 in assigned:
        if (xo >> x2 & 1) != (yo >> y2 & 1) or (xi >> x2 & 1) != (yi >> y2 & 1):
            return False
    return True


def iter_embeddings(X: BinaryStructure, Y: BinaryStructure) -> Iterator[tuple[int, ...]]:
    """Embeddings of X into Y as tuples ``(f(0), ..., f(n-1))`` in lexicographic order."""
    n, m = X.n, Y.n
    if n > m:
        return
    image = [0] * n
    assigned: list[tuple[int, int]] = []
    used = [False] * m

    def extend(x: int) -> Iterator[tuple[int, ...]]:
        if x == n:
            yield tuple(image)
            return
        for y in range(m):
            if used[y] or not _consistent(X, Y, x, y, assigned):
                continue
            used[y] = True
            image[x] = y
            assigned.append((x, y))
            yield from extend(x + 1)
            assigned.pop()
            used[y] = False

    yield from extend(0)


def embeddings(X: BinaryStructure, Y: BinaryStructure) -> list[tuple[int, ...]]:
    return list(iter_embeddings(X, Y))


def copies(X: BinaryStructure, Y: BinaryStructure) -> frozenset[frozenset[int]]:
    """Domains of the substructures of Y isomorphic to X."""
    return frozenset(frozenset(f) for f in iter_embeddings(X, Y))


def find_isomorphism(X: BinaryStructure, Y: BinaryStructure) -> tuple[int, ...] | None:
    if X.n != Y.n or len(X.relation) != len(Y.relation):
        return None
    if sorted(X.signatures) != sorted(Y.signatures):
        return None
    n = X.n
    # Rarest signature first: fewer candidates near the root of the search.
    counts: dict[tuple[int, int, int], int] = {}
    for s in X.signatures:
        counts[s] = counts.get(s, 0) + 1
    order = sorted(range(n), key=lambda x: (counts[X.signatures[x]], x))
    candidates = {s: [y for y in range(n) if Y.signatures[y] == s] for s in counts}
    image = [0] * n
    used = [False] * n
    assigned: list[tuple[int, int]] = []

    def extend(k: int) -> bool:
        if k == n:
            return True
        x = order[k]
        for y in candidates[X.signatures[x]]:
            if used[y] or not _consistent(X, Y, x, y, assigned):
                continue
            used[y] = True
            image[x] = y
            assigned.append((x, y))
            if extend(k + 1):
                return True
            assigned.pop()
            used[y] = False
        return False

    return tuple(image) if extend(0) else None


def is_isomorphic(X: BinaryStructure, Y: BinaryStructure) -> bool:
    return find_isomorphism(X, Y) is not None


def is_p_monomorphic(X: BinaryStructure, p: int) -> bool:
    """True iff all substructures of X on p points are isomorphic."""
    if not 1 <= p <= X.n:
        raise DomainError(f"p={p} outside 1..{X.n}")
    subsets = combinations(range(X.n), p)
    first = induced(X, next(subsets))
    return all(is_isomorphic(first, induced(X, A)) for A in subsets)


def _is_total_irreflexive_tournament(X: BinaryStructure) -> bool:
    for i in range(X.n):
        for j in range(i + 1, X.n):
            if X.related(i, j) == X.related(j, i):
                return False
    return True


def _is_transitive(X: BinaryStructure) -> bool:
    for u, v in X.relation:
        # everything reachable from v must be reachable from u
        if X.out_masks[v] & ~X.out_masks[u]:
            return False
    return True


def shape_of(X: BinaryStructure) -> Shape:
    if not is_connected(X):
        raise DomainError("shape_of expects a connected structure")
    n = X.n
    loops = sum(1 for x in range(n) if X.related(x, x))
    if n == 1:
        return Shape.SINGLETON_LOOP if loops else Shape.SINGLETON_NO_LOOP
    if len(X.relation) == n * n:
        return Shape.FULL_RELATION
    if loops == 0 and len(X.relation) == n * (n - 1):
        return Shape.COMPLETE_GRAPH
    if loops in (0, n) and _is_total_irreflexive_tournament(X) and _is_transitive(X):
        return Shape.STRICT_LINEAR_ORDER if loops == 0 else Shape.REFLEXIVE_LINEAR_ORDER
    return Shape.OTHER


def complement(X: BinaryStructure) -> BinaryStructure:
    rel = frozenset((i, j) for i in range(X.n) for j in range(X.n)) - X.relation
    return BinaryStructure(X.n, rel)


def contains_copy(pattern: BinaryStructure, host: BinaryStructure, within: Iterable[int] | None = None) -> bool:
    """Brute force: is there ``A`` inside ``within`` with ``host[A]`` isomorphic to ``pattern``?"""
    pool = sorted(range(host.n) if within is None else set(within))
    if pool and (pool[0] < 0 or pool[-1] >= host.n):
        raise DomainError("subset is not contained in the points of the host")
    p = pattern.n
    if p > len(pool):
        return False
    want_edges = len(pattern.relation)
    want_sigs = sorted(pattern.signatures)
    out = host.out_masks
    for A in combinations(pool, p):
        mask = 0
        for a in A:
            mask |= 1 << a
        if sum((out[a] & mask).bit_count() for a in A) != want_edges:
            continue
        sub = induced(host, A)
        if sorted(sub.signatures) != want_sigs:
            continue
        if is_isomorphic(sub, pattern):
            return True
    return False


def is_indivisible_finite(
    X: BinaryStructure, cap: int = DEFAULT_CAP
) -> tuple[bool, tuple[frozenset[int], frozenset[int]] | None]:
    """Check every 2-colouring of X for a colour class holding a copy of X.

    Returns ``(True, None)`` or ``(False, (A, B))`` with a witness colouring in
    which neither class contains a copy. Colourings are tried most balanced
    first, so the witness is as balanced as possible.
    """
    if X.n > cap:
        raise ResourceError(f"{X.n} points exceeds the enumeration cap {cap}")
    n = X.n
    everything = (1 << n) - 1
    # Point 0 (when present) is fixed in the first class; the rest is symmetric.
    colourings = [m << 1 | 1 for m in range(1 << (n - 1))] if n else [0]
    colourings.sort(key=lambda a: (abs(n - 2 * a.bit_count()), a))
    for a_mask in colourings:
        b_mask = everything & ~a_mask
        A = frozenset(i for i in range(n) if a_mask >> i & 1)
        B = frozenset(i for i in range(n) if b_mask >> i & 1)
        if not contains_copy(X, X, A) and not contains_copy(X, X, B):
            return False, (A, B)
    return True, None


# -- Text format --------------------------------------------------------------

def dumps_structure(X: BinaryStructure) -> str:
    lines = [f"points {X.n}"]
    lines.extend(f"pair {u} {v}" for u, v in sorted(X.relation))
    return "\n".join(lines) + "\n"


def loads_structure(text: str, source: str | None = None) -> BinaryStructure:
    n = None
    pairs: list[Pair] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "points" and len(words) == 2:
                if n is not None:
                    raise ParseError("duplicate 'points' line", lineno, source)
                n = int(words[1])
                if n < 0:
                    raise ParseError("negative point count", lineno, source)
            elif words[0] == "pair" and len(words) == 3:
                if n is None:
                    raise ParseError("'pair' before 'points'", lineno, source)
                u, v = int(words[1]), int(words[2])
                if not (0 <= u < n and 0 <= v < n):
                    raise ParseError(f"pair ({u}, {v}) outside 0..{n - 1}", lineno, source)
                pairs.append((u, v))
            else:
                raise ParseError(f"unrecognised line {line!r}", lineno, source)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad integer in {line!r}", lineno, source) from None
    if n is None:
        raise ParseError("missing 'points' line", None, source)
    return BinaryStructure(n, frozenset(pairs))


def read_structure(path: str | Path) -> BinaryStructure:
    p = Path(path)
    return loads_structure(p.read_text(), source=str(p))


def write_structure(X: BinaryStructure, path: str | Path) -> None:
    Path(path).write_text(dumps_structure(X))
