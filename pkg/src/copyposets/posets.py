"""Finite pre-orders: atoms, separativity, separative modification and quotient.

Orders are boolean matrices with ``le[p, q]`` meaning ``p <= q``. Two
elements are compatible when they have a common lower bound in the order.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .common import DomainError, ParseError


def _closure(le: np.ndarray) -> np.ndarray:
    le = le.copy()
    np.fill_diagonal(le, True)
    for k in range(le.shape[0]):
        le |= np.outer(le[:, k], le[k, :])
    return le


@dataclass(frozen=True, eq=False)
class FinitePreOrder:
    le: np.ndarray

    def __post_init__(self):
        le = np.asarray(self.le, dtype=bool)
        if le.ndim != 2 or le.shape[0] != le.shape[1]:
            raise DomainError("order matrix must be square")
        if not le.diagonal().all():
            raise DomainError("order is not reflexive")
        if le.size and not np.array_equal(_closure(le), le):
            raise DomainError("order is not transitive")
        le.setflags(write=False)
        object.__setattr__(self, "le", le)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "FinitePreOrder":
        """Reflexive-transitive closure of the given ``p <= q`` pairs."""
        le = np.zeros((n, n), dtype=bool)
        for p, q in pairs:
            if not (0 <= p < n and 0 <= q < n):
                raise DomainError(f"pair ({p}, {q}) outside 0..{n - 1}")
            le[p, q] = True
        return cls(_closure(le))

    @classmethod
    def antichain(cls, n: int) -> "FinitePreOrder":
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def chain(cls, n: int) -> "FinitePreOrder":
        return cls(np.triu(np.ones((n, n), dtype=bool)))

    @property
    def n(self) -> int:
        return self.le.shape[0]

    def __eq__(self, other):
        return isinstance(other, FinitePreOrder) and np.array_equal(self.le, other.le)

    def __hash__(self):
        return hash((self.n, self.le.tobytes()))

    def __repr__(self):
        pairs = [(int(p), int(q)) for p, q in zip(*np.nonzero(self.le)) if p != q]
        return f"FinitePreOrder(n={self.n}, strict_pairs={pairs})"

    def is_antisymmetric(self) -> bool:
        both = self.le & self.le.T
        return np.array_equal(both, np.eye(self.n, dtype=bool))

    @property
    def compat(self) -> np.ndarray:
        """``compat[q, r]``: some ``s`` lies below both ``q`` and ``r``."""
        m = self.le.astype(np.int64)
        return (m.T @ m) > 0

    def below(self, p: int) -> np.ndarray:
        return np.flatnonzero(self.le[:, p])


def atoms(P: FinitePreOrder) -> frozenset[int]:
    """Elements below which every two elements are compatible."""
    C = P.compat
    out = []
    for p in range(P.n):
        down = P.le[:, p]
        if C[np.ix_(down, down)].all():
            out.append(p)
    return frozenset(out)


def is_atomless(P: FinitePreOrder) -> bool:
    return not atoms(P)


def is_atomic(P: FinitePreOrder) -> bool:
    """Every element has an atom below it."""
    A = np.zeros(P.n, dtype=bool)
    A[list(atoms(P))] = True
    return bool(all(A[P.le[:, p]].any() for p in range(P.n)))


def is_separative(P: FinitePreOrder) -> bool:
    """For a partial order: ``p </= q`` always has some ``r <= p`` incompatible with ``q``."""
    if not P.is_antisymmetric():
        raise DomainError("separativity is defined here for partial orders only")
    return np.array_equal(sm(P).le, P.le)


def sm(P: FinitePreOrder) -> FinitePreOrder:
    """Separative modification: ``p <=* q`` iff every ``r <= p`` is compatible with ``q``."""
    incompat = (~P.compat).astype(np.int64)
    spoiled = (P.le.T.astype(np.int64) @ incompat) > 0
    return FinitePreOrder(~spoiled)


@dataclass(frozen=True, eq=False)
class QuotientPoset:
    """Classes of mutual ``<=*`` with the induced partial order on classes."""

    classes: tuple[tuple[int, ...], ...]
    order: FinitePreOrder
    class_of: tuple[int, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.classes)

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.classes)


def quotient(P: FinitePreOrder) -> QuotientPoset:
    """Antisymmetric quotient; classes are ordered by their least element."""
    eq = P.le & P.le.T
    class_of = [-1] * P.n
    classes = []
    for p in range(P.n):
        if class_of[p] == -1:
            members = tuple(int(q) for q in np.flatnonzero(eq[p]))
            for q in members:
                class_of[q] = len(classes)
            classes.append(members)
    reps = [c[0] for c in classes]
    order = FinitePreOrder(P.le[np.ix_(reps, reps)])
    return QuotientPoset(tuple(classes), order, tuple(class_of))


def sq(P: FinitePreOrder) -> QuotientPoset:
    """Separative quotient."""
    return quotient(sm(P))


def product(P: FinitePreOrder, Q: FinitePreOrder) -> FinitePreOrder:
    """Coordinatewise order; the pair ``(i, j)`` is element ``i * Q.n + j``."""
    le = np.kron(P.le.astype(np.uint8), Q.le.astype(np.uint8)).astype(bool)
    return FinitePreOrder(le)


def find_order_isomorphism(P: FinitePreOrder, Q: FinitePreOrder) -> tuple[int, ...] | None:
    """A bijection ``f`` with ``p <= q`` iff ``f(p) <= f(q)``, or ``None``."""
    if P.n != Q.n or P.le.sum() != Q.le.sum():
        return None
    n = P.n

    def invariants(R: FinitePreOrder):
        down = R.le.sum(axis=0)
        up = R.le.sum(axis=1)
        return [(int(down[p]), int(up[p])) for p in range(n)]

    inv_p, inv_q = invariants(P), invariants(Q)
    if sorted(inv_p) != sorted(inv_q):
        return None
    order = sorted(range(n), key=lambda p: (sum(1 for x in inv_p if x == inv_p[p]), p))
    image = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        p = order[k]
        for q in range(n):
            if used[q] or inv_q[q] != inv_p[p]:
                continue
            ok = all(
                P.le[p, order[i]] == Q.le[q, image[order[i]]]
                and P.le[order[i], p] == Q.le[image[order[i]], q]
                for i in range(k)
            )
            if ok:
                image[p] = q
                used[q] = True
                if extend(k + 1):
                    return True
                used[q] = False
        image[p] = -1
        return False

    return tuple(image) if extend(0) else None


def iso(P: FinitePreOrder, Q: FinitePreOrder) -> bool:
    return find_order_isomorphism(P, Q) is not None


@dataclass(frozen=True)
class TransferVerdict:
    monotone: bool
    keeps_incompatibility: bool
    surjective: bool
    failures: tuple[str, ...]
    class_map: tuple[int, ...] | None = None
    """``class_map[i]`` is the class of ``sq Q`` receiving class ``i`` of ``sq P``."""
    quotient_iso: bool | None = None

    @property
    def conditions_hold(self) -> bool:
        return self.monotone and self.keeps_incompatibility and self.surjective


def check_transfer(f: Sequence[int], P: FinitePreOrder, Q: FinitePreOrder) -> TransferVerdict:
    """Check the three transfer conditions and, when they hold, the induced quotient map.

    Conditions: ``f`` is monotone, sends incompatible pairs to incompatible
    pairs, and is onto. The induced map sends the class of ``p`` in ``sq P``
    to the class of ``f(p)`` in ``sq Q``.
    """
    f = list(f)
    if len(f) != P.n or any(not 0 <= x < Q.n for x in f):
        raise DomainError("f must map every element of P into Q")
    failures = []
    monotone = True
    keeps = True
    CP, CQ = P.compat, Q.compat
    for p in range(P.n):
        for q in range(P.n):
            if P.le[p, q] and not Q.le[f[p], f[q]] and monotone:
                monotone = False
                failures.append(f"not monotone: {p} <= {q} but f({p}) </= f({q})")
            if not CP[p, q] and CQ[f[p], f[q]] and keeps:
                keeps = False
                failures.append(f"incompatible {p}, {q} map to compatible {f[p]}, {f[q]}")
    missing = sorted(set(range(Q.n)) - set(f))
    if missing:
        failures.append(f"not onto: misses {missing}")
    if failures:
        return TransferVerdict(monotone, keeps, not missing, tuple(failures))

    sqP, sqQ = sq(P), sq(Q)
    class_map = [-1] * sqP.size
    ok = True
    for p in range(P.n):
        i, j = sqP.class_of[p], sqQ.class_of[f[p]]
        if class_map[i] not in (-1, j):
            ok = False
            failures.append(f"class of {p} has images in two classes")
        class_map[i] = j
    if ok and sorted(class_map) != list(range(sqQ.size)):
        ok = False
        failures.append("induced class map is not a bijection")
    if ok:
        for a in range(sqP.size):
            for b in range(sqP.size):
                if sqP.order.le[a, b] != sqQ.order.le[class_map[a], class_map[b]]:
                    ok = False
                    failures.append(f"classes {a}, {b}: order not preserved both ways")
                    break
            if not ok:
                break
    return TransferVerdict(True, True, True, tuple(failures), tuple(class_map), ok)


def random_preorder(rng: random.Random, n: int, edge_prob: float = 0.3, merge_prob: float = 0.15) -> FinitePreOrder:
    """Closure of a random DAG on a shuffled ground set, then random merges of pairs."""
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    for p in range(n):
        for q in range(p + 1, n):
            if rng.random() < merge_prob / n:
                pairs += [(p, q), (q, p)]
    return FinitePreOrder.from_pairs(n, pairs)


def random_partial_order(rng: random.Random, n: int, edge_prob: float = 0.3) -> FinitePreOrder:
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    return FinitePreOrder.from_pairs(n, pairs)


# -- Text format --------------------------------------------------------------

def dumps_preorder(P: FinitePreOrder) -> str:
    lines = [f"elements {P.n}"]
    lines += [f"le {p} {q}" for p in range(P.n) for q in range(P.n) if p != q and P.le[p, q]]
    return "\n".join(lines) + "\n"


def loads_preorder(text: str, source: str | None = None, strict: bool = False) -> FinitePreOrder:
    """Parse ``elements N`` and ``le i j`` lines.

    The reflexive-transitive closure is taken unless ``strict`` is set, in
    which case input that is not already closed is rejected.
    """
    n = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "elements" and len(words) == 2:
                if n is not None:
                    raise ParseError("duplicate 'elements' line", lineno, source)
                n = int(words[1])
                if n < 0:
                    raise ParseError("negative element count", lineno, source)
            elif words[0] == "le" and len(words) == 3:
                if n is None:
                    raise ParseError("'le' before 'elements'", lineno, source)
                p, q = int(words[1]), int(words[2])
                if not (0 <= p < n and 0 <= q < n):
                    raise ParseError(f"element out of range 0..{n - 1}", lineno, source)
                pairs.append((p, q))
            else:
                raise ParseError(f"unrecognised line {line!r}", lineno, source)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad integer in {line!r}", lineno, source) from None
    if n is None:
        raise ParseError("missing 'elements' line", None, source)
    closed = FinitePreOrder.from_pairs(n, pairs)
    if strict:
        given = np.eye(n, dtype=bool)
        for p, q in pairs:
            given[p, q] = True
        if not np.array_equal(given, closed.le):
            raise ParseError("relation is not reflexive-transitively closed", None, source)
    return closed


def read_preorder(path: str | Path, strict: bool = False) -> FinitePreOrder:
    p = Path(path)
    return loads_preorder(p.read_text(), source=str(p), strict=strict)
