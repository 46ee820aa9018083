"""The ideal of copy-free subsets, described through trace profiles.

A subset ``S`` of a catalogue structure is summarised by its traces
``|S & X_i|`` on the components. Whether ``S`` contains a copy of the whole
structure depends only on those traces; :func:`ideal_member` decides it in
closed form, and :func:`copy_inside_matching` / :func:`copy_inside_bruteforce`
decide the same question on finite truncations by two independent routes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterator, Union

from .catalogue import CatalogueSpec, Slot, Truncation, derive_stats
from .common import DEFAULT_CAP, OMEGA, Card, DomainError, ParseError, ResourceError, fmt_card, parse_card
from .structures import BinaryStructure, components, contains_copy, copies


# -- Trace profiles -----------------------------------------------------------

@dataclass(frozen=True)
class TailRule:
    """Traces of the family components not listed individually.

    ``bound=None`` means every such component is fully inside ``S``;
    otherwise a size-``n`` component has trace ``min(bound, n)``.
    """

    bound: int | None = None

    @classmethod
    def full(cls) -> "TailRule":
        return cls(None)

    @classmethod
    def bounded(cls, b: int) -> "TailRule":
        if b < 0:
            raise DomainError("tail bound must be non-negative")
        return cls(b)

    @property
    def is_full(self) -> bool:
        return self.bound is None

    def trace(self, n: int) -> int:
        return n if self.bound is None else min(self.bound, n)

    def describe(self) -> str:
        return "full" if self.bound is None else f"bounded {self.bound}"


@dataclass(frozen=True)
class TraceProfile:
    """Traces of a subset ``S`` on every component of a catalogue structure.

    ``traces`` lists individual components ``(class, component) -> trace``;
    ``tails`` gives the trace of every unlisted component of an
    omega-multiplicity class. Unlisted components of finite-multiplicity
    classes have trace 0. The family is described analogously with
    ``(size, component)`` keys and a :class:`TailRule`.
    """

    traces: dict[tuple[int, int], Card] = field(default_factory=dict)
    tails: dict[int, Card] = field(default_factory=dict)
    family_traces: dict[tuple[int, int], int] = field(default_factory=dict)
    family_tail: TailRule | None = None

    def __hash__(self):
        return hash((
            tuple(sorted(self.traces.items())),
            tuple(sorted(self.tails.items())),
            tuple(sorted(self.family_traces.items())),
            self.family_tail,
        ))

    def trace(self, spec: CatalogueSpec, slot: Slot) -> Card:
        if slot.cls == spec.family_index:
            value = self.family_traces.get((slot.size, slot.index))
            if value is None:
                value = self.family_tail.trace(slot.size)
            return value
        value = self.traces.get((slot.cls, slot.index))
        if value is not None:
            return value
        return self.tails.get(slot.cls, 0)


def check_profile(spec: CatalogueSpec, profile: TraceProfile) -> None:
    """Raise :class:`DomainError` unless ``profile`` describes a subset of ``spec``."""
    classes = spec.classes
    for (k, j), t in profile.traces.items():
        if not 0 <= k < len(classes):
            raise DomainError(f"trace for unknown class {k}")
        c = classes[k]
        if j < 0 or j >= c.multiplicity:
            raise DomainError(f"class {k} has no component {j}")
        _check_value(t, c.size, f"class {k} component {j}")
    for k, c in enumerate(classes):
        has_tail = k in profile.tails
        if c.multiplicity == OMEGA and not has_tail:
            raise DomainError(f"class {k} has omega multiplicity and needs a tail value")
        if c.multiplicity != OMEGA and has_tail:
            raise DomainError(f"class {k} has finite multiplicity; tail values are not allowed")
        if has_tail:
            _check_value(profile.tails[k], c.size, f"class {k} tail")
    for k in profile.tails:
        if not 0 <= k < len(classes):
            raise DomainError(f"tail for unknown class {k}")
    fam = spec.unbounded
    if fam is None:
        if profile.family_traces or profile.family_tail is not None:
            raise DomainError("profile describes a family the catalogue does not have")
        return
    if profile.family_tail is None:
        raise DomainError("the unbounded family needs a tail rule")
    for (n, j), t in profile.family_traces.items():
        if n < 1 or j < 0 or j >= fam.multiplicity(n):
            raise DomainError(f"family has no component {j} of size {n}")
        _check_value(t, n, f"family size {n} component {j}")


def _check_value(t: Card, size: Card, where: str) -> None:
    if t != OMEGA and (not isinstance(t, int) or t < 0):
        raise DomainError(f"{where}: trace must be a non-negative integer or omega")
    if t > size:
        raise DomainError(f"{where}: trace {fmt_card(t)} exceeds size {fmt_card(size)}")


def zero_profile(spec: CatalogueSpec) -> TraceProfile:
    tails = {k: 0 for k, c in enumerate(spec.classes) if c.multiplicity == OMEGA}
    fam = TailRule.bounded(0) if spec.unbounded is not None else None
    return TraceProfile({}, tails, {}, fam)


def full_profile(spec: CatalogueSpec) -> TraceProfile:
    traces = {}
    tails = {}
    for k, c in enumerate(spec.classes):
        if c.multiplicity == OMEGA:
            tails[k] = c.size
        else:
            traces.update({(k, j): c.size for j in range(c.multiplicity)})
    fam = TailRule.full() if spec.unbounded is not None else None
    return TraceProfile(traces, tails, {}, fam)


# -- Closed-form membership ---------------------------------------------------

def _count(spec: CatalogueSpec, profile: TraceProfile, k: int, pred: Callable[[Card], bool]) -> Card:
    """Number of components of class ``k`` whose trace satisfies ``pred``."""
    c = spec.classes[k]
    listed = [t for (kk, _), t in profile.traces.items() if kk == k]
    if c.multiplicity == OMEGA:
        if pred(profile.tails[k]):
            return OMEGA
        return sum(1 for t in listed if pred(t))
    unlisted = c.multiplicity - len(listed)
    return sum(1 for t in listed if pred(t)) + (unlisted if pred(0) else 0)


def _infinitely_repeated_sizes(spec: CatalogueSpec) -> list[int]:
    """Finite sizes ``n`` with infinitely many size-``n`` components."""
    return [n for n, count in derive_stats(spec).I_kappa_counts if n != OMEGA and count == OMEGA]


def _y_member(spec: CatalogueSpec, profile: TraceProfile) -> bool:
    """Whether the part of ``S`` inside the finite components contains no copy of them."""
    finite = [k for k, c in enumerate(spec.classes) if c.size != OMEGA]
    fam = spec.unbounded
    if not finite and fam is None:
        # the empty structure is a copy of itself
        return False
    if fam is not None:
        # infinitely many sizes: copy-free exactly when traces are bounded
        return not profile.family_tail.is_full
    infinite_sizes = _infinitely_repeated_sizes(spec)
    if not infinite_sizes:
        # finite part: a copy must be all of it
        return any(_count(spec, profile, k, lambda t, n=spec.classes[k].size: t < n) > 0 for k in finite)
    m0 = max(infinite_sizes)
    for k in finite:
        n = spec.classes[k].size
        if n > m0 and _count(spec, profile, k, lambda t, n=n: t < n) > 0:
            return True
    full_at_m0 = sum(
        _count(spec, profile, k, lambda t: t == m0) for k in finite if spec.classes[k].size == m0
    )
    return full_at_m0 != OMEGA


def ideal_member(spec: CatalogueSpec, profile: TraceProfile) -> bool:
    """True iff the subset described by ``profile`` contains no copy of the structure."""
    check_profile(spec, profile)
    stats = derive_stats(spec)
    omega_classes = [k for k, c in enumerate(spec.classes) if c.size == OMEGA]
    if stats.mu == OMEGA:
        infinite_traces = sum(
            (_count(spec, profile, k, lambda t: t == OMEGA) for k in omega_classes), 0
        )
        return infinite_traces != OMEGA
    if any(_count(spec, profile, k, lambda t: t != OMEGA) > 0 for k in omega_classes):
        return True
    return _y_member(spec, profile)


# -- Profile algebra ----------------------------------------------------------

def _capped(a: Card, b: Card, size: Card) -> Card:
    return min(a + b, size)


def join(spec: CatalogueSpec, a: TraceProfile, b: TraceProfile) -> TraceProfile:
    """Profile of ``S1 | S2`` for disjoint ``S1``, ``S2`` (pointwise sum capped at size)."""
    check_profile(spec, a)
    check_profile(spec, b)
    traces = {}
    for key in set(a.traces) | set(b.traces):
        slot = Slot(key[0], spec.classes[key[0]].size, key[1])
        traces[key] = _capped(a.trace(spec, slot), b.trace(spec, slot), slot.size)
    tails = {k: _capped(a.tails[k], b.tails[k], spec.classes[k].size) for k in a.tails}
    fam_traces = {}
    fam_tail = None
    if spec.unbounded is not None:
        for n, j in set(a.family_traces) | set(b.family_traces):
            slot = Slot(spec.family_index, n, j)
            fam_traces[(n, j)] = _capped(a.trace(spec, slot), b.trace(spec, slot), n)
        if a.family_tail.is_full or b.family_tail.is_full:
            fam_tail = TailRule.full()
        else:
            fam_tail = TailRule.bounded(a.family_tail.bound + b.family_tail.bound)
    return TraceProfile(traces, tails, fam_traces, fam_tail)


def is_complementary(spec: CatalogueSpec, a: TraceProfile, b: TraceProfile) -> bool:
    """Whether some partition ``X = A | B`` realises the two profiles.

    Finite components need traces summing to the size; an omega component
    needs at least one infinite side.
    """
    check_profile(spec, a)
    check_profile(spec, b)

    def fits(ta: Card, tb: Card, size: Card) -> bool:
        if size == OMEGA:
            return OMEGA in (ta, tb)
        return ta + tb == size

    for k, c in enumerate(spec.classes):
        keys = {j for (kk, j) in a.traces if kk == k} | {j for (kk, j) in b.traces if kk == k}
        if c.multiplicity == OMEGA:
            if not fits(a.tails[k], b.tails[k], c.size):
                return False
        else:
            keys |= set(range(c.multiplicity))
        for j in keys:
            slot = Slot(k, c.size, j)
            if not fits(a.trace(spec, slot), b.trace(spec, slot), c.size):
                return False
    if spec.unbounded is not None:
        ta, tb = a.family_tail, b.family_tail
        tails_ok = (ta.is_full and tb.bound == 0) or (tb.is_full and ta.bound == 0)
        if not tails_ok:
            return False
        for n, j in set(a.family_traces) | set(b.family_traces):
            slot = Slot(spec.family_index, n, j)
            if a.trace(spec, slot) + b.trace(spec, slot) != n:
                return False
    return True


# -- Text format --------------------------------------------------------------

def _fields(words: list[str], lineno: int, source: str | None) -> dict[str, str]:
    out = {}
    for w in words:
        if "=" not in w:
            raise ParseError(f"expected key=value, got {w!r}", lineno, source)
        key, value = w.split("=", 1)
        out[key] = value
    return out


def loads_profile(text: str, source: str | None = None) -> TraceProfile:
    traces: dict = {}
    tails: dict = {}
    fam_traces: dict = {}
    fam_tail = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "trace":
                f = _fields(words[1:], lineno, source)
                value = parse_card(f["value"])
                if f["class"] == "family":
                    key = (int(f["size"]), int(f["component"]))
                    if value == OMEGA:
                        raise ParseError("family traces are finite", lineno, source)
                    table = fam_traces
                else:
                    key = (int(f["class"]), int(f["component"]))
                    table = traces
                if key in table:
                    raise ParseError("duplicate trace", lineno, source)
                table[key] = value
            elif words[0] == "tail":
                f = _fields(words[1:], lineno, source)
                k = int(f["class"])
                if k in tails:
                    raise ParseError("duplicate tail", lineno, source)
                tails[k] = parse_card(f["value"])
            elif words[0] == "tailrule":
                if fam_tail is not None:
                    raise ParseError("duplicate tailrule", lineno, source)
                if words[1:] == ["full"]:
                    fam_tail = TailRule.full()
                elif len(words) == 3 and words[1] == "bounded":
                    fam_tail = TailRule.bounded(int(words[2]))
                else:
                    raise ParseError("expected 'tailrule full' or 'tailrule bounded <b>'", lineno, source)
            else:
                raise ParseError(f"unrecognised line {line!r}", lineno, source)
        except ParseError:
            raise
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]}", lineno, source) from None
        except (ValueError, IndexError, DomainError) as exc:
            raise ParseError(str(exc) or "malformed line", lineno, source) from None
    return TraceProfile(traces, tails, fam_traces, fam_tail)


def dumps_profile(profile: TraceProfile) -> str:
    lines = []
    for (k, j), t in sorted(profile.traces.items()):
        lines.append(f"trace class={k} component={j} value={fmt_card(t)}")
    for k, t in sorted(profile.tails.items()):
        lines.append(f"tail class={k} value={fmt_card(t)}")
    for (n, j), t in sorted(profile.family_traces.items()):
        lines.append(f"trace class=family size={n} component={j} value={t}")
    if profile.family_tail is not None:
        lines.append(f"tailrule {profile.family_tail.describe()}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- Copy descriptors ---------------------------------------------------------

#: A piece of a target component: explicit point indices, or one of the
#: infinite subsets ``"all"``, ``"even"``, ``"odd"`` of an omega component.
Piece = Union[frozenset, str]


def piece_size(piece: Piece) -> Card:
    return len(piece) if isinstance(piece, frozenset) else OMEGA


def piece_meet(a: Piece, b: Piece, target_size: Card) -> Card:
    """Size of the intersection of two pieces of the same component."""
    if isinstance(a, frozenset) and isinstance(b, frozenset):
        return len(a & b)
    if isinstance(a, frozenset) or isinstance(b, frozenset):
        small, other = (a, b) if isinstance(a, frozenset) else (b, a)
        if other == "all":
            return len(small)
        parity = 0 if other == "even" else 1
        return sum(1 for x in small if x % 2 == parity)
    if "all" in (a, b) or a == b:
        return OMEGA
    return 0


@dataclass(frozen=True)
class CopyDescriptor:
    """A copy given as an injection on component slots plus a piece per target."""

    rule: str
    target: Callable[[Slot], Slot]
    piece: Callable[[Slot], Piece]

    def image(self, slot: Slot) -> tuple[Slot, Piece]:
        return self.target(slot), self.piece(slot)


def iter_slots(spec: CatalogueSpec, depth: int) -> Iterator[Slot]:
    """Components of ``spec``: at most ``depth`` per class, family sizes up to ``depth``."""
    for k, c in enumerate(spec.classes):
        for j in range(int(min(c.multiplicity, depth))):
            yield Slot(k, c.size, j)
    fam = spec.unbounded
    if fam is not None:
        for n in range(1, depth + 1):
            for j in range(int(min(fam.multiplicity(n), depth))):
                yield Slot(spec.family_index, n, j)


def _slot_exists(spec: CatalogueSpec, slot: Slot) -> bool:
    if slot.cls == spec.family_index and spec.unbounded is not None:
        return isinstance(slot.size, int) and slot.size >= 1 and 0 <= slot.index < spec.unbounded.multiplicity(slot.size)
    if not 0 <= slot.cls < len(spec.classes):
        return False
    c = spec.classes[slot.cls]
    return slot.size == c.size and 0 <= slot.index < c.multiplicity


def check_descriptor(spec: CatalogueSpec, d: CopyDescriptor, depth: int = 8) -> list[str]:
    """Problems found on the slots enumerated to ``depth`` (empty list when none)."""
    problems = []
    seen: dict[Slot, Slot] = {}
    for s in iter_slots(spec, depth):
        t, piece = d.image(s)
        if not _slot_exists(spec, t):
            problems.append(f"{s} maps to a missing component {t}")
            continue
        if t in seen:
            problems.append(f"{s} and {seen[t]} share the target {t}")
        seen[t] = s
        if piece_size(piece) != s.size:
            problems.append(f"{s} gets a piece of size {fmt_card(piece_size(piece))}")
        if isinstance(piece, frozenset) and t.size != OMEGA and not piece <= frozenset(range(t.size)):
            problems.append(f"{s} gets points outside {t}")
        if isinstance(piece, str) and t.size != OMEGA:
            problems.append(f"{s} gets an infinite piece of a finite component")
    return problems


def check_intersection(
    spec: CatalogueSpec, a: CopyDescriptor, b: CopyDescriptor, profile: TraceProfile, depth: int = 8
) -> list[str]:
    """Compare ``profile`` with the traces of ``a & b`` on targets hit by both."""
    hits_a = {}
    hits_b = {}
    for s in iter_slots(spec, depth):
        t, p = a.image(s)
        hits_a[t] = p
        t, p = b.image(s)
        hits_b[t] = p
    problems = []
    for t in set(hits_a) & set(hits_b):
        meet = piece_meet(hits_a[t], hits_b[t], t.size)
        if meet != profile.trace(spec, t):
            problems.append(f"{t}: pieces meet in {fmt_card(meet)}, profile says {fmt_card(profile.trace(spec, t))}")
    return problems


def _pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def incompatible_copies_witness(
    spec: CatalogueSpec,
) -> tuple[CopyDescriptor, CopyDescriptor, TraceProfile] | None:
    """Two copies whose intersection contains no copy, with that intersection's profile.

    Returns ``None`` only for finite catalogues.
    """
    if not spec.is_infinite:
        return None
    stats = derive_stats(spec)
    classes = spec.classes
    full = full_profile(spec)

    def whole(slot: Slot) -> Piece:
        return frozenset(range(slot.size))

    if stats.mu != 0:
        # halve every omega component, keep everything else
        def halves(parity: str):
            return lambda s: parity if s.size == OMEGA else whole(s)

        a = CopyDescriptor("identity; omega components -> even points", lambda s: s, halves("even"))
        b = CopyDescriptor("identity; omega components -> odd points", lambda s: s, halves("odd"))
        traces = {key: t for key, t in full.traces.items() if classes[key[0]].size != OMEGA}
        tails = {k: (0 if classes[k].size == OMEGA else t) for k, t in full.tails.items()}
        return a, b, TraceProfile(traces, tails, {}, full.family_tail)

    if spec.unbounded is None:
        m0 = max(_infinitely_repeated_sizes(spec))
        split = {k for k, c in enumerate(classes) if c.size == m0 and c.multiplicity == OMEGA}

        def spread(offset: int):
            return lambda s: Slot(s.cls, s.size, 2 * s.index + offset) if s.cls in split else s

        a = CopyDescriptor(f"size-{m0} components j -> 2j", spread(0), whole)
        b = CopyDescriptor(f"size-{m0} components j -> 2j+1", spread(1), whole)
        tails = {k: (0 if k in split else t) for k, t in full.tails.items()}
        return a, b, TraceProfile(dict(full.traces), tails, {}, None)

    fam_idx = spec.family_index

    def code(s: Slot) -> int:
        c = 2 * s.size + 1 if s.cls == fam_idx else 2 * s.cls
        return _pair(c, s.index)

    def into_family(offset: int):
        return lambda s: Slot(fam_idx, 2 * _pair(code(s), s.size) + offset, 0)

    a = CopyDescriptor("component -> first points of an even-size family member", into_family(2), whole)
    b = CopyDescriptor("component -> first points of an odd-size family member", into_family(3), whole)
    return a, b, zero_profile(spec)


# -- Finite copy descriptors --------------------------------------------------

@dataclass(frozen=True)
class FiniteCopyDescriptor:
    assignment: tuple[int, ...]
    """Target block for each source block."""
    pieces: tuple[frozenset[int], ...]

    def points(self) -> frozenset[int]:
        return frozenset().union(*self.pieces)


def iter_finite_descriptors(
    source_sizes: list[int], target_blocks: list[frozenset[int]]
) -> Iterator[FiniteCopyDescriptor]:
    """All injections of source blocks into larger-or-equal target blocks, with every choice of piece."""
    k = len(source_sizes)
    used = [False] * len(target_blocks)
    assignment = [0] * k
    order = sorted(range(k), key=lambda i: -source_sizes[i])

    def pieces_for(pos: int, chosen: list):
        if pos == k:
            yield tuple(chosen)
            return
        i = order[pos]
        block = sorted(target_blocks[assignment[i]])
        for subset in combinations(block, source_sizes[i]):
            chosen[i] = frozenset(subset)
            yield from pieces_for(pos + 1, chosen)

    def place(pos: int):
        if pos == k:
            for pieces in pieces_for(0, [frozenset()] * k):
                yield FiniteCopyDescriptor(tuple(assignment), pieces)
            return
        i = order[pos]
        for t, block in enumerate(target_blocks):
            if not used[t] and len(block) >= source_sizes[i]:
                used[t] = True
                assignment[i] = t
                yield from place(pos + 1)
                used[t] = False

    yield from place(0)


def descriptor_copies(pattern: BinaryStructure, host: BinaryStructure) -> frozenset[frozenset[int]]:
    """Point sets of all copies generated by finite descriptors from pattern into host."""
    src = [len(b) for b in components(pattern).blocks]
    tgt = list(components(host).blocks)
    return frozenset(d.points() for d in iter_finite_descriptors(src, tgt))


# -- Matching and brute-force oracles -----------------------------------------

def max_bipartite_matching(adjacency: list[list[int]], right_size: int) -> int:
    """Size of a maximum matching by augmenting paths (Kuhn's algorithm)."""
    match_right = [-1] * right_size

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adjacency[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] == -1 or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    return sum(1 for u in range(len(adjacency)) if augment(u, [False] * right_size))


_compat_cache: dict[tuple[BinaryStructure, BinaryStructure], bool] = {}


def _all_subsets_are_copies(piece: BinaryStructure, block: BinaryStructure) -> bool:
    key = (piece, block)
    hit = _compat_cache.get(key)
    if hit is None:
        found = copies(piece, block)
        hit = all(frozenset(A) in found for A in combinations(range(block.n), piece.n))
        _compat_cache[key] = hit
    return hit


def copy_inside_matching(
    host: Truncation, S: frozenset[int] | set[int], pattern: Truncation | None = None
) -> bool:
    """Whether ``S`` contains a copy of ``pattern`` (default: of ``host`` itself).

    Component-wise: a matching sends each pattern component to a distinct host
    component whose trace on ``S`` is large enough and all of whose subsets of
    the right size are copies of it.
    """
    S = frozenset(S)
    if not S <= frozenset(range(host.structure.n)):
        raise DomainError("S contains points outside the host")
    pattern = host if pattern is None else pattern
    host_parts = [host.block_structure(h) for h in range(len(host.blocks))]
    traces = [len(S & b) for b in host.blocks]
    adjacency = []
    for i in range(len(pattern.blocks)):
        P = pattern.block_structure(i)
        adjacency.append([
            h for h, H in enumerate(host_parts)
            if traces[h] >= P.n and H.n >= P.n and _all_subsets_are_copies(P, H)
        ])
    return max_bipartite_matching(adjacency, len(host.blocks)) == len(pattern.blocks)


def copy_inside_bruteforce(
    host: BinaryStructure,
    S: frozenset[int] | set[int],
    pattern: BinaryStructure | None = None,
    cap: int = DEFAULT_CAP,
) -> bool:
    """Whether some ``A`` inside ``S`` induces a structure isomorphic to ``pattern``."""
    if host.n > cap:
        raise ResourceError(f"host has {host.n} points, above the cap {cap}")
    S = frozenset(S)
    if not S <= frozenset(range(host.n)):
        raise DomainError("S contains points outside the host")
    return contains_copy(host if pattern is None else pattern, host, within=S)
