"""Finite presentations of countable structures as unions of component classes.

A :class:`CatalogueSpec` lists component classes ``(kind, size, multiplicity)``
where the kind is a :class:`~copyposets.structures.Shape` or an explicit finite
connected structure, and sizes / multiplicities may be ``OMEGA``. At most one
:class:`UnboundedFamily` adds components of one shape at every finite size,
which is the only way to get infinitely many component sizes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import NamedTuple

from .common import (
    DEFAULT_CAP,
    OMEGA,
    Card,
    DomainError,
    ParseError,
    ResourceError,
    card_sum,
    fmt_card,
    parse_card,
)
from .structures import (
    BinaryStructure,
    Shape,
    copies,
    disjoint_union,
    is_connected,
    is_isomorphic,
    read_structure,
    shape_structure,
)

#: Largest component size for which finite pairs involving an explicit
#: structure are checked by exhaustive copy enumeration.
EXHAUSTIVE_PAIR_CAP = 7

DEFAULT_POINT_CAP = 256

OMEGA_SHAPES = frozenset({
    Shape.FULL_RELATION,
    Shape.COMPLETE_GRAPH,
    Shape.STRICT_LINEAR_ORDER,
    Shape.REFLEXIVE_LINEAR_ORDER,
    Shape.INVERSE_STRICT_LINEAR_ORDER,
    Shape.INVERSE_REFLEXIVE_LINEAR_ORDER,
})

_LOOPED = frozenset({
    Shape.FULL_RELATION,
    Shape.REFLEXIVE_LINEAR_ORDER,
    Shape.INVERSE_REFLEXIVE_LINEAR_ORDER,
    Shape.SINGLETON_LOOP,
})

_FINITE_BASE = {
    Shape.INVERSE_STRICT_LINEAR_ORDER: Shape.STRICT_LINEAR_ORDER,
    Shape.INVERSE_REFLEXIVE_LINEAR_ORDER: Shape.REFLEXIVE_LINEAR_ORDER,
}


def normal_shape(shape: Shape, size: Card) -> Shape:
    """The isomorphism type of a ``size``-point piece of a ``shape`` component.

    Every catalogue shape is hereditary: any ``n``-subset of it induces the
    same shape at size ``n``. Distinct results mean non-isomorphic pieces.
    """
    if size == 1:
        return Shape.SINGLETON_LOOP if shape in _LOOPED else Shape.SINGLETON_NO_LOOP
    if size == OMEGA:
        return shape
    return _FINITE_BASE.get(shape, shape)


@dataclass(frozen=True)
class ComponentClass:
    """``multiplicity`` disjoint components, each of the given kind and size."""

    kind: Shape | BinaryStructure
    size: Card
    multiplicity: Card = 1
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        mult = self.multiplicity
        if not (mult == OMEGA or (isinstance(mult, int) and mult >= 1)):
            raise DomainError(f"multiplicity must be a positive integer or omega, got {mult!r}")
        if isinstance(self.kind, BinaryStructure):
            X = self.kind
            if self.size != X.n:
                raise DomainError(f"explicit class has {X.n} points but size {fmt_card(self.size)}")
            if not is_connected(X):
                raise DomainError("explicit component structure must be connected")
            if X.n > DEFAULT_CAP:
                raise DomainError(f"explicit component exceeds {DEFAULT_CAP} points")
            return
        if not isinstance(self.kind, Shape):
            raise DomainError(f"kind must be a Shape or BinaryStructure, got {self.kind!r}")
        if self.kind is Shape.OTHER:
            raise DomainError("Shape.OTHER is not a catalogue kind; give the structure explicitly")
        if self.size == OMEGA:
            if self.kind not in OMEGA_SHAPES:
                raise DomainError(f"{self.kind.name} cannot have size omega")
        elif not (isinstance(self.size, int) and self.size >= 1):
            raise DomainError(f"size must be a positive integer or omega, got {self.size!r}")
        if self.kind in (Shape.SINGLETON_LOOP, Shape.SINGLETON_NO_LOOP) and self.size != 1:
            raise DomainError(f"{self.kind.name} requires size 1")

    @property
    def is_explicit(self) -> bool:
        return isinstance(self.kind, BinaryStructure)

    def structure(self, size: int | None = None) -> BinaryStructure:
        """A finite instance; shapes are instantiated at ``size`` (default: own size)."""
        if self.is_explicit:
            return self.kind
        n = self.size if size is None else size
        if n == OMEGA:
            raise DomainError("cannot instantiate an omega-size component")
        return shape_structure(normal_shape(self.kind, n), n)

    def label(self) -> str:
        if self.is_explicit:
            return f"explicit:{self.source}" if self.source else f"explicit[{self.size}]"
        return self.kind.value


@dataclass(frozen=True)
class UnboundedFamily:
    """One component class per finite size ``n >= 1``, all of a single shape."""

    shape: Shape
    default_mult: Card = 1
    exceptions: tuple[tuple[int, Card], ...] = ()

    def __post_init__(self):
        if self.shape not in OMEGA_SHAPES:
            raise DomainError(f"unbounded family needs a full/complete/order shape, got {self.shape.name}")
        items = dict(self.exceptions)
        for m in [self.default_mult, *items.values()]:
            if not (m == OMEGA or (isinstance(m, int) and m >= 1)):
                raise DomainError(f"family multiplicity must be >= 1 or omega, got {m!r}")
        if any(not isinstance(n, int) or n < 1 for n in items):
            raise DomainError("family exception sizes must be positive integers")
        object.__setattr__(self, "exceptions", tuple(sorted(items.items())))

    def multiplicity(self, n: int) -> Card:
        return dict(self.exceptions).get(n, self.default_mult)

    def as_class(self, n: int) -> ComponentClass:
        return ComponentClass(normal_shape(self.shape, n), n, self.multiplicity(n))


@dataclass(frozen=True)
class CatalogueSpec:
    classes: tuple[ComponentClass, ...] = ()
    unbounded: UnboundedFamily | None = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.classes and self.unbounded is None:
            raise DomainError("a catalogue needs at least one component class")

    @property
    def family_index(self) -> int:
        """Class index used for the unbounded family in slots and profiles."""
        return len(self.classes)

    @property
    def is_infinite(self) -> bool:
        return self.unbounded is not None or any(
            c.size == OMEGA or c.multiplicity == OMEGA for c in self.classes
        )


# -- Derived parameters -------------------------------------------------------

@dataclass(frozen=True)
class DerivedStats:
    N: frozenset[Card]
    """Sizes of the listed classes (the family's sizes are flagged separately)."""
    N_unbounded: bool
    N_fin: frozenset[int]
    mu: Card
    I_kappa_counts: tuple[tuple[Card, Card], ...]
    Y_finite: bool
    component_count: Card

    @property
    def N_fin_infinite(self) -> bool:
        return self.N_unbounded

    @property
    def N_is_finite_subset_of_naturals(self) -> bool:
        return not self.N_unbounded and OMEGA not in self.N

    @property
    def N_is_infinite_subset_of_naturals(self) -> bool:
        return self.N_unbounded and OMEGA not in self.N

    def describe_N(self) -> str:
        parts = [fmt_card(n) for n in sorted(self.N)]
        if self.N_unbounded:
            parts = [p for p in parts if p != "omega"] + ["1,2,3,..."]
            if OMEGA in self.N:
                parts.append("omega")
        return "{" + ",".join(parts) + "}"

    def describe_N_fin(self) -> str:
        if self.N_unbounded:
            return "{1,2,3,...}"
        return "{" + ",".join(str(n) for n in sorted(self.N_fin)) + "}"


def derive_stats(spec: CatalogueSpec) -> DerivedStats:
    sizes = frozenset(c.size for c in spec.classes)
    counts: dict[Card, list[Card]] = {}
    for c in spec.classes:
        counts.setdefault(c.size, []).append(c.multiplicity)
    mu = card_sum(c.multiplicity for c in spec.classes if c.size == OMEGA)
    y_finite = spec.unbounded is None and all(
        c.multiplicity != OMEGA for c in spec.classes if c.size != OMEGA
    )
    total = card_sum(c.multiplicity for c in spec.classes)
    if spec.unbounded is not None:
        total = OMEGA
    return DerivedStats(
        N=sizes,
        N_unbounded=spec.unbounded is not None,
        N_fin=frozenset(s for s in sizes if s != OMEGA),
        mu=mu,
        I_kappa_counts=tuple(sorted((k, card_sum(v)) for k, v in counts.items())),
        Y_finite=y_finite,
        component_count=total,
    )


# -- Validation ---------------------------------------------------------------

@dataclass(frozen=True)
class ValidationIssue:
    condition: str
    """``"i"``, ``"ii"`` or ``"finite"``."""
    pair: tuple[int, int] | None
    sizes: tuple[Card, Card] | None
    rule: str
    counterexample: tuple[frozenset[int], ...] | None = None

    def describe(self) -> str:
        text = f"({self.condition})"
        if self.pair is not None:
            text += f" classes {self.pair[0]}->{self.pair[1]}"
        if self.sizes is not None:
            text += f" sizes {fmt_card(self.sizes[0])}->{fmt_card(self.sizes[1])}"
        text += f": {self.rule}"
        if self.counterexample is not None:
            text += "; counterexample " + " / ".join(
                "{" + ",".join(map(str, sorted(s))) + "}" for s in self.counterexample
            )
        return text


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[ValidationIssue, ...]
    unverified: tuple[ValidationIssue, ...]
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return not self.failures and not self.unverified

    @property
    def condition_i_ok(self) -> bool:
        return not any(f.condition == "i" for f in self.failures)

    @property
    def condition_ii_ok(self) -> bool:
        return not any(f.condition == "ii" for f in self.failures)


class _Member(NamedTuple):
    index: int
    kind: Shape | BinaryStructure
    size: Card


def _shape_pair_issue(src: _Member, dst: _Member) -> ValidationIssue | None:
    """Both members are shapes; decided by comparing normal shapes."""
    s = src.size
    if normal_shape(src.kind, s) == normal_shape(dst.kind, s):
        return None
    if s == OMEGA:
        # smallest finite size where the pieces already differ
        n = next((k for k in (1, 2, 3) if normal_shape(src.kind, k) != normal_shape(dst.kind, k)), None)
        if n is None:
            rule = (f"omega components need identical shapes: {src.kind.value} vs {dst.kind.value}")
            return ValidationIssue("i", (src.index, dst.index), (s, dst.size), rule)
        rule = (f"every {n}-subset of a {dst.kind.value} component induces "
                f"{normal_shape(dst.kind, n).value}, but {src.kind.value} pieces of size {n} are "
                f"{normal_shape(src.kind, n).value}")
        return ValidationIssue("i", (src.index, dst.index), (s, dst.size), rule, (frozenset(range(n)),))
    rule = (f"{s}-subsets of a {dst.kind.value} component induce {normal_shape(dst.kind, s).value}, "
            f"not {normal_shape(src.kind, s).value}")
    return ValidationIssue("i", (src.index, dst.index), (s, dst.size), rule, (frozenset(range(s)),))


def _pair_issue(src: _Member, dst: _Member) -> tuple[ValidationIssue | None, bool]:
    """Check ``P(src, dst) = [dst]^|src|``. Returns ``(failure, verified)``."""
    s, t = src.size, dst.size
    src_shape = isinstance(src.kind, Shape)
    dst_shape = isinstance(dst.kind, Shape)
    if src_shape and dst_shape:
        return _shape_pair_issue(src, dst), True
    if dst_shape:
        # explicit source into a shape: all pieces of the shape look alike
        want = shape_structure(normal_shape(dst.kind, s), s)
        if is_isomorphic(src.kind, want):
            return None, True
        rule = f"explicit component is not isomorphic to {normal_shape(dst.kind, s).value}_{s}"
        return ValidationIssue("i", (src.index, dst.index), (s, t), rule, (frozenset(range(s)),)), True
    if t > EXHAUSTIVE_PAIR_CAP:
        rule = f"unverified-at-scale: exhaustive pair check capped at size {EXHAUSTIVE_PAIR_CAP}"
        return ValidationIssue("i", (src.index, dst.index), (s, t), rule), False
    X = src.kind if not src_shape else shape_structure(normal_shape(src.kind, s), s)
    Y = dst.kind
    found = copies(X, Y)
    for A in combinations(range(t), s):
        piece = frozenset(A)
        if piece not in found:
            rule = "subset of the target component is not a copy of the source component"
            return ValidationIssue("i", (src.index, dst.index), (s, t), rule, (piece,)), True
    return None, True


def _separation_issue(member: _Member, k: int) -> ValidationIssue | None:
    """Condition (ii) for k-subsets of an explicit component (loops of rho_rs included)."""
    X = member.kind
    n = X.n
    closed = [X.out_masks[x] | X.in_masks[x] | (1 << x) for x in range(n)]
    everything = (1 << n) - 1
    for A in combinations(range(n), k):
        reach = 0
        for a in A:
            reach |= closed[a]
        rest = everything & ~reach
        if rest.bit_count() >= k:
            B = [i for i in range(n) if rest >> i & 1][:k]
            rule = f"two {k}-subsets with no related pair of points"
            return ValidationIssue("ii", (member.index, member.index), (k, n), rule,
                                   (frozenset(A), frozenset(B)))
    return None


def validate(spec: CatalogueSpec) -> ValidationReport:
    """Check the maximal-embeddability hypotheses (i) and (ii) on a catalogue."""
    failures: list[ValidationIssue] = []
    unverified: list[ValidationIssue] = []
    checked = 0
    if not spec.is_infinite:
        failures.append(ValidationIssue("finite", None, None, "the catalogue describes a finite structure"))

    members = [_Member(i, c.kind, c.size) for i, c in enumerate(spec.classes)]
    fam = spec.unbounded
    fam_idx = spec.family_index

    def record(result):
        nonlocal checked
        checked += 1
        issue, verified = result
        if issue is not None:
            (failures if verified else unverified).append(issue)

    for a in members:
        for b in members:
            if a.index == b.index or a.size > b.size:
                continue
            record(_pair_issue(a, b))

    if fam is not None:
        for c in members:
            if c.size != OMEGA:
                # c into family members of size >= |c|: one check covers all of them
                record(_pair_issue(c, _Member(fam_idx, fam.shape, c.size)))
                for n in range(1, c.size + 1):
                    record(_pair_issue(_Member(fam_idx, fam.shape, n), c))
            else:
                for n in (1, 2, 3):
                    record(_pair_issue(_Member(fam_idx, fam.shape, n), c))

    fam_sizes_needed = fam is not None
    for c in members:
        if not isinstance(c.kind, BinaryStructure):
            continue
        ks = {m.size for m in members if m.size != OMEGA and m.size < c.size}
        if fam_sizes_needed:
            ks |= set(range(1, c.size))
        for k in sorted(ks):
            checked += 1
            issue = _separation_issue(c, k)
            if issue is not None:
                failures.append(issue)

    return ValidationReport(tuple(failures), tuple(unverified), checked)


# -- Truncation ---------------------------------------------------------------

class Slot(NamedTuple):
    """A component of the presented structure: class, original size, index."""

    cls: int
    size: Card
    index: int


@dataclass(frozen=True)
class Truncation:
    structure: BinaryStructure
    slots: tuple[Slot, ...]
    blocks: tuple[frozenset[int], ...]

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def block_structure(self, b: int) -> BinaryStructure:
        from .structures import induced

        return induced(self.structure, self.blocks[b])


def truncate(
    spec: CatalogueSpec,
    class_count_cap: int,
    size_cap: int,
    point_cap: int = DEFAULT_POINT_CAP,
) -> Truncation:
    """Finite piece of the presented structure.

    Each class contributes ``min(multiplicity, class_count_cap)`` components of
    size ``min(size, size_cap)``; explicit components keep their own size. The
    unbounded family contributes sizes ``1..size_cap``.
    """
    if class_count_cap < 1 or size_cap < 1:
        raise DomainError("truncation caps must be >= 1")
    parts: list[BinaryStructure] = []
    slots: list[Slot] = []
    for k, c in enumerate(spec.classes):
        count = int(min(c.multiplicity, class_count_cap))
        n = c.size if c.is_explicit else int(min(c.size, size_cap))
        X = c.structure(n)
        for j in range(count):
            parts.append(X)
            slots.append(Slot(k, c.size, j))
    fam = spec.unbounded
    if fam is not None:
        for n in range(1, size_cap + 1):
            X = shape_structure(normal_shape(fam.shape, n), n)
            for j in range(int(min(fam.multiplicity(n), class_count_cap))):
                parts.append(X)
                slots.append(Slot(spec.family_index, n, j))
    total = sum(p.n for p in parts)
    if total > point_cap:
        raise ResourceError(f"truncation has {total} points, above the cap {point_cap}")
    blocks = []
    offset = 0
    for p in parts:
        blocks.append(frozenset(range(offset, offset + p.n)))
        offset += p.n
    return Truncation(disjoint_union(parts), tuple(slots), tuple(blocks))


# -- Text format --------------------------------------------------------------

def _shape_or_explicit(token: str, base: Path | None, lineno: int, source: str | None):
    if token.startswith("explicit:"):
        ref = token[len("explicit:"):]
        path = Path(ref)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return read_structure(path), ref
        except OSError as exc:
            raise ParseError(f"cannot read explicit structure {ref!r}: {exc.strerror}", lineno, source) from None
    try:
        return Shape.parse(token), None
    except ValueError as exc:
        raise ParseError(str(exc), lineno, source) from None


def loads_spec(text: str, source: str | None = None, base_dir: str | Path | None = None) -> CatalogueSpec:
    base = Path(base_dir) if base_dir is not None else None
    classes: list[ComponentClass] = []
    family = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "class":
                if len(words) != 6 or words[2] != "size" or words[4] != "mult":
                    raise ParseError("expected 'class <kind> size <n|omega> mult <n|omega>'", lineno, source)
                kind, ref = _shape_or_explicit(words[1], base, lineno, source)
                classes.append(ComponentClass(kind, parse_card(words[3]), parse_card(words[5]), source=ref))
            elif words[0] == "unbounded":
                if family is not None:
                    raise ParseError("only one 'unbounded' line is allowed", lineno, source)
                if len(words) not in (2, 4, 6) or (len(words) >= 4 and words[2] != "default_mult") \
                        or (len(words) == 6 and words[4] != "exceptions"):
                    raise ParseError(
                        "expected 'unbounded <shape> default_mult <n> exceptions <size:mult,...>'", lineno, source)
                shape = Shape.parse(words[1])
                default = parse_card(words[3]) if len(words) >= 4 else 1
                exceptions = []
                if len(words) == 6 and words[5] not in ("-", "none"):
                    for item in words[5].split(","):
                        n, m = item.split(":")
                        exceptions.append((int(n), parse_card(m)))
                family = UnboundedFamily(shape, default, tuple(exceptions))
            else:
                raise ParseError(f"unrecognised line {line!r}", lineno, source)
        except ParseError:
            raise
        except (ValueError, DomainError) as exc:
            raise ParseError(str(exc), lineno, source) from None
    if not classes and family is None:
        raise ParseError("no component classes", None, source)
    return CatalogueSpec(tuple(classes), family)


def read_spec(path: str | Path) -> CatalogueSpec:
    p = Path(path)
    return loads_spec(p.read_text(), source=str(p), base_dir=p.parent)


def dumps_spec(spec: CatalogueSpec) -> str:
    lines = []
    for c in spec.classes:
        if c.is_explicit:
            if not c.source:
                raise DomainError("explicit classes need a source file reference to be written")
            kind = f"explicit:{c.source}"
        else:
            kind = c.kind.value
        lines.append(f"class {kind} size {fmt_card(c.size)} mult {fmt_card(c.multiplicity)}")
    fam = spec.unbounded
    if fam is not None:
        line = f"unbounded {fam.shape.value} default_mult {fmt_card(fam.default_mult)}"
        if fam.exceptions:
            line += " exceptions " + ",".join(f"{n}:{fmt_card(m)}" for n, m in fam.exceptions)
        lines.append(line)
    return "\n".join(lines) + "\n"
