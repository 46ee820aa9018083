"""Seeded generators and the property suites behind ``copyposets verify``.

Each suite returns a :class:`SuiteResult`; the suites are deterministic for a
given seed.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from .catalogue import (
    CatalogueSpec,
    ComponentClass,
    UnboundedFamily,
    truncate,
    validate,
)
from .classifier import (
    EDfinProduct,
    FinPower,
    FinTimesFin,
    ForcingClass,
    classify,
    divisibility_witness,
    is_indivisible,
    n_equals_one_check,
)
from .common import OMEGA, DomainError, ResourceError
from .ideals import (
    TailRule,
    TraceProfile,
    check_descriptor,
    check_intersection,
    copy_inside_bruteforce,
    copy_inside_matching,
    descriptor_copies,
    ideal_member,
    incompatible_copies_witness,
    is_complementary,
)
from .posets import (
    FinitePreOrder,
    check_transfer,
    iso,
    product,
    random_partial_order,
    random_preorder,
    sm,
    sq,
)
from .structures import (
    BinaryStructure,
    Shape,
    copies,
    cycle,
    disjoint_union,
    is_connected,
    is_p_monomorphic,
    oriented_cycle,
    path,
    relabel,
    shape_structure,
)

F, K, L = Shape.FULL_RELATION, Shape.COMPLETE_GRAPH, Shape.STRICT_LINEAR_ORDER


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: {self.checked} checks, {len(self.failures)} failures, {self.seconds:.2f}s"
        if self.notes:
            text += f" ({self.notes})"
        return text


def _timed(name: str, body: Callable[[SuiteResult], None]) -> SuiteResult:
    result = SuiteResult(name)
    start = time.perf_counter()
    body(result)
    result.seconds = time.perf_counter() - start
    return result


def spec_of(*classes, family: UnboundedFamily | None = None) -> CatalogueSpec:
    return CatalogueSpec(tuple(ComponentClass(*c) for c in classes), family)


# -- Fixed batteries ----------------------------------------------------------

@dataclass(frozen=True)
class GoldenRow:
    name: str
    spec: CatalogueSpec
    expected: ForcingClass
    indivisible: bool


def golden_table() -> list[GoldenRow]:
    """Full relations, complete graphs and linear orders in the standard configurations."""
    rows = []
    for letter, shape in (("F", F), ("K", K), ("L", L)):
        rows += [
            GoldenRow(f"U_w {letter}_1", spec_of((shape, 1, OMEGA)), FinPower(1), True),
            GoldenRow(f"U_w {letter}_2", spec_of((shape, 2, OMEGA)), FinPower(1), False),
            GoldenRow(f"U_1 {letter}_w", spec_of((shape, OMEGA, 1)), FinPower(1), True),
            GoldenRow(f"U_2 {letter}_w", spec_of((shape, OMEGA, 2)), FinPower(2), False),
            GoldenRow(f"U_w {letter}_w", spec_of((shape, OMEGA, OMEGA)), FinTimesFin(), True),
            GoldenRow(f"U_n {letter}_n", spec_of(family=UnboundedFamily(shape)), EDfinProduct(0), True),
            GoldenRow(f"{letter}_3 + U_w {letter}_2", spec_of((shape, 3, 1), (shape, 2, OMEGA)), FinPower(1), False),
        ]
    return rows


def exponent_battery() -> list[CatalogueSpec]:
    """Twenty valid catalogues with a finite-power class, covering both cases."""
    R = Shape.REFLEXIVE_LINEAR_ORDER
    return [
        spec_of((F, OMEGA, 1)),
        spec_of((K, OMEGA, 3)),
        spec_of((L, OMEGA, 2), (L, 2, 1)),
        spec_of((F, OMEGA, 1), (F, 4, 2), (F, 1, 3)),
        spec_of((R, OMEGA, 4), (R, 3, 1)),
        spec_of((K, OMEGA, 1), (K, 2, 5)),
        spec_of((F, 2, OMEGA)),
        spec_of((K, 1, OMEGA), (K, 5, 2)),
        spec_of((L, 3, OMEGA), (L, 4, OMEGA)),
        spec_of((F, OMEGA, 1), (F, 2, OMEGA)),
        spec_of((F, OMEGA, 2), (F, 2, OMEGA)),
        spec_of((K, OMEGA, 3), (K, 1, OMEGA), (K, 4, 1)),
        spec_of((R, 5, OMEGA), (R, 2, 3)),
        spec_of((L, OMEGA, 1), (L, 1, OMEGA)),
        spec_of((Shape.INVERSE_STRICT_LINEAR_ORDER, OMEGA, 2), (L, 3, 2)),
        spec_of((path(3), 3, OMEGA), (cycle(4), 4, OMEGA)),
        spec_of((path(3), 3, 2), (cycle(4), 4, OMEGA)),
        spec_of((oriented_cycle(3), 3, OMEGA), (L, 2, OMEGA), (L, 1, 1)),
        spec_of((K, OMEGA, 1), (K, 3, OMEGA), (K, 2, 2)),
        spec_of((F, 6, OMEGA), (F, 1, 1), (F, 3, 4)),
    ]


def exponent_one_formula(spec: CatalogueSpec) -> bool:
    """``N`` is a finite set of naturals, or ``Y`` is finite and there is one infinite component.

    Computed straight from the class list.
    """
    sizes_finite = spec.unbounded is None and all(c.size != OMEGA for c in spec.classes)
    y_finite = spec.unbounded is None and all(
        c.multiplicity != OMEGA for c in spec.classes if c.size != OMEGA
    )
    omega_components = sum(c.multiplicity for c in spec.classes if c.size == OMEGA)
    return sizes_finite or (y_finite and omega_components == 1)


# -- Random generators --------------------------------------------------------

_SHAPES = [
    Shape.FULL_RELATION,
    Shape.COMPLETE_GRAPH,
    Shape.STRICT_LINEAR_ORDER,
    Shape.REFLEXIVE_LINEAR_ORDER,
    Shape.INVERSE_STRICT_LINEAR_ORDER,
    Shape.INVERSE_REFLEXIVE_LINEAR_ORDER,
]


def _mult(rng: random.Random) -> int | float:
    return rng.choice([1, 1, 2, 3, OMEGA, OMEGA])


def random_spec(rng: random.Random) -> CatalogueSpec:
    """A random catalogue; not necessarily valid."""
    template = rng.random()
    if template < 0.55:
        shapes = [rng.choice(_SHAPES)]
        if rng.random() < 0.2:
            shapes.append(rng.choice(_SHAPES))
        sizes = rng.sample([1, 2, 3, 4, 5, OMEGA], rng.randint(1, 3))
        classes = [ComponentClass(rng.choice(shapes), s, _mult(rng)) for s in sizes]
        family = None
        if rng.random() < 0.15:
            family = UnboundedFamily(shapes[0], rng.choice([1, 1, 2]))
        if not any(c.multiplicity == OMEGA or c.size == OMEGA for c in classes) and family is None:
            classes[0] = ComponentClass(classes[0].kind, classes[0].size, OMEGA)
        return CatalogueSpec(tuple(classes), family)
    if template < 0.75:
        classes = [ComponentClass(path(3), 3, _mult(rng)), ComponentClass(cycle(4), 4, OMEGA)]
        if rng.random() < 0.3:
            classes.append(ComponentClass(Shape.SINGLETON_NO_LOOP, 1, _mult(rng)))
        return CatalogueSpec(tuple(classes))
    if template < 0.9:
        classes = [ComponentClass(oriented_cycle(3), 3, OMEGA)]
        for s in rng.sample([1, 2], rng.randint(0, 2)):
            classes.append(ComponentClass(L, s, _mult(rng)))
        return CatalogueSpec(tuple(classes))
    X = random_connected_structure(rng, rng.randint(2, 4))
    classes = [ComponentClass(X, X.n, OMEGA)]
    if rng.random() < 0.5:
        point = Shape.SINGLETON_LOOP if X.related(0, 0) else Shape.SINGLETON_NO_LOOP
        classes.append(ComponentClass(point, 1, _mult(rng)))
    return CatalogueSpec(tuple(classes))


def random_valid_spec(rng: random.Random) -> CatalogueSpec:
    while True:
        spec = random_spec(rng)
        if validate(spec).ok:
            return spec


def random_structure(rng: random.Random, n: int, density: float = 0.35) -> BinaryStructure:
    return BinaryStructure(n, frozenset(
        (u, v) for u in range(n) for v in range(n) if rng.random() < density
    ))


def random_connected_structure(rng: random.Random, n: int) -> BinaryStructure:
    while True:
        X = random_structure(rng, n, density=0.45)
        if is_connected(X):
            return X


def random_finite_union(rng: random.Random, max_points: int = 10) -> tuple[BinaryStructure, list[BinaryStructure]]:
    """A random disjoint union whose components satisfy both embeddability conditions."""
    while True:
        template = rng.random()
        if template < 0.6:
            shape = rng.choice(_SHAPES)
            sizes = [rng.randint(1, 4) for _ in range(rng.randint(1, 4))]
            parts = [shape_structure(_finite_tag(shape, s), s) for s in sizes]
        elif template < 0.75:
            parts = [path(3)] * rng.randint(0, 1) + [cycle(4)] * rng.randint(1, 2)
        elif template < 0.9:
            parts = [oriented_cycle(3)] * rng.randint(1, 2) + [
                shape_structure(_finite_tag(L, s), s) for s in rng.sample([1, 2], rng.randint(0, 2))
            ]
        else:
            X = random_connected_structure(rng, rng.randint(1, 4))
            parts = [X] * rng.randint(1, 2)
            if rng.random() < 0.5:
                loop = X.related(0, 0)
                parts.append(shape_structure(Shape.SINGLETON_LOOP if loop else Shape.SINGLETON_NO_LOOP, 1))
        if sum(p.n for p in parts) > max_points:
            continue
        parts = [relabel(p, rng.sample(range(p.n), p.n)) for p in parts]
        spec = CatalogueSpec(tuple(ComponentClass(p, p.n, 1) for p in parts))
        report = validate(spec)
        if report.failures and all(f.condition == "finite" for f in report.failures) and not report.unverified:
            return disjoint_union(parts), parts


def _finite_tag(shape: Shape, n: int) -> Shape:
    from .catalogue import normal_shape

    return normal_shape(shape, n)


def random_profile(rng: random.Random, spec: CatalogueSpec) -> TraceProfile:
    def value(size):
        if size == OMEGA:
            return rng.choice([0, 1, 3, OMEGA, OMEGA])
        return rng.randint(0, size)

    traces, tails = {}, {}
    for k, c in enumerate(spec.classes):
        if c.multiplicity == OMEGA:
            tails[k] = value(c.size)
            listed = rng.sample(range(6), rng.randint(0, 3))
        else:
            listed = [j for j in range(c.multiplicity) if rng.random() < 0.7]
        for j in listed:
            traces[(k, j)] = value(c.size)
    fam_traces, fam_tail = {}, None
    fam = spec.unbounded
    if fam is not None:
        fam_tail = TailRule.full() if rng.random() < 0.5 else TailRule.bounded(rng.randint(0, 4))
        for n in rng.sample(range(1, 7), rng.randint(0, 3)):
            j = rng.randrange(int(min(fam.multiplicity(n), 3)))
            fam_traces[(n, j)] = rng.randint(0, n)
    return TraceProfile(traces, tails, fam_traces, fam_tail)


def random_complementary_pair(rng: random.Random, spec: CatalogueSpec) -> tuple[TraceProfile, TraceProfile]:
    """A random partition of the structure, described by its two profiles."""
    def split(size):
        if size == OMEGA:
            a = rng.choice([0, 2, OMEGA, OMEGA])
            b = OMEGA if a != OMEGA else rng.choice([0, 1, 4, OMEGA])
            return (a, b) if rng.random() < 0.5 else (b, a)
        a = rng.randint(0, size)
        return a, size - a

    a_tr, b_tr, a_tails, b_tails = {}, {}, {}, {}
    for k, c in enumerate(spec.classes):
        if c.multiplicity == OMEGA:
            a_tails[k], b_tails[k] = split(c.size)
            listed = rng.sample(range(6), rng.randint(0, 3))
        else:
            listed = range(c.multiplicity)
        for j in listed:
            a_tr[(k, j)], b_tr[(k, j)] = split(c.size)
    a_fam, b_fam, fa, fb = {}, {}, None, None
    fam = spec.unbounded
    if fam is not None:
        fa, fb = TailRule.full(), TailRule.bounded(0)
        if rng.random() < 0.5:
            fa, fb = fb, fa
        for n in rng.sample(range(1, 7), rng.randint(0, 3)):
            j = rng.randrange(int(min(fam.multiplicity(n), 3)))
            t = rng.randint(0, n)
            a_fam[(n, j)], b_fam[(n, j)] = t, n - t
    return TraceProfile(a_tr, a_tails, a_fam, fa), TraceProfile(b_tr, b_tails, b_fam, fb)


def random_oracle_case(rng: random.Random, max_points: int = 14):
    """A valid catalogue, a host truncation, a smaller pattern truncation and a subset of the host."""
    while True:
        spec = random_valid_spec(rng)
        host_count, host_size = rng.randint(1, 4), rng.randint(1, 6)
        try:
            host = truncate(spec, host_count, host_size, point_cap=max_points)
        except ResourceError:
            continue
        if len(host.blocks) > 12:
            continue
        pattern = truncate(spec, rng.randint(1, host_count), rng.randint(1, host_size))
        if pattern.structure.n > host.structure.n:
            continue
        keep = rng.choice([0.6, 0.75, 0.9, 1.0])
        S = frozenset(x for x in range(host.structure.n) if rng.random() < keep)
        return spec, host, pattern, S


# -- Suites -------------------------------------------------------------------

def suite_golden() -> SuiteResult:
    def body(r: SuiteResult):
        for row in golden_table():
            got = classify(row.spec)
            r.checked += 1
            if got != row.expected:
                r.failures.append(f"{row.name}: classified {got.name()}, expected {row.expected.name()}")
            r.checked += 1
            if is_indivisible(row.spec) != row.indivisible:
                r.failures.append(f"{row.name}: indivisible={not row.indivisible}")

    return _timed("golden classification table", body)


def suite_exponent() -> SuiteResult:
    def body(r: SuiteResult):
        for spec in exponent_battery():
            got = classify(spec)
            r.checked += 1
            if not isinstance(got, FinPower):
                r.failures.append(f"{spec}: expected a finite power, got {got.name()}")
                continue
            formula = exponent_one_formula(spec)
            if formula != (got.n == 1) or n_equals_one_check(spec) != formula:
                r.failures.append(f"{spec}: n={got.n}, formula says {formula}")

    return _timed("exponent-one criterion", body)


def suite_oracle(seed: int = 0, cases: int = 500) -> SuiteResult:
    def body(r: SuiteResult):
        rng = random.Random(seed)
        positives = 0
        for _ in range(cases):
            spec, host, pattern, S = random_oracle_case(rng)
            fast = copy_inside_matching(host, S, pattern)
            slow = copy_inside_bruteforce(host.structure, S, pattern.structure, cap=16)
            r.checked += 1
            positives += slow
            if fast != slow:
                r.failures.append(f"{spec} S={sorted(S)}: matching {fast}, brute force {slow}")
        r.notes = f"{positives} containing a copy"

    return _timed("ideal oracle equivalence", body)


def suite_copy_characterization(seed: int = 0, cases: int = 200) -> SuiteResult:
    def body(r: SuiteResult):
        rng = random.Random(seed)
        for _ in range(cases):
            X, parts = random_finite_union(rng)
            r.checked += 1
            if copies(X, X) != descriptor_copies(X, X):
                r.failures.append(f"{X}: copies of X in X differ from descriptor copies")
            chosen = [p for p in parts if rng.random() < 0.6] or parts[:1]
            Z = disjoint_union(chosen)
            r.checked += 1
            if copies(Z, X) != descriptor_copies(Z, X):
                r.failures.append(f"{Z} in {X}: copies differ from descriptor copies")

    return _timed("copy characterization", body)


def witness_battery(seed: int = 0, extra: int = 30) -> list[CatalogueSpec]:
    rng = random.Random(seed)
    specs = [row.spec for row in golden_table()] + exponent_battery()
    specs += [random_valid_spec(rng) for _ in range(extra)]
    return specs


def suite_witness(seed: int = 0, pairs: int = 100) -> SuiteResult:
    def body(r: SuiteResult):
        rng = random.Random(seed)
        for spec in witness_battery(seed):
            if is_indivisible(spec):
                for _ in range(pairs):
                    a, b = random_complementary_pair(rng, spec)
                    r.checked += 1
                    if not is_complementary(spec, a, b):
                        r.failures.append(f"{spec}: generator produced a non-partition")
                    elif ideal_member(spec, a) and ideal_member(spec, b):
                        r.failures.append(f"{spec}: both sides of a partition are copy-free")
            else:
                a, b = divisibility_witness(spec)
                r.checked += 1
                if not (is_complementary(spec, a, b) and ideal_member(spec, a) and ideal_member(spec, b)):
                    r.failures.append(f"{spec}: divisibility witness is unsound")
            witness = incompatible_copies_witness(spec)
            r.checked += 1
            if witness is None:
                r.failures.append(f"{spec}: no incompatible copies")
                continue
            a, b, meet = witness
            problems = check_descriptor(spec, a) + check_descriptor(spec, b)
            problems += check_intersection(spec, a, b, meet)
            if problems or not ideal_member(spec, meet):
                r.failures.append(f"{spec}: incompatible copies unsound: {problems[:2]}")

    return _timed("witness soundness", body)


def monomorphy_violations(X: BinaryStructure) -> list[tuple[int, int]]:
    """Pairs ``(p, r)`` where X is p-monomorphic but not r-monomorphic, ``r <= min(p, n - p)``."""
    n = X.n
    mono = {p: is_p_monomorphic(X, p) for p in range(1, n + 1)}
    return [
        (p, r) for p in range(1, n + 1) if mono[p]
        for r in range(1, min(p, n - p) + 1) if not mono[r]
    ]


def _relation_from_mask(n: int, mask: int) -> BinaryStructure:
    cells = [(u, v) for u in range(n) for v in range(n)]
    return BinaryStructure(n, frozenset(c for i, c in enumerate(cells) if mask >> i & 1))


def suite_monomorphy(seed: int = 0, samples: int = 100_000) -> SuiteResult:
    def body(r: SuiteResult):
        for mask in range(1 << 9):
            r.checked += 1
            bad = monomorphy_violations(_relation_from_mask(3, mask))
            if bad:
                r.failures.append(f"3 points, mask {mask}: {bad}")
        rng = random.Random(seed)
        seen: dict[int, list] = {}
        for _ in range(samples):
            mask = rng.getrandbits(16)
            if mask not in seen:
                seen[mask] = monomorphy_violations(_relation_from_mask(4, mask))
            r.checked += 1
            if seen[mask]:
                r.failures.append(f"4 points, mask {mask}: {seen[mask]}")
        r.notes = f"{len(seen)} distinct 4-point relations"

    return _timed("monomorphy sweep", body)


def literally_separative(P: FinitePreOrder) -> bool:
    C = P.compat
    for p in range(P.n):
        for q in range(P.n):
            if not P.le[p, q] and not any(not C[r, q] for r in P.below(p)):
                return False
    return True


def literal_sm(P: FinitePreOrder) -> FinitePreOrder:
    """``p <=* q`` iff every ``r <= p`` has some ``s <= r`` with ``s <= q``."""
    n = P.n
    pairs = [
        (p, q) for p in range(n) for q in range(n)
        if all(any(P.le[s, r] and P.le[s, q] for s in range(n)) for r in range(n) if P.le[r, p])
    ]
    return FinitePreOrder.from_pairs(n, pairs)


def random_transfer_triple(rng: random.Random):
    """Partial orders P, Q and an onto map satisfying the transfer conditions."""
    while True:
        kind = rng.random()
        P = random_partial_order(rng, rng.randint(1, 6))
        if kind < 0.4:
            # onto the separative quotient
            quotient = sq(P)
            f = [quotient.class_of[p] for p in range(P.n)]
            perm = rng.sample(range(quotient.size), quotient.size)
            Q = _permute(quotient.order, perm)
            f = [perm.index(x) for x in f]
        else:
            Q = random_partial_order(rng, rng.randint(1, min(P.n, 3)))
            f = [rng.randrange(Q.n) for _ in range(P.n)]
        verdict = check_transfer(f, P, Q)
        if verdict.conditions_hold:
            return P, Q, f, verdict


def _permute(Q: FinitePreOrder, perm: list[int]) -> FinitePreOrder:
    """Relabel so that old element ``perm[i]`` becomes ``i``."""
    return FinitePreOrder(Q.le[perm][:, perm])


def suite_posets(seed: int = 0, singles: int = 1000, pairs: int = 300, transfers: int = 200) -> SuiteResult:
    def body(r: SuiteResult):
        rng = random.Random(seed)
        for _ in range(singles):
            P = random_preorder(rng, rng.randint(0, 6))
            S = sm(P)
            Q = sq(P)
            r.checked += 1
            problems = []
            if S != literal_sm(P):
                problems.append("sm disagrees with its definition")
            if sm(S) != S:
                problems.append("sm not idempotent")
            if (P.le & ~S.le).any():
                problems.append("order not contained in sm")
            if not Q.order.is_antisymmetric():
                problems.append("quotient not antisymmetric")
            elif not literally_separative(Q.order):
                problems.append("quotient not separative")
            if problems:
                r.failures.append(f"{P}: {', '.join(problems)}")
        for _ in range(pairs):
            P = random_preorder(rng, rng.randint(1, 5))
            Q = random_preorder(rng, rng.randint(1, 5))
            r.checked += 1
            if sm(product(P, Q)) != product(sm(P), sm(Q)):
                r.failures.append(f"{P} x {Q}: sm does not commute with products")
            if not iso(sq(product(P, Q)).order, product(sq(P).order, sq(Q).order)):
                r.failures.append(f"{P} x {Q}: sq does not commute with products")
        for _ in range(transfers):
            P, Q, f, verdict = random_transfer_triple(rng)
            r.checked += 1
            if not verdict.quotient_iso:
                r.failures.append(f"{P} -> {Q} by {f}: {verdict.failures}")

    return _timed("poset laws", body)


def suite_validation_examples() -> SuiteResult:
    def body(r: SuiteResult):
        mixed_spec = spec_of((K, OMEGA, 1), (F, OMEGA, 1))
        mixed = validate(mixed_spec)
        r.checked += 1
        concrete = [f for f in mixed.failures if f.condition == "i" and f.counterexample]
        if mixed.ok or not concrete:
            r.failures.append("mixed complete/full catalogue not rejected with a counterexample")
        else:
            # the counterexample points of the target must not form a copy of the source piece
            f = concrete[0]
            piece = f.counterexample[0]
            src = mixed_spec.classes[f.pair[0]].structure(len(piece))
            dst = mixed_spec.classes[f.pair[1]].structure(max(piece) + 1)
            if piece in copies(src, dst):
                r.failures.append("reported counterexample is a copy after all")
        pc = spec_of((path(3), 3, OMEGA), (cycle(4), 4, OMEGA))
        r.checked += 1
        if not validate(pc).ok:
            r.failures.append("path/cycle catalogue rejected")
        elif classify(pc) != FinPower(1):
            r.failures.append(f"path/cycle classified {classify(pc).name()}")

    return _timed("validation counterexamples", body)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "golden": lambda seed: suite_golden(),
    "exponent": lambda seed: suite_exponent(),
    "oracle": lambda seed: suite_oracle(seed),
    "copies": lambda seed: suite_copy_characterization(seed),
    "witness": lambda seed: suite_witness(seed),
    "monomorphy": lambda seed: suite_monomorphy(seed),
    "posets": lambda seed: suite_posets(seed),
    "validation": lambda seed: suite_validation_examples(),
}


def run_suites(names: list[str], seed: int = 0) -> list[SuiteResult]:
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise DomainError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](seed) for n in names]
