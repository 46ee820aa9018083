import random
from itertools import combinations

import pytest

from copyposets.catalogue import (
    CatalogueSpec,
    ComponentClass,
    UnboundedFamily,
    derive_stats,
    dumps_spec,
    loads_spec,
    normal_shape,
    read_spec,
    truncate,
    validate,
)
from copyposets.common import OMEGA, DomainError, ParseError, ResourceError
from copyposets.structures import (
    BinaryStructure,
    Shape,
    complete,
    copies,
    cycle,
    induced,
    is_connected,
    iter_embeddings,
    path,
    relabel,
    shape_of,
    shape_structure,
    strict_order,
    write_structure,
)

F, K, L = Shape.FULL_RELATION, Shape.COMPLETE_GRAPH, Shape.STRICT_LINEAR_ORDER


def spec(*classes, family=None):
    return CatalogueSpec(tuple(ComponentClass(*c) for c in classes), family)


class TestComponentClass:
    def test_omega_size_only_for_order_like_shapes(self):
        ComponentClass(Shape.INVERSE_STRICT_LINEAR_ORDER, OMEGA, 1)
        with pytest.raises(DomainError):
            ComponentClass(Shape.SINGLETON_LOOP, OMEGA, 1)

    def test_explicit_must_be_connected(self):
        with pytest.raises(DomainError):
            ComponentClass(BinaryStructure(2, frozenset()), 2, 1)

    def test_explicit_size_must_match(self):
        with pytest.raises(DomainError):
            ComponentClass(path(3), 4, 1)

    def test_explicit_cap(self):
        with pytest.raises(DomainError):
            ComponentClass(cycle(13), 13, 1)

    def test_bad_multiplicity(self):
        with pytest.raises(DomainError):
            ComponentClass(F, 2, 0)

    def test_empty_catalogue(self):
        with pytest.raises(DomainError):
            CatalogueSpec(())


class TestNormalShape:
    def test_singletons_follow_loops(self):
        assert normal_shape(F, 1) is Shape.SINGLETON_LOOP
        assert normal_shape(Shape.REFLEXIVE_LINEAR_ORDER, 1) is Shape.SINGLETON_LOOP
        assert normal_shape(K, 1) is Shape.SINGLETON_NO_LOOP

    def test_finite_inverse_orders_collapse(self):
        assert normal_shape(Shape.INVERSE_STRICT_LINEAR_ORDER, 4) is L
        assert normal_shape(Shape.INVERSE_STRICT_LINEAR_ORDER, OMEGA) is Shape.INVERSE_STRICT_LINEAR_ORDER

    @pytest.mark.parametrize("shape", [F, K, L, Shape.REFLEXIVE_LINEAR_ORDER])
    def test_pieces_have_the_normal_shape(self, shape):
        for n in range(1, 6):
            X = shape_structure(normal_shape(shape, n), n)
            for k in range(1, n + 1):
                for A in combinations(range(n), k):
                    assert shape_of(induced(X, A)) is normal_shape(shape, k)


class TestDerivedStats:
    def test_omega_many_pairs(self):
        s = derive_stats(spec((F, 2, OMEGA)))
        assert s.N == {2} and s.mu == 0 and not s.Y_finite

    def test_two_infinite(self):
        s = derive_stats(spec((F, OMEGA, 2)))
        assert s.N == {OMEGA} and s.mu == 2 and s.Y_finite
        assert s.N_fin == frozenset()

    def test_counts_and_family(self):
        s = derive_stats(spec((K, 3, 2), (K, 3, OMEGA), (K, OMEGA, 1), family=UnboundedFamily(K)))
        assert dict(s.I_kappa_counts) == {3: OMEGA, OMEGA: 1}
        assert s.N_unbounded and not s.Y_finite and s.mu == 1
        assert s.component_count == OMEGA

    def test_mu_sums_multiplicities(self):
        assert derive_stats(spec((F, OMEGA, 2), (F, OMEGA, 3), (F, 4, 1))).mu == 5


class TestValidate:
    def test_complete_graphs_of_two_sizes(self):
        assert validate(spec((K, 2, OMEGA), (K, 3, OMEGA))).ok

    def test_complete_and_full_rejected(self):
        report = validate(spec((K, OMEGA, 1), (F, OMEGA, 1)))
        assert not report.ok
        first = report.failures[0]
        assert first.condition == "i"
        assert set(first.pair) == {0, 1}
        assert first.counterexample == (frozenset({0}),)

    def test_path_and_cycle(self):
        assert validate(spec((path(3), 3, OMEGA), (cycle(4), 4, OMEGA))).ok

    def test_finite_shape_pair_counterexample_is_real(self):
        report = validate(spec((L, 2, OMEGA), (K, 3, OMEGA)))
        f = next(f for f in report.failures if f.pair == (0, 1))
        piece = f.counterexample[0]
        assert piece not in copies(strict_order(2), complete(3))

    def test_omega_orders_and_inverses_differ(self):
        report = validate(spec((L, OMEGA, 1), (Shape.INVERSE_STRICT_LINEAR_ORDER, OMEGA, 1)))
        assert not report.ok
        # finite pieces agree, so only the rule is reported
        assert all(f.counterexample is None for f in report.failures)

    def test_finite_orders_and_inverses_agree(self):
        assert validate(spec((L, 3, OMEGA), (Shape.INVERSE_STRICT_LINEAR_ORDER, OMEGA, 1))).ok

    def test_explicit_against_omega_shape(self):
        assert validate(spec((relabel(complete(3), [2, 0, 1]), 3, 2), (K, OMEGA, 1))).ok
        assert not validate(spec((path(3), 3, 2), (K, OMEGA, 1))).ok

    def test_condition_ii_counterexample(self):
        # single points embed anywhere in a 5-path, but two far-apart points are unrelated
        report = validate(spec((Shape.SINGLETON_NO_LOOP, 1, OMEGA), (path(5), 5, OMEGA)))
        assert report.condition_i_ok and not report.condition_ii_ok
        f = next(f for f in report.failures if f.condition == "ii")
        A, B = f.counterexample
        X = path(5)
        assert not any(X.related(a, b) or X.related(b, a) or a == b for a in A for b in B)

    def test_large_explicit_pairs_unverified(self):
        report = validate(spec((complete(3), 3, OMEGA), (complete(8), 8, OMEGA)))
        assert not report.ok and not report.failures
        assert "unverified-at-scale" in report.unverified[0].rule

    def test_finite_catalogue_flagged(self):
        report = validate(spec((K, 2, 3)))
        assert [f.condition for f in report.failures] == ["finite"]

    def test_family_against_classes(self):
        assert validate(spec((F, OMEGA, 2), family=UnboundedFamily(F))).ok
        assert validate(spec((K, 3, 1), family=UnboundedFamily(K, 2))).ok
        assert not validate(spec((F, 3, 1), family=UnboundedFamily(K))).ok
        assert not validate(spec((path(3), 3, 1), family=UnboundedFamily(K))).ok

    def test_agrees_with_brute_force_on_finite_catalogues(self):
        rng = random.Random(11)
        pool = [path(3), cycle(4), complete(3), strict_order(3), _oriented3()]
        checked = 0
        for _ in range(80):
            classes = []
            for _ in range(rng.randint(2, 3)):
                if rng.random() < 0.5:
                    X = rng.choice(pool)
                    classes.append(ComponentClass(relabel(X, rng.sample(range(X.n), X.n)), X.n, rng.randint(1, 2)))
                else:
                    shape = rng.choice([F, K, L, Shape.REFLEXIVE_LINEAR_ORDER])
                    n = rng.randint(1, 4)
                    classes.append(ComponentClass(normal_shape(shape, n), n, rng.randint(1, 2)))
            s = CatalogueSpec(tuple(classes))
            report = validate(s)
            assert not report.unverified
            expected = all(
                copies(a.structure(), b.structure()) == {frozenset(A) for A in combinations(range(b.size), a.size)}
                for i, a in enumerate(s.classes) for j, b in enumerate(s.classes)
                if i != j and a.size <= b.size
            )
            assert report.condition_i_ok == expected
            checked += 1
        assert checked >= 50

    def test_shapes_forced_when_sizes_spread(self):
        # sizes a >= 3 and b >= a + 3 make every validated class a catalogue shape
        rng = random.Random(5)
        validated = 0
        for _ in range(150):
            a = 3
            b = rng.choice([6, 7])
            sizes = [a, rng.randint(a + 1, b - 1), b]
            base = rng.choice([F, K, L, Shape.REFLEXIVE_LINEAR_ORDER])
            classes = []
            for n in sizes:
                roll = rng.random()
                if roll < 0.4:
                    X = shape_structure(normal_shape(base, n), n)
                    X = relabel(X, rng.sample(range(n), n))
                elif roll < 0.7:
                    X = _random_connected(rng, n)
                else:
                    classes.append(ComponentClass(base, n, OMEGA))
                    continue
                classes.append(ComponentClass(X, n, OMEGA))
            s = CatalogueSpec(tuple(classes))
            if validate(s).ok:
                validated += 1
                for c in s.classes:
                    if c.is_explicit:
                        assert shape_of(c.kind) is not Shape.OTHER
        assert validated > 10


def _oriented3():
    return BinaryStructure(3, frozenset({(0, 1), (1, 2), (2, 0)}))


def _random_connected(rng, n):
    while True:
        X = BinaryStructure(n, frozenset((u, v) for u in range(n) for v in range(n) if rng.random() < 0.5))
        if is_connected(X):
            return X


class TestTruncate:
    def test_pairs(self):
        t = truncate(spec((F, 2, OMEGA)), 3, 5)
        assert t.structure.n == 6 and t.block_sizes == (2, 2, 2)
        assert [s.cls for s in t.slots] == [0, 0, 0]

    def test_single_infinite_complete_graph(self):
        t = truncate(spec((K, OMEGA, 1)), 2, 4)
        assert t.structure == complete(4)

    def test_mixed(self):
        t = truncate(spec((K, 2, 2), (L, OMEGA, 1)), 5, 3)
        assert t.block_sizes == (2, 2, 3)
        assert t.block_structure(2) == strict_order(3)

    def test_family_sizes(self):
        t = truncate(spec(family=UnboundedFamily(F, 1, ((2, 3),))), 2, 3)
        assert t.block_sizes == (1, 2, 2, 3)
        assert [s.size for s in t.slots] == [1, 2, 2, 3]

    def test_explicit_not_resized(self):
        t = truncate(spec((cycle(4), 4, OMEGA)), 1, 2)
        assert t.structure == cycle(4)

    def test_point_cap(self):
        with pytest.raises(ResourceError):
            truncate(spec((F, OMEGA, OMEGA)), 10, 10, point_cap=50)

    def test_bad_caps(self):
        with pytest.raises(DomainError):
            truncate(spec((F, OMEGA, 1)), 0, 3)

    @pytest.mark.parametrize("s", [
        spec((F, 2, OMEGA), (F, OMEGA, 1)),
        spec((L, OMEGA, 2), (L, 1, OMEGA)),
        spec((path(3), 3, OMEGA), (cycle(4), 4, 2)),
        spec((K, 2, 1), family=UnboundedFamily(K)),
    ])
    def test_monotone_in_caps(self, s):
        for small, large in [((1, 2), (2, 3)), ((2, 2), (2, 4)), ((1, 3), (3, 3))]:
            X = truncate(s, *small).structure
            Y = truncate(s, *large).structure
            assert next(iter_embeddings(X, Y), None) is not None


class TestTextFormat:
    def test_round_trip(self, tmp_path):
        write_structure(path(3), tmp_path / "p3.structure")
        text = (
            "# mixed\n"
            "class full size omega mult 2\n"
            "class explicit:p3.structure size 3 mult omega\n"
            "unbounded full default_mult 1 exceptions 2:3,5:omega\n"
        )
        (tmp_path / "a.spec").write_text(text)
        s = read_spec(tmp_path / "a.spec")
        assert s.classes[1].kind == path(3)
        assert s.unbounded.multiplicity(5) == OMEGA and s.unbounded.multiplicity(4) == 1
        again = loads_spec(dumps_spec(s), base_dir=tmp_path)
        assert again == s

    @pytest.mark.parametrize("text, line", [
        ("class full size omega mult 2\nclass wobbly size 2 mult 1\n", 2),
        ("\n\nclass full size 2\n", 3),
        ("class complete size -1 mult 1\n", 1),
        ("class point size omega mult 1\n", 1),
        ("class explicit:missing.structure size 3 mult 1\n", 1),
        ("unbounded full\nunbounded full\n", 2),
    ])
    def test_errors_carry_line(self, text, line, tmp_path):
        with pytest.raises(ParseError) as info:
            loads_spec(text, source="x.spec", base_dir=tmp_path)
        assert info.value.line == line
