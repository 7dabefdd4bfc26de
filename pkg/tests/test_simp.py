"""Tests for the shape combinatorics and truncated simplicial objects.

Shape levels are checked against a raw enumerate-and-filter oracle; structure
operators of group nerves against the closed product formula; Hom objects
against an independent cell-by-cell assignment search.
"""

import pytest

from oracles import (
    brute_boundary_cells,
    brute_horn_cells,
    brute_product_cells,
    brute_simplex_cells,
    nerve_operator_oracle,
    values_of_label,
)

from ngrpd.fincat import FinSetsSite, FinSetObj
from ngrpd.gset import cyclic_group
from ngrpd.simp import (
    OrdinalMap,
    TruncatedSimplicialObject,
    SimplicialMorphism,
    boundary,
    boundary_matching_map,
    boundary_restriction,
    cech_nerve,
    constant_object,
    constant_objects_morphism,
    compose_morphisms,
    empty_shape,
    enumerate_sections_directly,
    evaluation_map,
    group_nerve,
    group_nerve_morphism,
    hom_into,
    hom_postcompose,
    horn,
    identity_morphism,
    matching_map,
    ordinal_maps,
    product_simplex,
    relative_matching_map,
    standard_simplex,
    truncate,
    truncate_morphism,
)


SITE = FinSetsSite()
Z2 = cyclic_group(2)
Z3 = cyclic_group(3)


def fold_map():
    """A surjection with fibers of sizes 2 and 1."""
    A = FinSetObj(["a1", "a2", "b1"])
    B = FinSetObj(["x", "y"])
    return SITE.morphism_from_mapping(A, B, {"a1": "x", "a2": "x", "b1": "y"})


def label_sets(shape, m):
    return {values_of_label(c) for c in shape.cells(m)}


class TestOrdinalMaps:
    def test_count_matches_binomial(self):
        from math import comb

        for m in range(5):
            for k in range(5):
                assert len(ordinal_maps(m, k)) == comb(m + k + 1, m + 1)

    def test_coface_codegeneracy_values(self):
        assert OrdinalMap.coface(3, 1).values == (0, 2, 3)
        assert OrdinalMap.codegeneracy(2, 0).values == (0, 0, 1, 2)
        assert OrdinalMap.identity(2).values == (0, 1, 2)
        assert OrdinalMap.constant(2, 3, 1).values == (1, 1, 1)

    def test_compose_applies_right_factor_first(self):
        sigma = OrdinalMap.codegeneracy(1, 0)  # [2] -> [1]
        delta = OrdinalMap.coface(2, 1)  # [1] -> [2]
        assert delta.compose(sigma).values == (0, 0, 2)

    def test_factorize_round_trips(self):
        for m in range(4):
            for k in range(4):
                for alpha in ordinal_maps(m, k):
                    missing, duplicated = alpha.factorize()
                    assert missing == sorted(missing, reverse=True)
                    assert duplicated == sorted(duplicated)
                    # Rebuild alpha as cofaces after codegeneracies: factors
                    # left to right are coface(level, i1), coface(level-1, i2),
                    # ..., then codegeneracy(level, j1), codegeneracy(level+1, j2), ...
                    factors = []
                    level = k
                    for i in missing:
                        factors.append(OrdinalMap.coface(level, i))
                        level -= 1
                    for j in duplicated:
                        factors.append(OrdinalMap.codegeneracy(level, j))
                        level += 1
                    rebuilt = OrdinalMap.identity(k)
                    for f in factors:
                        rebuilt = rebuilt.compose(f)
                    assert rebuilt == alpha

    def test_rejects_decreasing_values(self):
        with pytest.raises(ValueError):
            OrdinalMap(1, 2, (1, 0))


class TestShapesAgainstBruteForce:
    def test_simplex_levels(self):
        for k in range(5):
            shape = standard_simplex(k, 4)
            for m in range(5):
                assert label_sets(shape, m) == brute_simplex_cells(k, m)

    def test_boundary_levels(self):
        for k in range(1, 5):
            shape = boundary(k, 4)
            for m in range(5):
                assert label_sets(shape, m) == brute_boundary_cells(k, m)

    def test_horn_levels(self):
        for k in range(1, 5):
            for i in range(k + 1):
                shape = horn(k, i, 4)
                for m in range(5):
                    assert label_sets(shape, m) == brute_horn_cells(k, i, m)

    def test_product_levels(self):
        shape = product_simplex(1, 1, 3)
        for m in range(4):
            got = set()
            for c in shape.cells(m):
                a, b = shape.cell_data[(m, c)]
                got.add((a.values, b.values))
            assert got == brute_product_cells(1, 1, m)

    def test_frozen_counts(self):
        assert len(standard_simplex(2, 2).cells(1)) == 6
        assert len(standard_simplex(1, 2).cells(2)) == 4
        assert len(boundary(2, 2).cells(1)) == 6
        assert len(boundary(2, 2).cells(2)) == 9
        assert [len(boundary(1, 3).cells(m)) for m in range(4)] == [2, 2, 2, 2]
        assert len(horn(1, 0, 2).cells(0)) == 1
        assert len(horn(2, 1, 2).cells(1)) == 5
        assert len(product_simplex(1, 1, 2).cells(1)) == 9
        two_cells = [
            c for (m, c) in product_simplex(1, 1, 2).nondegenerate_cells() if m == 2
        ]
        assert len(two_cells) == 2

    def test_generating_cells(self):
        assert standard_simplex(2, 2).generating_cells() == [(2, "(0,1,2)")]
        assert len(boundary(2, 2).generating_cells()) == 3
        assert len(horn(2, 1, 2).generating_cells()) == 2
        prod_gens = product_simplex(1, 1, 2).generating_cells()
        assert len(prod_gens) == 2 and all(m == 2 for m, _ in prod_gens)
        assert empty_shape(2).generating_cells() == []

    def test_shape_argument_validation(self):
        with pytest.raises(ValueError):
            boundary(0, 2)
        with pytest.raises(ValueError):
            horn(2, 3, 2)
        with pytest.raises(ValueError):
            horn(0, 0, 2)

    def test_invalid_complex_rejected(self):
        from ngrpd.simp import FiniteSimplicialSet

        with pytest.raises(ValueError):
            FiniteSimplicialSet(
                1,
                {0: ["a", "b"], 1: ["e"]},
                {(1, 0): {"e": "a"}, (1, 1): {"e": "b"}},
                {(0, 0): {"a": "e", "b": "e"}},
            )


class TestNerves:
    def test_group_nerve_levels_and_maps(self):
        X = group_nerve(SITE, Z2, 3)
        assert X.level_sizes() == [1, 2, 4, 8]
        d1 = SITE.mapping(X.d[(2, 1)])
        assert d1["(1,1)"] == "(0)"
        assert d1["(0,1)"] == "(1)"
        d0 = SITE.mapping(X.d[(2, 0)])
        assert d0["(1,1)"] == "(1)"
        s0 = SITE.mapping(X.s[(0, 0)])
        assert s0["()"] == "(0)"

    def test_operator_matches_product_formula(self):
        X = group_nerve(SITE, Z3, 3)
        from ngrpd.fincat import tuple_label

        for m in range(4):
            for k in range(4):
                for alpha in ordinal_maps(m, k):
                    got = SITE.mapping(X.operator(alpha))
                    for cell in map(tuple, __import__("itertools").product(Z3.elements, repeat=k)):
                        want = nerve_operator_oracle(Z3, alpha.values, cell)
                        assert got[tuple_label(cell)] == tuple_label(want)

    def test_operator_identity_and_truncation_guard(self):
        X = group_nerve(SITE, Z2, 2)
        ident = X.operator(OrdinalMap.identity(1))
        assert SITE.is_identity(ident)
        with pytest.raises(ValueError):
            X.operator(OrdinalMap.identity(3))

    def test_group_nerve_morphism_quotient(self):
        X = group_nerve(SITE, cyclic_group(4), 2)
        Y = group_nerve(SITE, Z2, 2)
        hom_map = {"0": "0", "1": "1", "2": "0", "3": "1"}
        f = group_nerve_morphism(SITE, hom_map, cyclic_group(4), Z2, 2)
        assert f.source == X and f.target == Y
        assert SITE.mapping(f.components[1])["(3)"] == "(1)"

    def test_truncate_round_trip(self):
        X3 = group_nerve(SITE, Z2, 3)
        X2 = group_nerve(SITE, Z2, 2)
        assert truncate(X3, 2) == X2
        f = identity_morphism(X3)
        g = truncate_morphism(f, 2)
        assert g.source == X2 and SITE.is_identity(g.components[2])

    def test_cech_nerve_sizes_and_structure(self):
        X, aug = cech_nerve(SITE, fold_map(), 2)
        assert X.level_sizes() == [3, 5, 9]
        # Faces drop a coordinate.
        d0 = SITE.mapping(X.d[(1, 0)])
        assert d0["(a1,a2)"] == "(a2)"
        d1 = SITE.mapping(X.d[(1, 1)])
        assert d1["(a1,a2)"] == "(a1)"
        s0 = SITE.mapping(X.s[(0, 0)])
        assert s0["(a1)"] == "(a1,a1)"
        # Augmentation sends every simplex to the common image point.
        assert SITE.mapping(aug.components[1])["(a1,a2)"] == "x"
        assert aug.target == constant_object(SITE, fold_map().target, 2)

    def test_cech_nerve_of_identity_is_constant(self):
        A = FinSetObj(["p", "q"])
        X, aug = cech_nerve(SITE, SITE.identity(A), 2)
        assert X.level_sizes() == [2, 2, 2]
        assert all(SITE.is_iso(aug.components[m]) for m in range(3))


@pytest.fixture(scope="module")
def objects():
    X, _ = cech_nerve(SITE, fold_map(), 2)
    return {
        "nerve": group_nerve(SITE, Z2, 2),
        "cech": X,
        "const": constant_object(SITE, FinSetObj(["u", "v"]), 2),
    }


class TestHom:
    def normalize_hom(self, hom):
        return {
            frozenset(sec.items()) for sec in hom.sections.values()
        }

    def normalize_direct(self, sections):
        return {
            frozenset((f"{m}:{c}", v) for (m, c), v in sec.items())
            for sec in sections
        }

    def test_hom_matches_direct_enumeration(self, objects):
        shapes = [standard_simplex(k, 2) for k in range(4)]
        shapes += [boundary(k, 2) for k in range(1, 4)]
        shapes += [horn(k, i, 2) for k in range(1, 4) for i in range(k + 1)]
        shapes.append(product_simplex(1, 1, 2))
        shapes.append(empty_shape(2))
        for X in objects.values():
            for S in shapes:
                got = self.normalize_hom(hom_into(S, X))
                want = self.normalize_direct(enumerate_sections_directly(S, X))
                assert got == want, f"hom mismatch for {S!r}"

    def test_hom_cached(self, objects):
        X = objects["nerve"]
        S = boundary(2, 2)
        assert hom_into(S, X) is hom_into(S, X)

    def test_simplex_hom_is_level(self, objects):
        for X in objects.values():
            for k in range(3):
                S = standard_simplex(k, 2)
                hom = hom_into(S, X)
                assert len(hom.sections) == X.level_sizes()[k]
                ev = evaluation_map(hom, S, k, OrdinalMap.identity(k).label(), X)
                assert SITE.is_iso(ev)

    def test_empty_shape_hom_is_singleton(self, objects):
        hom = hom_into(empty_shape(2), objects["cech"])
        assert list(hom.sections) == ["()"]

    def test_frozen_horn_hom_count(self, objects):
        hom = hom_into(horn(2, 1, 2), objects["nerve"])
        assert len(hom.sections) == 4

    def test_frozen_product_hom_count(self, objects):
        hom = hom_into(product_simplex(1, 1, 2), objects["nerve"])
        assert len(hom.sections) == 8

    def test_postcompose_commutes_with_evaluation(self, objects):
        X, aug = cech_nerve(SITE, fold_map(), 2)
        Y = aug.target
        S = standard_simplex(1, 2)
        hom_x = hom_into(S, X)
        hom_y = hom_into(S, Y)
        push = SITE.mapping(hom_postcompose(hom_x, hom_y, S, aug))
        ev_cell = OrdinalMap.identity(1).label()
        ev_x = SITE.mapping(evaluation_map(hom_x, S, 1, ev_cell, X))
        ev_y = SITE.mapping(evaluation_map(hom_y, S, 1, ev_cell, Y))
        f1 = SITE.mapping(aug.components[1])
        for label in hom_x.sections:
            assert ev_y[push[label]] == f1[ev_x[label]]


class TestMatchingMaps:
    def test_horn_restriction_on_nerve(self):
        X = group_nerve(SITE, Z2, 2)
        lam10, _ = matching_map(1, 0, X)
        assert SITE.is_cover(lam10) and not SITE.is_iso(lam10)
        assert len(SITE.elements(lam10.target)) == 1
        lam21, _ = matching_map(2, 1, X)
        assert SITE.is_iso(lam21)
        lam20, _ = matching_map(2, 0, X)
        assert SITE.is_iso(lam20)

    def test_matching_map_range_checks(self):
        X = group_nerve(SITE, Z2, 2)
        with pytest.raises(ValueError):
            matching_map(0, 0, X)
        with pytest.raises(ValueError):
            matching_map(3, 0, X)

    def test_boundary_restriction_at_zero(self):
        X = group_nerve(SITE, Z2, 2)
        rho, hom = boundary_restriction(0, X)
        assert len(SITE.elements(rho.target)) == 1
        assert list(hom.sections) == ["()"]

    def test_boundary_matching_map_at_zero_is_component(self):
        f = constant_objects_morphism(SITE, fold_map(), 2)
        cmp0 = boundary_matching_map(0, f)
        assert SITE.morphisms_equal(cmp0, f.components[0])

    def test_relative_matching_of_identity_is_iso(self):
        X = group_nerve(SITE, Z2, 2)
        f = identity_morphism(X)
        for k in range(1, 3):
            for i in range(k + 1):
                assert SITE.is_iso(relative_matching_map(k, i, f))

    def test_boundary_matching_of_identity_is_iso(self):
        X = group_nerve(SITE, Z2, 2)
        f = identity_morphism(X)
        for k in range(3):
            assert SITE.is_iso(boundary_matching_map(k, f))


class TestMorphismAlgebra:
    def test_compose_and_identity(self):
        X, aug = cech_nerve(SITE, fold_map(), 2)
        comp = compose_morphisms(aug, identity_morphism(X))
        assert comp == aug
        comp2 = compose_morphisms(identity_morphism(aug.target), aug)
        assert comp2 == aug

    def test_morphism_must_commute(self):
        X = group_nerve(SITE, Z2, 2)
        swap = SITE.morphism_from_mapping(
            X.levels[0], X.levels[0], {"()": "()"}
        )
        flip1 = SITE.morphism_from_mapping(
            X.levels[1], X.levels[1], {"(0)": "(1)", "(1)": "(0)"}
        )
        with pytest.raises(ValueError):
            SimplicialMorphism(
                X, X, {0: swap, 1: flip1, 2: SITE.identity(X.levels[2])}
            )

    def test_object_validation_catches_broken_identity(self):
        X = group_nerve(SITE, Z2, 2)
        d = dict(X.d)
        d[(2, 1)] = X.d[(2, 0)]
        bad_levels = dict(X.levels)
        with pytest.raises(ValueError):
            TruncatedSimplicialObject(SITE, 2, bad_levels, d, dict(X.s))
