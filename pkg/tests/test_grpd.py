"""Tests for the homotopical checkers: filler certificates, fibrations,
boundary comparisons, path objects, factorizations, and the axiom audits."""

import pytest

from ngrpd.fincat import FinSetObj, FinSetsSite, FinMap, RefusedError
from ngrpd.gset import GFinSetsSite, GSet, cyclic_group
from ngrpd.grpd import (
    INF,
    classify_map,
    enumerate_simplicial_morphisms,
    enumerate_simplicial_objects,
    is_fibration,
    is_hypercover,
    is_n_groupoid,
    is_weak_equivalence,
    mapping_path_factorization,
    normalize_degree,
    path_object,
    product_object,
    pullback_object,
    simplicial_isomorphism,
    terminal_constant,
    terminal_morphism,
    verify_cfo_axioms,
    verify_exact_functor,
)
from ngrpd.simp import (
    SimplicialMorphism,
    cech_nerve,
    compose_morphisms,
    constant_object,
    constant_objects_morphism,
    extend_by_fillers,
    group_nerve,
    identity_morphism,
    standard_simplex,
    truncate,
)

SITE = FinSetsSite()
Z2 = cyclic_group(2)
Z3 = cyclic_group(3)


def fold_map():
    A = FinSetObj(["a1", "a2", "b1"])
    B = FinSetObj(["x", "y"])
    return SITE.morphism_from_mapping(A, B, {"a1": "x", "a2": "x", "b1": "y"})


def interval_nerve(N=2):
    """The order-complex of 0 < 1: a valid complex that fails horn filling."""
    shape = standard_simplex(1, N)
    levels = {m: FinSetObj(shape.cells(m)) for m in range(N + 1)}
    d = {
        key: SITE.morphism_from_mapping(levels[key[0]], levels[key[0] - 1], mapping)
        for key, mapping in shape.d.items()
    }
    s = {
        key: SITE.morphism_from_mapping(levels[key[0]], levels[key[0] + 1], mapping)
        for key, mapping in shape.s.items()
    }
    from ngrpd.simp import TruncatedSimplicialObject

    return TruncatedSimplicialObject(SITE, N, levels, d, s)


def empty_object(N=2):
    return constant_object(SITE, FinSetObj([]), N)


class TestGroupoidCertificates:
    def test_terminal_is_groupoid_every_degree(self):
        T = terminal_constant(SITE, 2)
        for n in (0, 1, "inf"):
            assert is_n_groupoid(T, n).ok

    def test_nerve_is_one_groupoid_not_zero(self):
        X = group_nerve(SITE, Z2, 3)
        assert is_n_groupoid(X, 1).ok
        cert0 = is_n_groupoid(X, 0)
        assert not cert0.ok
        bad = cert0.failures[0]
        assert (bad.k, bad.i) == (1, 0) and bad.cover and bad.iso is False

    def test_trivial_group_nerve_is_zero_groupoid(self):
        X = group_nerve(SITE, cyclic_group(1), 3)
        assert is_n_groupoid(X, 0).ok

    def test_cech_nerve_degrees(self):
        # A non-injective cover's iterated-fiber-power object has strictly more
        # edges than vertices, so the level-1 horn restrictions are covers but
        # not isomorphisms: it certifies at degree 1, not 0.
        X, _ = cech_nerve(SITE, fold_map(), 2)
        assert is_n_groupoid(X, 1).ok
        cert0 = is_n_groupoid(X, 0)
        assert not cert0.ok
        assert all(f.k == 1 and f.cover and f.iso is False for f in cert0.failures)
        # For an injective map the fiber powers collapse and degree 0 holds.
        A = FinSetObj(["p", "q"])
        Xid, _ = cech_nerve(SITE, SITE.identity(A), 2)
        assert is_n_groupoid(Xid, 0).ok

    def test_monotone_in_degree(self):
        X = group_nerve(SITE, Z2, 3)
        assert is_n_groupoid(X, 1).ok
        assert is_n_groupoid(X, 2).ok
        assert is_n_groupoid(X, INF).ok

    def test_shallow_truncation_refused(self):
        X = group_nerve(SITE, Z2, 1)
        with pytest.raises(RefusedError):
            is_n_groupoid(X, 1)

    def test_interval_nerve_not_groupoid(self):
        cert = is_n_groupoid(interval_nerve(), 1)
        assert not cert.ok
        assert any((f.k, f.i) == (2, 0) for f in cert.failures)

    def test_empty_object_is_groupoid(self):
        assert is_n_groupoid(empty_object(), 0).ok

    def test_degree_normalization(self):
        assert normalize_degree("inf") == INF
        assert normalize_degree("3") == 3
        with pytest.raises(ValueError):
            normalize_degree(-1)


class TestFibrations:
    def test_map_to_terminal_iff_groupoid(self):
        good = group_nerve(SITE, Z2, 3)
        assert is_fibration(terminal_morphism(good)).ok
        bad = interval_nerve()
        rep = is_fibration(terminal_morphism(bad))
        assert not rep.ok
        assert any((f.k, f.i) == (2, 0) for f in rep.failures)

    def test_identity_is_fibration(self):
        X, _ = cech_nerve(SITE, fold_map(), 2)
        assert is_fibration(identity_morphism(X)).ok

    def test_nerve_quotient_is_fibration(self):
        from ngrpd.simp import group_nerve_morphism

        f = group_nerve_morphism(
            SITE, {"0": "0", "1": "0"}, Z2, cyclic_group(1), 3
        )
        assert is_fibration(f).ok

    def test_point_into_nerve_is_not_fibration(self):
        Y = group_nerve(SITE, Z2, 2)
        T = terminal_constant(SITE, 2)
        comps = {m: SITE.morphism_from_mapping(T.levels[m], Y.levels[m], {"*": y})
                 for m, y in {0: "()", 1: "(0)", 2: "(0,0)"}.items()}
        f = SimplicialMorphism(T, Y, comps)
        rep = is_fibration(f)
        assert not rep.ok


class TestHypercovers:
    def test_identity_always(self):
        X = group_nerve(SITE, Z2, 2)
        for n in (0, 1, "inf"):
            assert is_hypercover(identity_morphism(X), n).ok

    def test_cech_augmentation(self):
        _, aug = cech_nerve(SITE, fold_map(), 2)
        assert is_hypercover(aug, "inf").ok
        assert is_hypercover(aug, 1).ok
        rep0 = is_hypercover(aug, 0)
        assert not rep0.ok
        assert rep0.instances[0].cover and rep0.instances[0].iso is False

    def test_nerve_to_point_fails_at_level_two(self):
        X = group_nerve(SITE, Z2, 2)
        rep = is_hypercover(terminal_morphism(X), "inf")
        assert not rep.ok
        by_level = {inst.k: inst for inst in rep.instances}
        assert by_level[0].cover and by_level[1].cover
        assert not by_level[2].cover

    def test_frozen_boundary_sizes(self):
        from ngrpd.simp import boundary_matching_map

        X = group_nerve(SITE, Z2, 2)
        mu2 = boundary_matching_map(2, terminal_morphism(X))
        assert len(SITE.elements(mu2.source)) == 4
        assert len(SITE.elements(mu2.target)) == 8

    def test_max_level_restriction(self):
        X = group_nerve(SITE, Z2, 2)
        rep = is_hypercover(terminal_morphism(X), "inf", max_level=1)
        assert rep.ok and rep.verified_levels == [0, 1]


class TestPathObjects:
    def test_degree_zero_is_input(self):
        Y = group_nerve(SITE, Z2, 2)
        po = path_object(Y, 0)
        assert po.obj is Y

    def test_terminal_paths_stay_terminal(self):
        po = path_object(terminal_constant(SITE, 2), 1)
        assert po.obj.level_sizes() == [1, 1]

    def test_nerve_path_sizes(self):
        po = path_object(group_nerve(SITE, Z2, 2), 1)
        assert po.obj.level_sizes() == [2, 8]

    def test_truncation_guard(self):
        with pytest.raises(RefusedError):
            path_object(terminal_constant(SITE, 0), 1)

    def test_evaluations_are_endpoints(self):
        Y, _ = cech_nerve(SITE, fold_map(), 2)
        po = path_object(Y, 1)
        S = standard_simplex(1, 2)
        from ngrpd.simp import OrdinalMap, evaluation_map, hom_into, product_simplex

        # Identify paths with edges through the one-simplex evaluation, then
        # endpoint evaluations must match the two edge faces.
        hom_edges = hom_into(product_simplex(0, 1, 2), Y)
        ev = None
        for m, cell in product_simplex(0, 1, 2).generating_cells():
            ev = evaluation_map(hom_edges, product_simplex(0, 1, 2), m, cell, Y)
        assert ev is not None and ev.target == Y.levels[1]
        lhs = SITE.compose(Y.d[(1, 1)], ev)
        assert SITE.morphisms_equal(po.source_eval.components[0], lhs)
        rhs = SITE.compose(Y.d[(1, 0)], ev)
        assert SITE.morphisms_equal(po.target_eval.components[0], rhs)

    def test_constant_paths_section(self):
        Y = group_nerve(SITE, Z2, 3)
        po = path_object(Y, 1)
        Yt = truncate(Y, 2)
        for end_eval in (po.source_eval, po.target_eval):
            comp = {
                m: SITE.compose(end_eval.components[m], po.const_section.components[m])
                for m in range(3)
            }
            assert all(SITE.is_identity(comp[m]) for m in range(3))


class TestFactorization:
    def test_identity_gives_trivial_fibration(self):
        Y = group_nerve(SITE, Z2, 3)
        fact = mapping_path_factorization(identity_morphism(Y))
        assert fact.composite_ok
        assert fact.q_report.ok
        assert fact.r_weak_equivalence is True
        assert is_weak_equivalence(fact.q)
        po = path_object(Y, 1)
        assert fact.path.obj.level_sizes() == po.obj.level_sizes()

    def test_nerve_to_point(self):
        Y = group_nerve(SITE, Z2, 3)
        f = terminal_morphism(Y)
        fact = mapping_path_factorization(f)
        assert fact.composite_ok and fact.q_report.ok and fact.r_weak_equivalence
        assert not is_weak_equivalence(f)

    def test_empty_to_point(self):
        f = terminal_morphism(empty_object(3))
        fact = mapping_path_factorization(f)
        assert fact.path.obj.level_sizes() == [0, 0, 0]
        assert fact.q_report.ok
        rep = is_hypercover(fact.q, "inf")
        assert not rep.ok and not rep.instances[0].cover
        assert not is_weak_equivalence(f)

    def test_cech_augmentation_is_weak_equivalence(self):
        _, aug = cech_nerve(SITE, fold_map(), 2)
        assert is_weak_equivalence(aug)

    def test_truncation_guards(self):
        Y = group_nerve(SITE, Z2, 1)
        with pytest.raises(RefusedError):
            is_weak_equivalence(identity_morphism(Y))
        with pytest.raises(RefusedError):
            mapping_path_factorization(identity_morphism(truncate(Y, 0)))

    def test_classification_coherence(self):
        _, aug = cech_nerve(SITE, fold_map(), 2)
        cls = classify_map(aug)
        assert cls.is_fibration and cls.is_hypercover
        assert cls.is_weak_equivalence and cls.is_trivial_fibration
        # The loop obstruction of the nerve-to-point map sits at level 2 of
        # the factorized map, so truncation 3 is needed to observe it.
        cls2 = classify_map(terminal_morphism(group_nerve(SITE, Z2, 3)))
        assert cls2.is_fibration and not cls2.is_hypercover
        assert cls2.is_weak_equivalence is False
        assert cls2.is_trivial_fibration is False
        # At truncation 2 the verified range stops at level 1 and the same
        # map is (honestly) reported as a weak equivalence on that range.
        cls3 = classify_map(terminal_morphism(group_nerve(SITE, Z2, 2)))
        assert cls3.is_weak_equivalence is True and cls3.weak_equivalence_range == 1


class TestPullbacks:
    def test_product_of_nerves(self):
        X = group_nerve(SITE, Z2, 2)
        Y = group_nerve(SITE, Z3, 2)
        prod = product_object(X, Y)
        assert prod.obj.level_sizes() == [1, 6, 36]
        assert is_fibration(prod.pr1).ok and is_fibration(prod.pr2).ok

    def test_pullback_of_identity(self):
        X = group_nerve(SITE, Z2, 2)
        pb = pullback_object(identity_morphism(X), identity_morphism(X))
        assert pb.obj.level_sizes() == X.level_sizes()
        assert simplicial_isomorphism(pb.obj, X) is not None

    def test_mediate_builds_simplicial_morphism(self):
        X = group_nerve(SITE, Z2, 2)
        prod = product_object(X, X)
        diag = prod.mediate(identity_morphism(X), identity_morphism(X))
        assert diag.source == X and diag.target == prod.obj
        for m in range(3):
            assert SITE.morphisms_equal(
                SITE.compose(prod.pr1.components[m], diag.components[m]),
                SITE.identity(X.levels[m]),
            )

    def test_mismatched_targets_rejected(self):
        X = group_nerve(SITE, Z2, 2)
        Y = group_nerve(SITE, Z3, 2)
        with pytest.raises(ValueError):
            pullback_object(identity_morphism(X), identity_morphism(Y))


class TestEnumeration:
    def test_morphism_counts_between_nerves(self):
        BZ2 = group_nerve(SITE, Z2, 2)
        BZ3 = group_nerve(SITE, Z3, 2)
        assert len(enumerate_simplicial_morphisms(BZ2, BZ2)) == 2
        assert len(enumerate_simplicial_morphisms(BZ3, BZ3)) == 3
        assert len(enumerate_simplicial_morphisms(BZ2, BZ3)) == 1
        cech, _ = cech_nerve(SITE, fold_map(), 2)
        assert len(enumerate_simplicial_morphisms(cech, BZ2)) == 2

    def test_isomorphism_search(self):
        BZ2 = group_nerve(SITE, Z2, 2)
        assert simplicial_isomorphism(BZ2, BZ2) is not None
        assert simplicial_isomorphism(BZ2, constant_object(SITE, FinSetObj(["u", "v"]), 2)) is None

    def test_object_enumeration_small(self):
        carriers = [FinSetObj([f"x{i}" for i in range(sz)]) for sz in (1, 2)]
        labeled = enumerate_simplicial_objects(SITE, 1, carriers, up_to_iso=False)
        assert len(labeled) == 5
        classes = enumerate_simplicial_objects(SITE, 1, carriers, up_to_iso=True)
        assert len(classes) == 3

    def test_equivariant_morphism_enumeration_respects_action(self):
        gsite = GFinSetsSite(Z2)
        regular = GSet(Z2, ["e0", "e1"], {"0": {"e0": "e0", "e1": "e1"}, "1": {"e0": "e1", "e1": "e0"}})
        X = constant_object(gsite, regular, 1)
        mors = enumerate_simplicial_morphisms(X, X)
        assert len(mors) == 2  # the two equivariant self-maps of the regular orbit


class TestExtension:
    def test_nerve_extension_matches_full_nerve(self):
        X2 = truncate(group_nerve(SITE, Z2, 3), 2)
        ext = extend_by_fillers(X2, 1, 3)
        assert ext.level_sizes() == [1, 2, 4, 8]
        assert simplicial_isomorphism(ext, group_nerve(SITE, Z2, 3)) is not None
        assert is_n_groupoid(ext, 1).ok

    def test_first_and_last_filler_agree(self):
        X2 = truncate(group_nerve(SITE, Z3, 3), 2)
        first = extend_by_fillers(X2, 1, 3, filler_index="first")
        last = extend_by_fillers(X2, 1, 3, filler_index="last")
        assert first.level_sizes() == last.level_sizes() == [1, 3, 9, 27]
        assert simplicial_isomorphism(first, last) is not None

    def test_extension_at_same_level_is_identity(self):
        X = group_nerve(SITE, Z2, 2)
        assert extend_by_fillers(X, 1, 2) is X

    def test_terminal_extension_stays_terminal(self):
        T = terminal_constant(SITE, 1)
        ext = extend_by_fillers(T, 0, 3)
        assert ext.level_sizes() == [1, 1, 1, 1]

    def test_fiber_power_extension(self):
        X, _ = cech_nerve(SITE, fold_map(), 2)
        ext = extend_by_fillers(X, 1, 3)
        assert ext.level_sizes() == [3, 5, 9, 17]
        assert is_n_groupoid(ext, 1).ok

    def test_uncertified_input_refused(self):
        with pytest.raises(RefusedError):
            extend_by_fillers(interval_nerve(), 1, 3)

    def test_bad_filler_index_rejected(self):
        X = group_nerve(SITE, Z2, 2)
        with pytest.raises(ValueError):
            extend_by_fillers(X, 1, 3, filler_index="middle")


def collapse_to_unit(X, B):
    """The morphism sending every cell of X to the fully degenerate cell of B."""
    unit = {0: B.levels[0].elements[0]}
    for m in range(B.N):
        unit[m + 1] = B.s[(m, 0)].mapping[unit[m]]
    comps = {
        m: SITE.morphism_from_mapping(
            X.levels[m], B.levels[m], {x: unit[m] for x in X.levels[m].elements}
        )
        for m in range(X.N + 1)
    }
    return SimplicialMorphism(X, B, comps)


class TestAudits:
    def test_axiom_audit_passes_on_small_sample(self):
        pt = terminal_constant(SITE, 2)
        b2 = group_nerve(SITE, Z2, 2)
        report = verify_cfo_axioms(SITE, [("pt", pt), ("b2", b2)], n=1)
        assert report["sample_certified"] is True
        for axiom in ("F1", "F2", "F3", "F4"):
            assert report[axiom]["ok"] is True, report[axiom]
        assert report["ok"] is True
        assert report["morphism_count"] == 5
        # every dual-route comparison in F3 agrees
        assert all(e["routes_agree"] for e in report["F3"]["instances"])

    def test_axiom_audit_flags_horn_filling_failure(self):
        report = verify_cfo_axioms(SITE, [("interval", interval_nerve(2))], n=1)
        assert report["sample_certified"] is False
        assert report["F1"]["ok"] is False
        assert report["ok"] is False

    def test_identity_functor_is_exact(self):
        pt = terminal_constant(SITE, 2)
        b2 = group_nerve(SITE, Z2, 2)
        report = verify_exact_functor(
            lambda X: X,
            lambda f: f,
            SITE,
            SITE,
            [("pt", pt), ("b2", b2)],
            name="identity",
        )
        assert report["ok"] is True
        kinds = {c["check"] for c in report["checks"]}
        assert {"terminal", "fibration", "weak_equivalence", "pullback_square", "product"} <= kinds

    def test_broken_functor_reports_fibration_witness(self):
        b2 = group_nerve(SITE, Z2, 2)
        prod = product_object(b2, b2)
        pr1 = prod.pr1
        crush = collapse_to_unit(prod.obj, b2)
        assert is_fibration(pr1).ok
        assert not is_fibration(crush).ok

        def on_morphism(mor):
            return crush if mor == pr1 else mor

        report = verify_exact_functor(
            lambda X: X,
            on_morphism,
            SITE,
            SITE,
            [("prod", prod.obj), ("b2", b2)],
            morphisms=[("pr1", pr1)],
            name="broken",
        )
        assert report["ok"] is False
        bad = [c for c in report["checks"] if c["check"] == "fibration" and not c["ok"]]
        assert bad and bad[0]["morphism"] == "pr1"
        witness = bad[0]["witness"]
        assert witness["k"] == 1 and witness["i"] in (0, 1)

    def test_functoriality_violation_raises(self):
        b2 = group_nerve(SITE, Z2, 2)
        crush = collapse_to_unit(b2, b2)

        def on_morphism(mor):
            return crush  # breaks identity preservation

        with pytest.raises(ValueError):
            verify_exact_functor(
                lambda X: X, on_morphism, SITE, SITE, [("b2", b2)], morphisms=[]
            )

    def test_path_pullback_agrees_with_swapped_evaluation(self):
        # The middle object of the factorization is built against the 0-end
        # evaluation; rebuilding it against the 1-end evaluation gives an
        # isomorphic object whose other-end evaluation is again a fibration.
        b3 = group_nerve(SITE, Z2, 3)
        unit3 = collapse_to_unit(terminal_constant(SITE, 3), b3)
        fact = mapping_path_factorization(unit3)
        assert fact.ok

        paths = path_object(b3, 1)
        unit2 = collapse_to_unit(terminal_constant(SITE, 2), truncate(b3, 2))
        swapped = pullback_object(unit2, paths.target_eval)
        assert simplicial_isomorphism(fact.path.obj, swapped.obj) is not None
        other_eval = compose_morphisms(paths.source_eval, swapped.pr2)
        assert is_fibration(other_eval).ok
