"""Finite-set engine: limits, covers, effective epis, and the axiom audit.

Oracles here are independent brute-force constructions (pair enumeration for
pullbacks, image tests for surjectivity, orbit closure for coequalizers) so the
site methods are checked against a second route, not against themselves.
"""

import itertools

import pytest

from ngrpd.fincat import (
    FinMap,
    FinSetObj,
    FinSetsSite,
    Probe,
    RefusedError,
    audit_site_axioms,
    finsets_probe,
    max_cells,
    pair_label,
    solve_sections,
)


SITE = FinSetsSite()


def mk(labels):
    return FinSetObj(labels)


def all_sets(max_size):
    pool = ["a", "b", "c", "d"]
    return [mk(pool[:k]) for k in range(1, max_size + 1)]


class TestObjectsAndMaps:
    def test_labels_sorted_and_distinct(self):
        assert mk(["b", "a"]).elements == ("a", "b")
        with pytest.raises(ValueError):
            FinSetObj(["a", "a"])

    def test_map_must_be_total_and_land_in_target(self):
        A, B = mk(["a", "b"]), mk(["x"])
        with pytest.raises(ValueError):
            FinMap(A, B, {"a": "x"})
        with pytest.raises(ValueError):
            FinMap(A, B, {"a": "x", "b": "y"})

    def test_compose_applies_first_argument_last(self):
        A, B, C = mk(["a"]), mk(["x", "y"]), mk(["p", "q"])
        f = FinMap(A, B, {"a": "y"})
        g = FinMap(B, C, {"x": "p", "y": "q"})
        assert SITE.compose(g, f).mapping == {"a": "q"}

    def test_identity_and_iso(self):
        A = mk(["a", "b"])
        ident = SITE.identity(A)
        assert SITE.is_identity(ident) and SITE.is_iso(ident)
        swap = FinMap(A, A, {"a": "b", "b": "a"})
        assert SITE.is_iso(swap)
        assert SITE.morphisms_equal(SITE.compose(swap, SITE.inverse(swap)), ident)

    def test_all_morphisms_count_and_determinism(self):
        A, B = mk(["a", "b"]), mk(["x", "y", "z"])
        mors = SITE.all_morphisms(A, B)
        assert len(mors) == 9
        assert mors == SITE.all_morphisms(A, B)

    def test_no_maps_from_nonempty_to_empty(self):
        assert SITE.all_morphisms(mk(["a"]), mk([])) == []
        assert len(SITE.all_morphisms(mk([]), mk(["a"]))) == 1


class TestCovers:
    def test_surjective_selector(self):
        A, B = mk(["a", "b"]), mk(["x"])
        assert SITE.is_cover(FinMap(A, B, {"a": "x", "b": "x"}))
        C = mk(["x", "y"])
        assert not SITE.is_cover(FinMap(A, C, {"a": "x", "b": "x"}))

    def test_injective_selector_is_the_corrupted_class(self):
        bad = FinSetsSite(covers="injective")
        A, B = mk(["a"]), mk(["x", "y"])
        inj = FinMap(A, B, {"a": "x"})
        assert bad.is_cover(inj) and not SITE.is_cover(inj)

    def test_terminal_map_always_covers(self):
        for A in all_sets(3):
            assert SITE.is_cover(SITE.terminal_map(A))


class TestPullback:
    def brute_pairs(self, f, g):
        return {
            (a, b)
            for a in f.source.elements
            for b in g.source.elements
            if f.mapping[a] == g.mapping[b]
        }

    def test_apex_matches_brute_force_on_all_cospans_size_le_3(self):
        sets = all_sets(3)
        for A, B, C in itertools.product(sets, repeat=3):
            for f in SITE.all_morphisms(A, C):
                for g in SITE.all_morphisms(B, C):
                    pb = SITE.pullback(f, g)
                    assert set(pb.pairs.values()) == self.brute_pairs(f, g)
                    assert pb.square_commutes()
                    assert pb.pairs_bijective()

    def test_universal_property_exhaustive_on_small_cospans(self):
        sets = all_sets(2)
        for A, B, C, S in itertools.product(sets, repeat=4):
            for f in SITE.all_morphisms(A, C):
                for g in SITE.all_morphisms(B, C):
                    pb = SITE.pullback(f, g)
                    cones = [
                        (h1, h2)
                        for h1 in SITE.all_morphisms(S, A)
                        for h2 in SITE.all_morphisms(S, B)
                        if SITE.morphisms_equal(SITE.compose(f, h1), SITE.compose(g, h2))
                    ]
                    result = pb.verify_cones(cones)
                    assert result["ok"], result

    def test_mediate_rejects_noncommuting_cone(self):
        A = mk(["a"])
        C = mk(["x", "y"])
        f = FinMap(A, C, {"a": "x"})
        g = FinMap(A, C, {"a": "y"})
        pb = SITE.pullback(f, g)
        with pytest.raises(ValueError):
            pb.mediate(SITE.identity(A), SITE.identity(A))

    def test_pair_labels_are_canonical(self):
        A = mk(["a"])
        C = mk(["x"])
        f = FinMap(A, C, {"a": "x"})
        pb = SITE.pullback(f, f)
        assert pb.apex.elements == (pair_label("a", "a"),)


class TestEqualizerCoequalizer:
    def test_equalizer_is_agreement_subset(self):
        A, B = mk(["a", "b", "c"]), mk(["x", "y"])
        f = FinMap(A, B, {"a": "x", "b": "x", "c": "y"})
        g = FinMap(A, B, {"a": "x", "b": "y", "c": "y"})
        sub, inc = SITE.equalizer(f, g)
        assert sub.elements == ("a", "c")
        assert SITE.morphisms_equal(SITE.compose(f, inc), SITE.compose(g, inc))

    def test_coequalizer_matches_orbit_closure(self):
        A, B = mk(["a", "b"]), mk(["x", "y", "z"])
        f = FinMap(A, B, {"a": "x", "b": "y"})
        g = FinMap(A, B, {"a": "y", "b": "z"})
        q, proj = SITE.coequalizer(f, g)
        # Brute force: x~y and y~z, so one class {x,y,z}.
        assert len(q) == 1
        assert SITE.morphisms_equal(SITE.compose(proj, f), SITE.compose(proj, g))

    def test_coequalizer_of_identity_pair_is_iso(self):
        A = mk(["a", "b"])
        ident = SITE.identity(A)
        q, proj = SITE.coequalizer(ident, ident)
        assert SITE.is_iso(proj)


class TestEffectiveEpi:
    def brute_effective(self, f):
        # A surjection onto its image is effective iff it is surjective:
        # the kernel-pair coequalizer is the image of f.
        return set(f.mapping.values()) == set(f.target.elements)

    def test_agrees_with_image_oracle_on_all_maps_le_3(self):
        sets = all_sets(3)
        for A, B in itertools.product(sets, repeat=2):
            for f in SITE.all_morphisms(A, B):
                ok, _ = SITE.is_effective_epi(f)
                assert ok == self.brute_effective(f)

    def test_cover_implies_effective_epi_le_4(self):
        sets = all_sets(4)
        for A, B in itertools.product(sets, repeat=2):
            for f in SITE.all_morphisms(A, B):
                if SITE.is_cover(f):
                    ok, _ = SITE.is_effective_epi(f)
                    assert ok

    def test_injective_noncover_fails_c4_route(self):
        bad = FinSetsSite(covers="injective")
        A, B = mk(["x"]), mk(["c", "d"])
        f = FinMap(A, B, {"x": "c"})
        assert bad.is_cover(f)
        ok, witness = bad.is_effective_epi(f)
        assert not ok
        assert witness["comparison_iso"] is False


class TestAudit:
    def test_finsets_probe_le_3_all_pass(self):
        report = audit_site_axioms(SITE, finsets_probe(3))
        assert report["ok"]
        for axiom in ("C1", "C2", "C3", "C4"):
            assert report["counts"][axiom]["checked"] > 0
            assert report["counts"][axiom]["failed"] == 0

    def test_empty_probe_vacuous_pass(self):
        report = audit_site_axioms(SITE, Probe([], [], name="empty"))
        assert report["ok"]
        assert report["instances"] == []

    def test_corrupted_covers_fail_with_c4_witness(self):
        bad = FinSetsSite(covers="injective")
        report = audit_site_axioms(bad, finsets_probe(2, covers="injective"))
        assert not report["ok"]
        c4_failures = [
            rec for rec in report["instances"] if rec["axiom"] == "C4" and not rec["ok"]
        ]
        assert c4_failures
        witness = c4_failures[0]["witness"]
        assert witness["comparison_iso"] is False
        assert "morphism" in witness

    def test_audit_is_deterministic(self):
        a = audit_site_axioms(SITE, finsets_probe(3))
        b = audit_site_axioms(SITE, finsets_probe(3))
        assert a == b


class TestSectionSolver:
    def test_linear_chain_propagates(self):
        cells = ["u", "v"]
        arrows = [("u", "v", {"0": "x", "1": "y"})]
        sols = solve_sections(cells, ["u"], {"u": ("0", "1")}, arrows)
        assert sols == [{"u": "0", "v": "x"}, {"u": "1", "v": "y"}]

    def test_conflicting_arrows_eliminate_sections(self):
        cells = ["u", "v"]
        arrows = [
            ("u", "v", {"0": "x", "1": "y"}),
            ("u", "v", {"0": "y", "1": "y"}),
        ]
        sols = solve_sections(cells, ["u"], {"u": ("0", "1")}, arrows)
        assert sols == [{"u": "1", "v": "y"}]

    def test_unreachable_cell_is_an_error(self):
        with pytest.raises(AssertionError):
            solve_sections(["u", "w"], ["u"], {"u": ("0",)}, [])

    def test_limit_sections_product_shape(self):
        A = mk(["0", "1"])
        res = SITE.limit_sections(["u", "w"], ["u", "w"], {"u": A, "w": A}, [])
        assert len(res.obj) == 4
        assert "(0,1)" in res.obj.elements


class TestGuards:
    def test_max_cells_env_override(self, monkeypatch):
        monkeypatch.setenv("NGRPD_MAX_CELLS", "7")
        assert max_cells() == 7
        monkeypatch.setenv("NGRPD_MAX_CELLS", "not-a-number")
        assert max_cells() == 100000

    def test_morphism_enumeration_refuses_past_cap(self, monkeypatch):
        monkeypatch.setenv("NGRPD_MAX_CELLS", "10")
        A = mk(["a", "b", "c", "d"])
        with pytest.raises(RefusedError):
            SITE.all_morphisms(A, A)
