"""Catalog integrity: load-time validation, registry, JSON export."""

from __future__ import annotations

import pytest

from heavenly.catalog import (ENTRY_IDS, UnknownEquationError, base_k,
                              catalog_json, entry_to_json, get_entry,
                              validate_all)


class TestRegistry:
    def test_all_entries_load(self):
        assert len(ENTRY_IDS) == 11
        for eid in ENTRY_IDS:
            assert get_entry(eid).id == eid

    def test_unknown_id(self):
        with pytest.raises(UnknownEquationError):
            get_entry("nope")

    def test_k_on_non_family_rejected(self):
        with pytest.raises(ValueError):
            get_entry("einstein_weyl", k=2)

    def test_base_k(self):
        assert base_k("pleb1") == 1
        assert base_k("monge") == 2

    def test_family_base_instantiation_identical(self):
        for eid in ("pleb1", "mod_pleb", "husain", "monge"):
            assert entry_to_json(get_entry(eid, base_k(eid))) \
                == entry_to_json(get_entry(eid))


class TestValidation:
    def test_catalog_is_internally_consistent(self):
        """Recipes reproduce the stored generators, closedness expectations
        hold, every symbol is declared, and the scalar reduction agrees
        with its parent system."""
        assert validate_all() == []


class TestJson:
    def test_entry_shape(self):
        data = entry_to_json(get_entry("einstein_weyl"))
        for key in ("id", "name", "n", "dependents", "seed", "casimirs",
                    "generators", "pde", "backend"):
            assert key in data
        assert data["seed_closed_expected"] is False

    def test_catalog_export_covers_all(self):
        data = catalog_json()
        assert [e["id"] for e in data] == list(ENTRY_IDS)


class TestCasimirAccess:
    def test_unclaimed_threshold_is_an_error(self):
        entry = get_entry("mod_einstein_weyl")
        with pytest.raises(ValueError):
            entry.verify_casimir(0)

    def test_claimed_thresholds_pass(self):
        entry = get_entry("conformal1")
        for i in range(len(entry.casimirs)):
            assert entry.verify_casimir(i).status == "PASS"


class TestPdePolynomials:
    def test_rule_polynomials_reduce_to_zero(self):
        entry = get_entry("dkp")
        for _, p in entry.pde_polynomials():
            assert entry.system.reduce(p).is_zero()

    def test_generator_entries_included(self):
        entry = get_entry("pleb1")
        labels = [label for label, _ in entry.pde_polynomials()]
        assert any(label.startswith("generator") for label in labels)

    def test_pole_alphabet(self):
        assert get_entry("husain").pole_alphabet()
        assert not get_entry("einstein_weyl").pole_alphabet()
