"""Normalization, trigram distance and building-number distance."""

import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_string_distance
from histogeocode import text as textmod
from histogeocode.text import (
    AbbreviationTableError,
    building_number_distance,
    load_abbreviations,
    normalize,
    string_distance,
    trigram_set,
)

FRENCH_CORPUS = [
    "12 r. du Temple, Paris",
    "12 Rue de l'Épée",
    "3 Bd Saint-Germain",
    "10 boul. de Sébastopol",
    "1 Pl. de la Concorde",
    "45 av. des Champs-Élysées",
    "7 fg Saint-Antoine",
    "faub. Montmartre 22",
    "12 bis rue du Château d'Eau",
    "QUAI D'ORSAY",
    "Tour Eiffel, Paris",
    "st denis",
    "Ste Geneviève",
    "5, rue   de    Rivoli ",
]


class TestNormalize:
    def test_abbreviations_and_number(self):
        na = normalize("12 r. du Temple, Paris")
        assert na.normalized == "12 rue du temple paris"
        assert na.building_number == 12

    def test_accent_folding_and_apostrophe(self):
        na = normalize("12 Rue de l'Épée")
        assert na.normalized == "12 rue de l epee"
        assert na.building_number == 12

    def test_empty(self):
        assert normalize("") == textmod.NormalizedAddress("", None)

    def test_no_leading_number(self):
        assert normalize("rue de 1850").building_number is None

    def test_bis_suffix_keeps_number(self):
        na = normalize("12 bis rue du Temple")
        assert na.building_number == 12
        assert "bis" in na.normalized

    def test_hyphen_kept(self):
        assert "saint-germain" in normalize("Bd Saint-Germain").normalized

    def test_default_table_entries(self):
        assert normalize("bd X").normalized == "boulevard x"
        assert normalize("boul. X").normalized == "boulevard x"
        assert normalize("av. X").normalized == "avenue x"
        assert normalize("pl. X").normalized == "place x"
        assert normalize("st X").normalized == "saint x"
        assert normalize("ste X").normalized == "sainte x"
        assert normalize("fg X").normalized == "faubourg x"
        assert normalize("faub. X").normalized == "faubourg x"

    def test_idempotent_on_corpus(self):
        for raw in FRENCH_CORPUS:
            once = normalize(raw)
            twice = normalize(once.normalized)
            assert twice.normalized == once.normalized
            assert twice.building_number == once.building_number

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=40))
    def test_idempotent_random(self, raw):
        once = normalize(raw).normalized
        assert normalize(once).normalized == once

    def test_idempotent_large_random_corpus(self, rng):
        alphabet = string.ascii_letters + string.digits + " .,'-éàçèÉÀ\"()/"
        for _ in range(10_000):
            n = int(rng.integers(0, 30))
            raw = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), n))
            once = normalize(raw).normalized
            assert normalize(once).normalized == once

    def test_custom_table_from_file(self, tmp_path):
        path = tmp_path / "abbrev.cfg"
        path.write_text("# comment\nr.=rue\nimp=impasse\n", encoding="utf-8")
        table = load_abbreviations(path)
        assert normalize("3 imp des Lilas", table).normalized == "3 impasse des lilas"

    def test_table_rejects_chained_expansion(self, tmp_path):
        path = tmp_path / "abbrev.cfg"
        path.write_text("a=b\nb=c\n", encoding="utf-8")
        with pytest.raises(AbbreviationTableError):
            load_abbreviations(path)


class TestTrigramSet:
    def test_rue(self):
        assert trigram_set("rue") == {"  r", " ru", "rue", "ue "}

    def test_empty(self):
        assert trigram_set("") == frozenset()

    def test_two_char_word(self):
        assert trigram_set("ab") == {"  a", " ab", "ab "}

    def test_digits_included(self):
        assert trigram_set("12") == {"  1", " 12", "12 "}

    def test_union_over_words(self):
        assert trigram_set("rue ab") == trigram_set("rue") | trigram_set("ab")


class TestStringDistance:
    def test_identical(self):
        assert string_distance("rue du temple", "rue du temple") == 0.0

    def test_rue_rua(self):
        assert string_distance("rue", "rua") == pytest.approx(1 - 2 / 6)

    def test_empty_cases(self):
        assert string_distance("", "") == 0.0
        assert string_distance("rue", "") == 1.0
        assert string_distance("", "rue") == 1.0

    def test_ordering_claim(self):
        query = normalize("12 rue du temple").normalized
        near = normalize("10 r. du temple").normalized
        far = normalize("12 rue de la paix").normalized
        assert string_distance(query, near) < string_distance(query, far)

    def test_matches_oracle_exactly(self, rng):
        alphabet = string.ascii_lowercase + string.digits + "  .,-'"
        for _ in range(1000):
            n1, n2 = rng.integers(0, 25, 2)
            s1 = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), n1))
            s2 = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), n2))
            assert string_distance(s1, s2) == oracle_string_distance(s1, s2)

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=30), st.text(max_size=30))
    def test_symmetric_and_bounded(self, s1, s2):
        d = string_distance(s1, s2)
        assert 0.0 <= d <= 1.0
        assert d == string_distance(s2, s1)
        if trigram_set(s1) == trigram_set(s2):
            assert d == 0.0
        else:
            assert d > 0.0


class TestBuildingNumberDistance:
    def test_same_parity(self):
        assert building_number_distance(12, 10) == 2

    def test_different_parity(self):
        assert building_number_distance(12, 13) == 11

    def test_identity(self):
        assert building_number_distance(7, 7) == 0

    def test_symmetric(self, rng):
        for _ in range(100):
            a, b = (int(v) for v in rng.integers(0, 300, 2))
            assert building_number_distance(a, b) == building_number_distance(b, a)
            assert building_number_distance(a, a) == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            building_number_distance(-1, 2)
