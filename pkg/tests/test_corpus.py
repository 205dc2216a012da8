from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dekompost.corpus import (
    AnnotatedCompound,
    BoundaryLabel,
    CompoundEntry,
    CorpusError,
    Lexicon,
    UnalignableError,
    align_entries,
    build_lexicon,
    dataset_stats,
    derive_boundary,
    parse_annotated_file,
    parse_split_file,
    partition,
    read_frequency_file,
    write_annotated_file,
    write_split_file,
)


def write(tmp_path, text, name="data.tsv", mode="w"):
    p = tmp_path / name
    if mode == "wb":
        p.write_bytes(text)
    else:
        p.write_text(text, encoding="utf-8")
    return p


class TestParseSplitFile:
    def test_basic_line(self, tmp_path):
        (e,) = parse_split_file(write(tmp_path, "Arbeitstag\tArbeit\tTag\n"))
        assert e == CompoundEntry("Arbeitstag", "Arbeit", "Tag")

    def test_ambiguous_modifier_yields_one_entry_per_reading(self, tmp_path):
        es = parse_split_file(write(tmp_path, "Laufschuhe\tlauf|Lauf\tSchuhe\n"))
        assert [e.modifier for e in es] == ["lauf", "Lauf"]
        assert {e.surface for e in es} == {"Laufschuhe"}

    def test_empty_file(self, tmp_path):
        assert parse_split_file(write(tmp_path, "")) == []

    def test_comments_blank_lines_and_frequency(self, tmp_path):
        es = parse_split_file(write(tmp_path, "# header\n\nFreitag\tfrei\tTag\t12\n"))
        assert es == [CompoundEntry("Freitag", "frei", "Tag", 12)]

    @pytest.mark.parametrize("line", ["Arbeitstag\tArbeit\n", "Arbeitstag\t\tTag\n", "a\tb\tc\td\te\n", "Tag\tx\ty\tzwei\n"])
    def test_malformed_line_reports_line_number(self, tmp_path, line):
        with pytest.raises(CorpusError) as exc:
            parse_split_file(write(tmp_path, "Freitag\tfrei\tTag\n" + line))
        assert exc.value.lineno == 2
        assert "line 2" in str(exc.value)

    def test_non_utf8_is_a_decode_error(self, tmp_path):
        with pytest.raises(UnicodeDecodeError):
            parse_split_file(write(tmp_path, "B\xfccher\tBuch\tx\n".encode("latin-1"), mode="wb"))

    def test_roundtrip(self, tmp_path):
        es = [CompoundEntry("Arbeitstag", "Arbeit", "Tag", 3), CompoundEntry("Bücherregal", "Buch", "Regal")]
        p = tmp_path / "out.tsv"
        write_split_file(es, p)
        assert parse_split_file(p) == es


class TestParseAnnotatedFile:
    def test_table_rows(self, tmp_path):
        items = parse_annotated_file(write(tmp_path, "65883\tJahrhundert\tJahr\tHundert\t0\n13519\tLebensmittel\tLeben\tMittel\t3\n"))
        assert items[0].entry.frequency == 65883 and items[0].category == 0
        assert items[1].surface == "Lebensmittel" and items[1].category == 3

    def test_category_out_of_range(self, tmp_path):
        with pytest.raises(CorpusError, match="category out of range, line 1"):
            parse_annotated_file(write(tmp_path, "1\tX\tY\tZ\t7\n"))

    def test_non_integer_category(self, tmp_path):
        with pytest.raises(CorpusError, match="line 1"):
            parse_annotated_file(write(tmp_path, "1\tXy\tY\tZ\tidiom\n"))

    def test_roundtrip(self, tmp_path):
        items = [AnnotatedCompound(CompoundEntry("Zeitpunkt", "Zeit", "Punkt", 40), 2)]
        p = tmp_path / "a.tsv"
        write_annotated_file(items, p)
        assert parse_annotated_file(p) == items


class TestDeriveBoundary:
    @pytest.mark.parametrize("entry, idx", [
        (("Arbeitstag", "Arbeit", "Tag"), 7),
        (("Tischtennis", "Tisch", "Tennis"), 5),
        (("Freitag", "frei", "Tag"), 4),
    ])
    def test_suffix_rule(self, entry, idx):
        b = derive_boundary(CompoundEntry(*entry))
        assert b.split_index == idx and b.rule == "suffix"

    def test_truncated_head(self):
        b = derive_boundary(CompoundEntry("Kirchturm", "Kirche", "Turme"))
        assert (b.split_index, b.rule) == (5, "strip")

    def test_umlaut_fallback(self):
        b = derive_boundary(CompoundEntry("Stadtbucherei", "Stadt", "Bücherei"))
        assert (b.split_index, b.rule) == (5, "deumlaut")

    def test_unalignable(self):
        with pytest.raises(UnalignableError) as exc:
            derive_boundary(CompoundEntry("Handschuh", "Hand", "Stiefel"))
        assert exc.value.surface == "Handschuh"

    def test_hyphen_boundary_is_legal(self):
        b = derive_boundary(CompoundEntry("Nacht-und-Nebel-Aktion", "Nacht-und-Nebel", "Aktion"))
        assert b.split_index == len("Nacht-und-Nebel-")

    def test_head_equal_to_surface_is_unalignable(self):
        with pytest.raises(UnalignableError):
            derive_boundary(CompoundEntry("Tag", "x", "Tag"))

    def test_align_entries_counts_drops(self):
        aligned, dropped = align_entries([CompoundEntry("Freitag", "frei", "Tag"), CompoundEntry("Handschuh", "Hand", "Fuß")])
        assert len(aligned) == 1 and [d.surface for d in dropped] == ["Handschuh"]

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyzäöüß", min_size=1, max_size=8),
           st.text(alphabet="abcdefghijklmnopqrstuvwxyzäöüß", min_size=1, max_size=8))
    def test_suffix_rule_invariant(self, left, head):
        surface = left.upper()[:1] + left[1:] + head
        if len(surface) != len(left) + len(head):
            return  # 'ß'.upper() expands
        b = derive_boundary(CompoundEntry(surface, left, head))
        if b.rule == "suffix":
            assert surface.lower()[b.split_index:] == head.lower()
        b.check(surface)


class TestBoundaryLabel:
    def test_range_check(self):
        with pytest.raises(ValueError):
            BoundaryLabel(0).check("abc")
        with pytest.raises(ValueError):
            BoundaryLabel(3).check("abc")
        BoundaryLabel(2).check("abc")


class TestLexicon:
    def test_counts_modifiers_and_heads(self):
        lex = build_lexicon([CompoundEntry("Arbeitstag", "Arbeit", "Tag"), CompoundEntry("Freitag", "frei", "Tag")])
        assert dict(lex) == {"arbeit": 1, "tag": 2, "frei": 1}

    def test_empty(self):
        assert len(build_lexicon([])) == 0

    def test_extra_frequency_file(self, tmp_path):
        p = write(tmp_path, "Tag\t5\nnacht\t2\n", "freq.tsv")
        lex = build_lexicon([CompoundEntry("Freitag", "frei", "Tag")], extra=p)
        assert lex.freq("tag") == 6 and lex.freq("Nacht") == 2

    def test_zero_counts_are_not_stored(self):
        lex = Lexicon({"a": 0, "b": 2})
        assert "a" not in lex and len(lex) == 1
        assert all(c >= 1 for c in lex.values())

    def test_frequency_file_errors(self, tmp_path):
        with pytest.raises(CorpusError, match="line 2"):
            read_frequency_file(write(tmp_path, "tag\t1\nnacht\n", "f.tsv"))


class TestPartition:
    def test_sizes(self):
        assert partition(list(range(10)), (0.8, 0.1, 0.1), seed=42).sizes == (8, 1, 1)

    def test_remainder_to_train(self):
        assert partition(list(range(10)), (0.85, 0.1, 0.05)).sizes == (9, 1, 0)

    def test_deterministic(self):
        a = partition(list(range(50)), seed=7)
        b = partition(list(range(50)), seed=7)
        assert (a.train, a.dev, a.test) == (b.train, b.dev, b.test)

    @pytest.mark.parametrize("ratios", [(0.5, 0.5), (0.8, 0.1, 0.2), (1.2, -0.1, -0.1)])
    def test_invalid_ratios(self, ratios):
        with pytest.raises(ValueError):
            partition(list(range(10)), ratios)

    @given(st.lists(st.integers(), max_size=60), st.integers(0, 2**32 - 1),
           st.tuples(st.integers(0, 10), st.integers(0, 10), st.integers(0, 10)).filter(lambda t: sum(t) > 0))
    def test_bijection(self, items, seed, weights):
        total = sum(weights)
        ratios = tuple(w / total for w in weights)
        part = partition(items, ratios, seed)
        assert Counter(part.train + part.dev + part.test) == Counter(items)
        n = len(items)
        assert part.sizes[1] <= n * ratios[1] + 1e-6 and part.sizes[2] <= n * ratios[2] + 1e-6


def test_dataset_stats():
    es = [CompoundEntry("Arbeitstag", "Arbeit", "Tag"), CompoundEntry("Freitag", "frei", "Tag"),
          CompoundEntry("Handschuh", "Hand", "Fuß")]
    s = dataset_stats(es)
    assert (s.entries, s.compounds, s.modifiers, s.heads) == (3, 3, 3, 2)
    assert s.hapax_heads == 1 and s.unalignable == 1 and s.rules == {"suffix": 2}
