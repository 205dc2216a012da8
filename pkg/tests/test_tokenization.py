import pytest
from hypothesis import given
from hypothesis import strategies as st

from dekompost.corpus import BoundaryLabel
from dekompost.tokenization import (
    BpeModel,
    TokenSequence,
    bpe_encode,
    bpe_train,
    char_tokenize,
    load_merges,
    project_labels,
)

from oracles import naive_bpe, sequential_encode

words_st = st.text(alphabet="abcdeäöüst-", min_size=1, max_size=12)


class TestCharTokenize:
    def test_tag(self):
        assert char_tokenize("Tag").tokens == ("T", "a", "g")

    def test_umlaut_word(self):
        t = char_tokenize("Bücherregal")
        assert len(t) == 11 and "ü" in t.tokens
        assert all(e - s == 1 for s, e in t.char_spans)

    def test_empty(self):
        with pytest.raises(ValueError):
            char_tokenize("")


class TestTokenSequence:
    def test_spans_must_tile(self):
        with pytest.raises(ValueError):
            TokenSequence(("ab", "c"), ((0, 2), (1, 3)))

    def test_from_tokens(self):
        t = TokenSequence.from_tokens(["Arbeit", "stag"])
        assert t.char_spans == ((0, 6), (6, 10)) and t.word == "Arbeitstag" and t.ends() == [6, 10]


class TestBpeTrain:
    def test_abab(self):
        m = bpe_train(["abab", "abab"], 4)
        assert m.merges[0] == ("a", "b")
        assert {"a", "b", "ab"} <= m.vocab and len(m.vocab) == 4

    def test_all_distinct_bigrams(self):
        m = bpe_train(["abc", "def"], 20)
        assert m.merges == () and m.vocab == frozenset("abcdef")

    def test_too_small_vocab(self):
        with pytest.raises(ValueError):
            bpe_train(["abc"], 3)

    @given(st.lists(words_st, min_size=1, max_size=25), st.integers(1, 30))
    def test_matches_naive_trainer(self, corpus, extra):
        n_chars = len({c for w in corpus for c in w})
        m = bpe_train(corpus, n_chars + extra)
        assert list(m.merges) == naive_bpe(corpus, n_chars + extra)
        assert len(m.vocab) <= m.vocab_size_target

    @given(st.lists(words_st, min_size=1, max_size=25), st.integers(1, 30))
    def test_deterministic(self, corpus, extra):
        n = len({c for w in corpus for c in w}) + extra
        assert bpe_train(corpus, n) == bpe_train(list(corpus), n)


class TestBpeEncode:
    def test_single_merge(self):
        m = BpeModel((("a", "b"),), frozenset({"a", "b", "ab"}), 3)
        assert bpe_encode(m, "abc").tokens == ("ab", "c")

    def test_one_char(self):
        m = bpe_train(["abab", "abab"], 4)
        assert bpe_encode(m, "x").tokens == ("x",)

    @given(st.lists(words_st, min_size=1, max_size=20), words_st, st.integers(1, 20))
    def test_matches_sequential_oracle(self, corpus, word, extra):
        m = bpe_train(corpus, len({c for w in corpus for c in w}) + extra)
        toks = bpe_encode(m, word)
        assert list(toks.tokens) == sequential_encode(m.merges, word)
        assert "".join(toks.tokens) == word
        assert all(t in m.vocab or len(t) == 1 for t in toks.tokens)
        assert bpe_encode(m, word) == toks

    def test_save_load_roundtrip(self, tmp_path):
        m = bpe_train(["arbeitstag", "freitag", "feiertag", "arbeitszeit"], 20)
        p = tmp_path / "merges.txt"
        m.save(p)
        loaded = load_merges(p)
        assert loaded.merges == m.merges and loaded.vocab_size_target == 20
        assert bpe_encode(loaded, "arbeitstag") == bpe_encode(m, "arbeitstag")

    def test_malformed_merge_file(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("a b\nabc\n", encoding="utf-8")
        with pytest.raises(ValueError, match="line 2"):
            load_merges(p)


class TestProjectLabels:
    def test_char_level(self):
        lab = project_labels(BoundaryLabel(7), char_tokenize("Arbeitstag"))
        assert lab.labels == (0, 0, 0, 0, 0, 0, 1, 0, 0, 0) and not lab.lossy

    def test_inside_token_is_lossy(self):
        lab = project_labels(BoundaryLabel(7), TokenSequence.from_tokens(["Arbeit", "stag"]))
        assert lab.labels == (0, 1) and lab.lossy

    def test_exact_token_end(self):
        lab = project_labels(BoundaryLabel(7), TokenSequence.from_tokens(["Arbeits", "tag"]))
        assert lab.labels == (1, 0) and not lab.lossy

    @pytest.mark.parametrize("idx", [0, 10, -1])
    def test_out_of_range(self, idx):
        with pytest.raises(ValueError):
            project_labels(idx, char_tokenize("Arbeitstag"))

    def test_single_token_word(self):
        with pytest.raises(ValueError):
            project_labels(2, TokenSequence.from_tokens(["abc"]))

    @given(st.lists(words_st, min_size=1, max_size=20), st.text(alphabet="abcdst", min_size=2, max_size=12),
           st.integers(1, 20), st.data())
    def test_exactly_one_positive(self, corpus, word, extra, data):
        m = bpe_train(corpus, len({c for w in corpus for c in w}) + extra)
        toks = bpe_encode(m, word)
        if len(toks) < 2:
            return
        idx = data.draw(st.integers(1, len(word) - 1))
        lab = project_labels(idx, toks)
        assert sum(lab.labels) == 1 and len(lab.labels) == len(toks)
        exact = idx in toks.ends()
        assert lab.lossy == (not exact)
        if exact:
            assert lab.labels[-1] == 0


@given(st.lists(st.text(alphabet="abdst", min_size=2, max_size=10), min_size=3, max_size=30), st.data())
def test_lossy_rate_shrinks_toward_character_level(corpus, data):
    n_chars = len({c for w in corpus for c in w})
    boundaries = [data.draw(st.integers(1, len(w) - 1)) for w in corpus]

    def lossy_rate(tokenize):
        flags = []
        for w, b in zip(corpus, boundaries):
            toks = tokenize(w)
            if len(toks) >= 2:
                flags.append(project_labels(b, toks).lossy)
        return sum(flags) / len(flags) if flags else 0.0

    assert lossy_rate(char_tokenize) == 0.0
    rates = [lossy_rate(bpe_train(corpus, n_chars + k).encode) for k in range(1, 12)]
    # fewer merges never hides a boundary that more merges exposes
    lossy_sets = []
    for k in range(1, 12):
        m = bpe_train(corpus, n_chars + k)
        lossy_sets.append({i for i, (w, b) in enumerate(zip(corpus, boundaries)) if b not in m.encode(w).ends()})
    assert all(a <= b for a, b in zip(lossy_sets, lossy_sets[1:]))
    assert all(0.0 <= r <= 1.0 for r in rates)
