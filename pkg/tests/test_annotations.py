import numpy as np
import pytest

from argdissect.annotations import (
    Token,
    align_eau,
    load_embeddings,
    parse_bracketed_tree,
    parse_discourse_file,
    parse_token_offsets,
    parse_trees_file,
)
from argdissect.corpus import EauSpan
from argdissect.errors import AlignmentError, IntegrityError, StandoffParseError

from conftest import SMOKE_TEXT, SMOKE_EAU_CHARS


def test_parse_token_offsets_basic():
    tokens = parse_token_offsets("0\t0\t0\t7\tHowever\n", "However, x", "d")
    assert tokens == [Token("d", 0, 0, 0, 7, "However")]


def test_token_out_of_order():
    tsv = "0\t1\t0\t7\tHowever\n0\t0\t7\t8\t,\n"
    with pytest.raises(IntegrityError, match="order"):
        parse_token_offsets(tsv, "However, x", "d")


def test_token_surface_mismatch():
    with pytest.raises(IntegrityError, match="token 0"):
        parse_token_offsets("0\t0\t0\t7\tMoreover\n", "However, x", "d")


def test_token_overlap():
    tsv = "0\t0\t0\t7\tHowever\n0\t1\t5\t7\ter\n"
    with pytest.raises(IntegrityError, match="overlap"):
        parse_token_offsets(tsv, "However, x", "d")


# ---------------------------------------------------------------------------
# bracketed trees


def toks(*surfaces):
    out = []
    pos = 0
    for i, s in enumerate(surfaces):
        out.append(Token("d", 0, i, pos, pos + len(s), s))
        pos += len(s) + 1
    return out


def test_parse_tree_with_sentiment():
    tree = parse_bracketed_tree("(S|s=3 (ADVP|s=2 (RB However)))", toks("However"))
    assert tree.root.label == "S"
    assert tree.root.sentiment == 3
    advp = tree.root.children[0]
    assert advp.label == "ADVP" and advp.sentiment == 2
    assert [l.label for l in tree.root.leaves()] == ["However"]


def test_parse_tree_without_sentiment():
    tree = parse_bracketed_tree("(S (NP (NN dog)))", toks("dog"))
    assert all(n.sentiment is None for n in tree.root.iter_nodes())
    assert not tree.has_sentiment


def test_unbalanced_brackets():
    with pytest.raises(StandoffParseError, match="bracket"):
        parse_bracketed_tree("(S (NP (NN dog))", toks("dog"))
    with pytest.raises(StandoffParseError, match="bracket"):
        parse_bracketed_tree("(S (NN dog)))", toks("dog"))


def test_leaf_token_count_mismatch():
    with pytest.raises(AlignmentError, match="leaves"):
        parse_bracketed_tree("(S (NN a) (NN b))", toks("a", "b", "c"))


def test_token_ranges_bottom_up():
    tree = parse_bracketed_tree(
        "(S (NP (NN a) (NN b)) (VP (VB c)))", toks("a", "b", "c")
    )
    assert tree.root.token_range == (0, 3)
    np_node, vp_node = tree.root.children
    assert np_node.token_range == (0, 2)
    assert vp_node.token_range == (2, 3)


def test_trees_file_sentence_order():
    tokens = toks("a") + [Token("d", 1, 0, 2, 3, "b")]
    trees = parse_trees_file("(S (NN a))\n(S (NN b))\n", tokens, "d")
    assert set(trees) == {0, 1}
    with pytest.raises(AlignmentError):
        parse_trees_file("(S (NN a))\n", tokens, "d")


# ---------------------------------------------------------------------------
# discourse


def test_parse_discourse_explicit():
    rels = parse_discourse_file("Explicit|Comparison.Contrast|0..34|36..80|0..7\n", 100)
    assert len(rels) == 1
    rel = rels[0]
    assert rel.kind == "Explicit"
    assert rel.sense == "Comparison.Contrast"
    assert rel.connective == (0, 7)


def test_parse_discourse_implicit_no_connective():
    rels = parse_discourse_file("Implicit|Expansion|0..34|36..80|\n", 100)
    assert rels[0].connective is None


def test_discourse_span_out_of_bounds():
    with pytest.raises(StandoffParseError, match="bounds"):
        parse_discourse_file("Implicit|Expansion|0..34|36..200|\n", 100)


# ---------------------------------------------------------------------------
# embeddings


def test_load_embeddings_basic():
    table = load_embeddings("the 0.1 0.2\n", dim=2)
    assert np.allclose(table.entries["the"], [0.1, 0.2])


def test_load_embeddings_wrong_length():
    with pytest.raises(StandoffParseError, match="line 2"):
        load_embeddings("a 0.1 0.2\nb 0.1 0.2 0.3\n", dim=2)


def test_load_embeddings_duplicate_last_wins():
    table = load_embeddings("a 1 2\na 3 4\n", dim=2)
    assert np.allclose(table.entries["a"], [3, 4])


def test_embedding_lookup_absent_is_zero():
    table = load_embeddings("a 1 2\n", dim=2)
    assert np.array_equal(table.lookup("zzz"), np.zeros(2))


# ---------------------------------------------------------------------------
# EAU alignment


def smoke_doc_tokens():
    specs = [
        (0, 7, "However"),
        (7, 8, ","),
        (9, 15, "people"),
        (16, 22, "should"),
        (23, 26, "not"),
        (27, 32, "smoke"),
        (32, 33, "."),
    ]
    return [Token("d", 0, i, s, e, w) for i, (s, e, w) in enumerate(specs)]


def test_align_eau_partitions_sentence():
    eau = EauSpan("T1", "d", *SMOKE_EAU_CHARS, kind="Claim")
    alignment = align_eau(eau, smoke_doc_tokens())
    assert [t.surface for t in alignment.eau_tokens] == [
        "people", "should", "not", "smoke",
    ]
    assert [t.surface for t in alignment.context_tokens] == ["However", ",", "."]
    assert alignment.covering_sentence_idxs == (0,)


def test_align_eau_whole_sentence_no_context():
    eau = EauSpan("T1", "d", 0, len(SMOKE_TEXT), kind="Claim")
    alignment = align_eau(eau, smoke_doc_tokens())
    assert alignment.context_tokens == ()
    assert len(alignment.eau_tokens) == 7


def test_align_eau_no_token_overlap():
    tokens = smoke_doc_tokens()
    eau = EauSpan("T1", "d", 8, 9, kind="Claim")  # the space between "," and "people"
    with pytest.raises(AlignmentError):
        align_eau(eau, tokens)


def test_align_eau_across_two_sentences():
    # two sentences: "aa bb. cc dd." with an EAU from "bb" through "cc"
    specs = [
        (0, 0, 2, "aa"), (0, 1, 3, "bb"), (0, 2, 5, "."),
        (1, 0, 7, "cc"), (1, 1, 10, "dd"), (1, 2, 12, "."),
    ]
    text = "aa bb. cc dd."
    tokens = [
        Token("d", s_idx, t_idx, start, start + len(w), w)
        for s_idx, t_idx, start, w in [
            (0, 0, 0, "aa"), (0, 1, 3, "bb"), (0, 2, 5, "."),
            (1, 0, 7, "cc"), (1, 1, 10, "dd"), (1, 2, 12, "."),
        ]
    ]
    eau = EauSpan("T1", "d", 3, 9, kind="Claim")  # "bb. cc"
    alignment = align_eau(eau, tokens)
    assert alignment.covering_sentence_idxs == (0, 1)
    assert [t.surface for t in alignment.eau_tokens] == ["bb", ".", "cc"]
    # context = leftovers of both covering sentences
    assert [t.surface for t in alignment.context_tokens] == ["aa", "dd", "."]
    # partition property
    all_ids = {
        (t.sentence_idx, t.token_idx)
        for t in tokens
        if t.sentence_idx in alignment.covering_sentence_idxs
    }
    eau_ids = {(t.sentence_idx, t.token_idx) for t in alignment.eau_tokens}
    ctx_ids = {(t.sentence_idx, t.token_idx) for t in alignment.context_tokens}
    assert eau_ids | ctx_ids == all_ids
    assert eau_ids & ctx_ids == set()
