import numpy as np
import pytest

from argdissect.annotations import Token, parse_bracketed_tree
from argdissect.synth import SynthConfig, generate_corpus

# Shared fixture: "However, people should not smoke." with the EAU covering
# "people should not smoke" (chars [9,32), tokens [2,6)).
SMOKE_TEXT = "However, people should not smoke."
SMOKE_TOKEN_SPECS = [
    (0, 7, "However"),
    (7, 8, ","),
    (9, 15, "people"),
    (16, 22, "should"),
    (23, 26, "not"),
    (27, 32, "smoke"),
    (32, 33, "."),
]
SMOKE_TREE = (
    "(S'|s=3 (ADVP|s=2 However) (, ,) "
    "(S|s=4 (NP (NN people)) (VP (MD should) (RB not) (VB smoke))) (. .))"
)
SMOKE_EAU_CHARS = (9, 32)
SMOKE_EAU_TOKENS = (2, 6)


@pytest.fixture
def smoke_tokens():
    return [
        Token("doc", 0, i, start, end, surface)
        for i, (start, end, surface) in enumerate(SMOKE_TOKEN_SPECS)
    ]


@pytest.fixture
def smoke_tree(smoke_tokens):
    return parse_bracketed_tree(SMOKE_TREE, smoke_tokens, doc_id="doc", sentence_idx=0)


def random_tree(rng, n_tokens, with_sentiment=False):
    """Random constituency tree string over n_tokens placeholder words."""
    words = [f"w{k}" for k in range(n_tokens)]

    def build(lo, hi, depth):
        if hi - lo == 1 and (depth > 0 and rng.random() < 0.6):
            return f"(POS{rng.integers(3)}{suffix()} {words[lo]})"
        if hi - lo == 1:
            return f"(X{suffix()} (POS{rng.integers(3)} {words[lo]}))"
        n_children = int(rng.integers(2, min(4, hi - lo) + 1))
        cuts = sorted(rng.choice(np.arange(lo + 1, hi), size=n_children - 1, replace=False))
        bounds = [lo] + [int(c) for c in cuts] + [hi]
        parts = [build(bounds[k], bounds[k + 1], depth + 1) for k in range(n_children)]
        return f"(N{rng.integers(5)}{suffix()} " + " ".join(parts) + ")"

    def suffix():
        if with_sentiment and rng.random() < 0.7:
            return f"|s={rng.integers(1, 6)}"
        return ""

    line = build(0, n_tokens, 0)
    # lay words out with single spaces so spans match surfaces
    tokens = []
    pos = 0
    for k, w in enumerate(words):
        tokens.append(Token("doc", 0, k, pos, pos + len(w), w))
        pos += len(w) + 1
    return parse_bracketed_tree(line, tokens, doc_id="doc", sentence_idx=0)


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "corpus"
    generate_corpus(str(out), SynthConfig(n_docs=20, seed=7))
    return str(out)
