"""Synthetic corpus generator with plantable content and context signals.

Each document is a title paragraph plus one body paragraph of sentences
shaped ``<Marker>, <signal-word> <noise> <noise>.`` where the EAU span
covers the three content words.  Every non-initial EAU has one outgoing
relation to the previous EAU.  The discourse marker agrees with the
relation label with probability ``marker_signal`` (a context clue); the
EAU's signal word agrees with probability ``content_signal`` (a content
clue).  All annotation layers (tokens, sentiment trees, discourse
relations, embeddings, split file) are emitted so the full feature system
runs without any external corpus.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .corpus import ATTACK, SUPPORT

MARKERS = {SUPPORT: "moreover", ATTACK: "however"}
SIGNAL_WORDS = {SUPPORT: "benefit", ATTACK: "harm"}
SENSES = {SUPPORT: "Expansion.Conjunction", ATTACK: "Comparison.Contrast"}
SENTIMENTS = {SUPPORT: 4, ATTACK: 2}

NOISE_WORDS = (
    "apple", "banana", "cherry", "date", "elder", "fig", "grape",
    "melon", "olive", "peach", "plum", "quince",
)

EMBED_DIM = 8


@dataclass
class SynthConfig:
    n_docs: int = 200
    sentences_per_doc: int = 6
    marker_signal: float = 0.95
    content_signal: float = 0.75
    support_share: float = 0.6
    train_share: float = 0.8
    seed: int = 0


def _flip(rng, label: str, agree_prob: float) -> str:
    if rng.random() < agree_prob:
        return label
    return ATTACK if label == SUPPORT else SUPPORT


@dataclass
class _Sentence:
    text: str
    tokens: list[tuple[int, int, str]]  # (start, end, surface), doc offsets
    tree: str
    eau_span: tuple[int, int] | None


def _title_sentence(offset: int, topic: str) -> _Sentence:
    words = ["This", "essay", "discusses", topic, "."]
    text = "This essay discusses " + topic + " ."
    tokens = []
    pos = offset
    for w in words:
        tokens.append((pos, pos + len(w), w))
        pos += len(w) + 1
    tree = (
        f"(S|s=3 (NP (DT This) (NN essay)) (VP (VB discusses) (NN {topic})) (. .))"
    )
    return _Sentence(text=text, tokens=tokens, tree=tree, eau_span=None)


def _body_sentence(offset: int, marker: str, words: list[str],
                   marker_sent: int, content_sent: int) -> _Sentence:
    cap = marker.capitalize()
    text = f"{cap}, {words[0]} {words[1]} {words[2]}."
    tokens = []
    pos = offset
    tokens.append((pos, pos + len(cap), cap))
    pos += len(cap)
    tokens.append((pos, pos + 1, ","))
    pos += 2  # comma + space
    eau_start = pos
    for k, w in enumerate(words):
        tokens.append((pos, pos + len(w), w))
        pos += len(w)
        if k < 2:
            pos += 1
    eau_end = pos
    tokens.append((pos, pos + 1, "."))
    tree = (
        f"(S|s=3 (ADVP|s={marker_sent} (RB {cap})) (, ,) "
        f"(NP|s={content_sent} (NN {words[0]}) (NN {words[1]}) (NN {words[2]})) (. .))"
    )
    return _Sentence(text=text, tokens=tokens, tree=tree, eau_span=(eau_start, eau_end))


def generate_doc(doc_id: str, config: SynthConfig, rng) -> dict[str, str]:
    """Generate the file contents (text, ann, tokens, trees, discourse) of one doc."""
    topic = NOISE_WORDS[rng.integers(len(NOISE_WORDS))]
    sentences: list[_Sentence] = []
    labels: list[str | None] = [None]  # outgoing relation label per body sentence

    title = _title_sentence(0, topic)
    text_lines = [title.text, ""]
    sentences.append(title)
    offset = len(title.text) + 2  # newline + blank line

    neutral = _body_sentence(
        offset,
        "initially",
        [str(NOISE_WORDS[rng.integers(len(NOISE_WORDS))]) for _ in range(3)],
        3,
        3,
    )
    sentences.append(neutral)
    text_lines.append(neutral.text)
    offset += len(neutral.text) + 1

    for _ in range(1, config.sentences_per_doc):
        label = SUPPORT if rng.random() < config.support_share else ATTACK
        labels.append(label)
        marker_label = _flip(rng, label, config.marker_signal)
        content_label = _flip(rng, label, config.content_signal)
        words = [
            SIGNAL_WORDS[content_label],
            str(NOISE_WORDS[rng.integers(len(NOISE_WORDS))]),
            str(NOISE_WORDS[rng.integers(len(NOISE_WORDS))]),
        ]
        sent = _body_sentence(
            offset,
            MARKERS[marker_label],
            words,
            SENTIMENTS[marker_label],
            SENTIMENTS[content_label],
        )
        sentences.append(sent)
        text_lines.append(sent.text)
        offset += len(sent.text) + 1

    text = "\n".join(text_lines) + "\n"

    # standoff annotations
    ann_lines = []
    body = [s for s in sentences if s.eau_span is not None]
    for i, sent in enumerate(body, start=1):
        start, end = sent.eau_span
        kind = "Claim" if i == 1 else "Premise"
        ann_lines.append(f"T{i}\t{kind} {start} {end}\t{text[start:end]}")
    for i, label in enumerate(labels):
        if label is None:
            continue
        rel = "supports" if label == SUPPORT else "attacks"
        ann_lines.append(f"R{i}\t{rel} Arg1:T{i + 1} Arg2:T{i}")
    ann_lines.append("A1\tStance T1 For")
    ann = "\n".join(ann_lines) + "\n"

    # token offsets
    token_lines = []
    for s_idx, sent in enumerate(sentences):
        for t_idx, (start, end, surface) in enumerate(sent.tokens):
            token_lines.append(f"{s_idx}\t{t_idx}\t{start}\t{end}\t{surface}")
    tokens = "\n".join(token_lines) + "\n"

    trees = "\n".join(s.tree for s in sentences) + "\n"

    # discourse: one crossing Explicit relation per related pair, plus one
    # context-internal Implicit relation per body sentence
    disc_lines = []
    for i, label in enumerate(labels):
        if label is None:
            continue
        prev_span = body[i - 1].eau_span
        cur = body[i]
        cur_span = cur.eau_span
        marker_tok = cur.tokens[0]
        sense = SENSES[label]
        disc_lines.append(
            f"Explicit|{sense}|{prev_span[0]}..{prev_span[1]}|"
            f"{cur_span[0]}..{cur_span[1]}|{marker_tok[0]}..{marker_tok[1]}"
        )
    for sent in body:
        marker_tok = sent.tokens[0]
        comma_tok = sent.tokens[1]
        marker = marker_tok[2].lower()
        sense = SENSES.get(
            SUPPORT if marker == MARKERS[SUPPORT] else ATTACK, "Expansion"
        )
        if marker not in MARKERS.values():
            sense = "Expansion"
        disc_lines.append(
            f"Implicit|{sense}|{marker_tok[0]}..{marker_tok[1]}|"
            f"{comma_tok[0]}..{comma_tok[1]}|"
        )
    discourse = "\n".join(disc_lines) + "\n"

    return {
        "txt": text,
        "ann": ann,
        "tokens.tsv": tokens,
        "trees": trees,
        "discourse": discourse,
    }


def embeddings_text(seed: int = 0, dim: int = EMBED_DIM) -> str:
    """Deterministic small word-vector table covering the synthetic vocabulary."""
    rng = np.random.default_rng(seed)
    vocab = sorted(
        set(NOISE_WORDS)
        | set(MARKERS.values())
        | set(SIGNAL_WORDS.values())
        | {"initially", "this", "essay", "discusses", ",", "."}
    )
    lines = []
    for word in vocab:
        vec = rng.normal(size=dim)
        lines.append(word + " " + " ".join(f"{v:.6f}" for v in vec))
    return "\n".join(lines) + "\n"


def generate_corpus(out_dir, config: SynthConfig) -> list[str]:
    """Write a full synthetic corpus (all layers + split + embeddings) to disk."""
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(config.seed)
    doc_ids = []
    split_lines = []
    n_train = max(1, int(round(config.n_docs * config.train_share)))
    for i in range(config.n_docs):
        doc_id = f"essay{i:03d}"
        doc_ids.append(doc_id)
        files = generate_doc(doc_id, config, rng)
        for ext, content in files.items():
            with open(os.path.join(out_dir, f"{doc_id}.{ext}"), "w") as fh:
                fh.write(content)
        part = "train" if i < n_train else "test"
        split_lines.append(f"{doc_id}\t{part}")
    with open(os.path.join(out_dir, "split.tsv"), "w") as fh:
        fh.write("\n".join(split_lines) + "\n")
    with open(os.path.join(out_dir, "embeddings.txt"), "w") as fh:
        fh.write(embeddings_text(config.seed))
    return doc_ids
