"""Walkthrough: a full experiment on a synthetic corpus with planted signals.

The generator plants a strong clue in each unit's context (the discourse
marker agrees with the relation label 95% of the time) and a weaker clue
in its content (75%).  A context-ignorant model therefore beats the
content-based one on the standard test, but collapses when test contexts
are shuffled across instances while the content-based model is untouched.

Run with: python3 demos/03_end_to_end_experiment.py
"""

import os
import tempfile

from argdissect.evaluation import randomize_contexts, strip_contexts
from argdissect.features import CB, CI, FA
from argdissect.learn import TrainConfig
from argdissect.pipeline import RunConfig, evaluate_model, prepare, train_model
from argdissect.synth import SynthConfig, generate_corpus


def main():
    workdir = tempfile.mkdtemp(prefix="argdissect-demo-")
    corpus_dir = os.path.join(workdir, "corpus")
    generate_corpus(
        corpus_dir,
        SynthConfig(n_docs=120, marker_signal=0.95, content_signal=0.75, seed=0),
    )
    print(f"synthetic corpus written to {corpus_dir}")

    config = RunConfig(
        corpus_dir=corpus_dir,
        split_path=os.path.join(corpus_dir, "split.tsv"),
        output_dir=os.path.join(workdir, "out"),
        task="f",
        train=TrainConfig(max_epochs=300, tolerance=1e-3),
    )
    data = prepare(config)
    print(f"train instances: {len(data.train_views)}, test: {len(data.test_views)}")
    print()

    randomized = randomize_contexts(data.test_views, seed=0)
    stripped = strip_contexts(data.test_views)

    print(f"{'model':<6}{'standard':>10}{'randomized':>12}{'no context':>12}")
    for model_type in (CB, CI, FA):
        model, registry, _, families = train_model(config, data, model_type)

        def macro(views):
            report, _ = evaluate_model(
                model, registry, views, data.classes, families, data.embedding_dim
            )
            return report.macro_f1

        print(
            f"{model_type:<6}{macro(data.test_views):>10.1f}"
            f"{macro(randomized):>12.1f}{macro(stripped):>12.1f}"
        )
    print()
    print("reading: CI wins on the standard test but collapses without real")
    print("contexts; CB is identical in all three columns by construction.")


if __name__ == "__main__":
    main()
