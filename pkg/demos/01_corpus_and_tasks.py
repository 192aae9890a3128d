"""Walkthrough: standoff parsing, the four prediction tasks, and corpus transforms.

Run with: python3 demos/01_corpus_and_tasks.py
"""

from argdissect.corpus import (
    PairingConfig,
    build_instances,
    Corpus,
    parse_standoff,
    transform_doc,
)

TEXT = (
    "Smoking in public places\n"
    "\n"
    "Therefore, people should not smoke. However, smoking relaxes. "
    "Moreover, bystanders inhale the smoke.\n"
)
ANN = (
    "T1\tClaim 37 60\tpeople should not smoke\n"
    "T2\tPremise 71 86\tsmoking relaxes\n"
    "T3\tPremise 98 125\tbystanders inhale the smoke\n"
    "R1\tattacks Arg1:T2 Arg2:T1\n"
    "R2\tsupports Arg1:T3 Arg2:T1\n"
    "A1\tStance T1 For\n"
)


def main():
    parsed = parse_standoff(TEXT, ANN, doc_id="essay")
    print("document:", parsed.document.id)
    for eau in parsed.eaus:
        print(f"  {eau.id} ({eau.kind}): {parsed.document.text[eau.start:eau.end]!r}")
    print("relations:", parsed.relations)
    print()

    corpus = Corpus()
    corpus.add(parsed)

    for task, blurb in (
        ("l", "link identification over pairs"),
        ("h", "one outgoing stance per related unit"),
        ("f", "label the annotated pairs"),
        ("g", "joint linking and labeling"),
    ):
        instances = build_instances(corpus, task, PairingConfig(scope="paragraph"))
        print(f"task {task} ({blurb}): {len(instances)} instances")
        for inst in instances:
            print(f"  {inst.source} -> {inst.target}: {inst.label}")
    print()

    for mode in ("eau_only", "context_only"):
        new_text, _ = transform_doc(parsed, mode)
        print(f"{mode} transform:")
        for line in new_text.rstrip("\n").split("\n"):
            print("  |", line)
        print()


if __name__ == "__main__":
    main()
