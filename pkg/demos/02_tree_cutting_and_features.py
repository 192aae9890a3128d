"""Walkthrough: cutting a constituency tree at the unit boundary and typing features.

The sentence "However, people should not smoke." carries an argumentative
unit over "people should not smoke".  Cutting the tree at that span
separates content rules (inside the unit), context rules (outside), and
the single boundary-crossing rule at the cut site.  Feature names encode
the same split, so a feature's type is recoverable from its name alone.

Run with: python3 demos/02_tree_cutting_and_features.py
"""

from argdissect.annotations import Token, parse_bracketed_tree
from argdissect.features import (
    CB,
    CI,
    FA,
    ContentLayers,
    ContextLayers,
    FeatureRegistry,
    InstanceView,
    SideView,
    assemble,
    feature_type,
)
from argdissect.corpus import RelationInstance
from argdissect.treeops import (
    content_rules,
    context_rules,
    crossing_rules,
    cut_tree,
    select_sentiment_nodes,
)

TOKEN_SPECS = [
    (0, 7, "However"), (7, 8, ","), (9, 15, "people"), (16, 22, "should"),
    (23, 26, "not"), (27, 32, "smoke"), (32, 33, "."),
]
TREE = (
    "(S'|s=3 (ADVP|s=2 However) (, ,) "
    "(S|s=4 (NP (NN people)) (VP (MD should) (RB not) (VB smoke))) (. .))"
)
EAU_TOKENS = (2, 6)  # people .. smoke


def main():
    tokens = [
        Token("doc", 0, i, s, e, w) for i, (s, e, w) in enumerate(TOKEN_SPECS)
    ]
    tree = parse_bracketed_tree(TREE, tokens)
    cut = cut_tree(tree, EAU_TOKENS)

    print("content rules (visible to CB and FA):")
    for rule, count in sorted(content_rules(cut).items()):
        print(f"  {rule} x{count}")
    print("context rules (visible to CI and FA):")
    for rule, count in sorted(context_rules(cut).items()):
        print(f"  {rule} x{count}")
    print("crossing rules (FA only):")
    for rule, count in sorted(crossing_rules(cut).items()):
        print(f"  {rule} x{count}")
    print()

    nodes = select_sentiment_nodes(tree, EAU_TOKENS)
    for scope, node in nodes.items():
        print(f"sentiment node {scope}: {node.label} (score {node.sentiment})")
    print()

    content = ContentLayers(
        tokens=tuple(t.surface for t in tokens[2:6]),
        rules=tuple(content_rules(cut).elements()),
        sentiment=nodes["cb"].sentiment,
    )
    context = ContextLayers(
        tokens=("However", ",", "."),
        rules=tuple(context_rules(cut).elements()),
        crossing_rules=tuple(crossing_rules(cut).elements()),
        sentiment_ci=nodes["ci"].sentiment,
        sentiment_fa=nodes["fa"].sentiment,
        preceding_count=2,
        following_count=1,
    )
    inst = RelationInstance("T1", None, "attack", "h", "doc")
    view = InstanceView(
        inst, SideView("T1", content, context), None,
        frozenset({"tokens", "trees", "sentiment"}),
    )

    for model_type in (CB, CI, FA):
        registry = FeatureRegistry()
        vector = assemble(view, model_type, registry)
        names = sorted(registry.name(i) for i in vector)
        print(f"{model_type} sees {len(names)} features, e.g.:")
        for name in names[:6]:
            print(f"  {name}  [{feature_type(name)}]")
        print()


if __name__ == "__main__":
    main()
