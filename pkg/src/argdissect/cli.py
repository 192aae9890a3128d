"""Command-line driver: reproducible experiment runs over standoff corpora.

Subcommands: ingest, run, robustness, anova, baseline, transform, synth.
Options may come from a flat ``key = value`` config file (--config); flags
given on the command line win.  Exit codes: 0 ok, 1 usage, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import corpus as corpus_mod
from .corpus import TASK_CLASSES
from .errors import ArgdissectError, DataError
from .evaluation import (
    anova_scores,
    f1_report,
    format_report,
    mfs_baseline,
    randomize_contexts,
    strip_contexts,
)
from .features import CB, CI, FA, FAMILIES
from .learn import TrainConfig
from .pipeline import (
    RunConfig,
    evaluate_model,
    load_corpus_dir,
    prepare,
    run_experiment,
    train_model,
    write_manifest,
)
from .synth import SynthConfig, generate_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def read_config_file(path) -> dict[str, str]:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path}:{line_no}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = (
    "corpus_dir", "embeddings", "split", "out", "task", "model_type",
    "families", "pairing_scope", "exclude_reverse", "c", "loss",
    "max_epochs", "tolerance", "class_weighting", "seed", "eval_seed",
    "significance_n",
)


def build_run_config(args) -> RunConfig:
    merged: dict[str, str] = {}
    if getattr(args, "config", None):
        file_values = read_config_file(args.config)
        unknown = set(file_values) - set(_CONFIG_KEYS)
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_values)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    def get(key, default=None):
        return merged.get(key, default)

    if not get("corpus_dir"):
        raise DataError("corpus_dir is required (flag or config file)")
    if not get("split"):
        raise DataError("split file is required (flag or config file)")
    families = get("families", "")
    families_tuple = tuple(f for f in str(families).split(",") if f) if families else ()
    for fam in families_tuple:
        if fam not in FAMILIES:
            raise DataError(f"unknown feature family: {fam}")
    train_cfg = TrainConfig(
        c=float(get("c", 1.0)),
        loss=str(get("loss", "squared_hinge")),
        max_epochs=int(get("max_epochs", 1000)),
        tolerance=float(get("tolerance", 1e-4)),
        class_weighting=str(get("class_weighting", "inverse_frequency")),
        seed=int(get("seed", 0)),
    )
    model_type = str(get("model_type", FA))
    if model_type not in (CB, CI, FA):
        raise DataError(f"unknown model type: {model_type}")
    task = str(get("task", "f"))
    if task not in TASK_CLASSES:
        raise DataError(f"unknown task: {task}")
    return RunConfig(
        corpus_dir=str(get("corpus_dir")),
        embeddings_path=str(get("embeddings", "") or ""),
        split_path=str(get("split")),
        output_dir=str(get("out", "out")),
        task=task,
        model_type=model_type,
        families=families_tuple,
        pairing_scope=str(get("pairing_scope", "paragraph")),
        exclude_reverse=str(get("exclude_reverse", "false")).lower() in ("1", "true", "yes"),
        train=train_cfg,
        eval_seed=int(get("eval_seed", 0)),
        significance_n=int(get("significance_n", 0)),
    )


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--corpus-dir", dest="corpus_dir")
    p.add_argument("--embeddings")
    p.add_argument("--split")
    p.add_argument("--out")
    p.add_argument("--task", choices=sorted(TASK_CLASSES))
    p.add_argument("--model-type", dest="model_type", choices=[CB, CI, FA])
    p.add_argument("--families", help="comma-separated feature families")
    p.add_argument("--pairing-scope", dest="pairing_scope",
                   choices=["paragraph", "document"])
    p.add_argument("--exclude-reverse", dest="exclude_reverse")
    p.add_argument("--c")
    p.add_argument("--loss", choices=["hinge", "squared_hinge"])
    p.add_argument("--max-epochs", dest="max_epochs")
    p.add_argument("--tolerance")
    p.add_argument("--class-weighting", dest="class_weighting",
                   choices=["none", "inverse_frequency"])
    p.add_argument("--seed")
    p.add_argument("--eval-seed", dest="eval_seed")
    p.add_argument("--significance-n", dest="significance_n")


def cmd_ingest(args) -> int:
    config = build_run_config(args)
    data = prepare(config)
    n_eaus = sum(len(d.eaus) for d in data.bundle.corpus)
    n_rels = sum(len(d.relations) for d in data.bundle.corpus)
    print(f"documents: {len(data.bundle.corpus)}")
    print(f"EAUs: {n_eaus}")
    print(f"relations: {n_rels}")
    print(f"layers: {', '.join(sorted(data.bundle.layers))}")
    for part, insts in (("train", data.train_instances), ("test", data.test_instances)):
        counts: dict[str, int] = {}
        for inst in insts:
            counts[inst.label] = counts.get(inst.label, 0) + 1
        stats = ", ".join(f"{c}={counts.get(c, 0)}" for c in data.classes)
        print(f"task {config.task} {part}: {len(insts)} instances ({stats})")
    return EXIT_OK


def cmd_run(args) -> int:
    config = build_run_config(args)
    report = run_experiment(config)
    print(format_report(report, f"task {config.task}, model {config.model_type}"))
    print(f"artifacts written to {config.output_dir}")
    return EXIT_OK


def cmd_robustness(args) -> int:
    config = build_run_config(args)
    data = prepare(config)
    os.makedirs(config.output_dir, exist_ok=True)
    if args.mode == "randomized":
        transformed = randomize_contexts(data.test_views, config.eval_seed)
    else:
        transformed = strip_contexts(data.test_views)

    reports = {}
    for model_type in (CB, CI, FA):
        model, registry, _, families = train_model(config, data, model_type)
        report, _ = evaluate_model(
            model, registry, transformed, data.classes, families, data.embedding_dim
        )
        reports[model_type] = report

    baseline = reports[CB]
    lines = [f"robustness ({args.mode} mode), task {config.task}"]
    header = "model" + "".join(f"{('dF1_' + c):>12}" for c in data.classes)
    lines.append(header + f"{'d_macro':>12}")
    out_path = os.path.join(config.output_dir, f"robustness_{args.mode}.tsv")
    with open(out_path, "w", encoding="utf-8") as fh:
        for model_type in (CB, CI, FA):
            report = reports[model_type]
            deltas = [report.f1(c) - baseline.f1(c) for c in data.classes]
            d_macro = report.macro_f1 - baseline.macro_f1
            lines.append(
                f"{model_type:<5}"
                + "".join(f"{d:>12.1f}" for d in deltas)
                + f"{d_macro:>12.1f}"
            )
            for cls, d in zip(data.classes, deltas):
                fh.write(f"{model_type}\t{cls}\t{d}\n")
            fh.write(f"{model_type}\tmacro\t{d_macro}\n")
    write_manifest(
        os.path.join(config.output_dir, "manifest.txt"),
        config,
        [config.split_path],
        [out_path],
    )
    print("\n".join(lines))
    print(f"delta table written to {out_path}")
    return EXIT_OK


def cmd_anova(args) -> int:
    config = build_run_config(args)
    data = prepare(config)
    os.makedirs(config.output_dir, exist_ok=True)
    # FA registry exposes the CB and CI slices side by side
    _, registry, X_train, _ = train_model(config, data, FA)
    labels = [v.instance.label for v in data.train_views]
    curve = anova_scores(X_train, labels, registry)
    out_path = os.path.join(config.output_dir, "anova.tsv")
    with open(out_path, "w", encoding="utf-8") as fh:
        for ftype in (CB, CI):
            for pct, f_val in zip(curve.percentiles, curve.curves[ftype]):
                fh.write(f"{ftype}\t{pct:g}\t{f_val}\n")
    for ftype in (CB, CI):
        values = curve.curves[ftype]
        marks = ", ".join(
            f"p{int(p)}={values[list(curve.percentiles).index(p)]:.3g}"
            for p in (50.0, 90.0, 99.0)
        )
        print(f"{ftype}: {marks}")
    write_manifest(
        os.path.join(config.output_dir, "manifest.txt"),
        config,
        [config.split_path],
        [out_path],
    )
    print(f"percentile curves written to {out_path}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    config = build_run_config(args)
    data = prepare(config)
    os.makedirs(config.output_dir, exist_ok=True)
    train_labels = [v.instance.label for v in data.train_views]
    label = mfs_baseline(train_labels, data.classes)
    gold = [v.instance.label for v in data.test_views]
    report = f1_report([label] * len(gold), gold, data.classes)
    if config.task == "g":
        report.notes.append(
            "macro F1 is the arithmetic mean over all task classes"
        )
    print(format_report(report, f"mfs baseline (predicts {label!r}), task {config.task}"))
    out_path = os.path.join(config.output_dir, "baseline.tsv")
    from .pipeline import write_report_tsv

    write_report_tsv(out_path, report)
    print(f"report written to {out_path}")
    return EXIT_OK


def cmd_transform(args) -> int:
    config = build_run_config(args)
    bundle = load_corpus_dir(config.corpus_dir)
    os.makedirs(config.output_dir, exist_ok=True)
    transformed = corpus_mod.transform_corpus(bundle.corpus, args.mode)
    outputs = []
    for doc_id, (text, ann) in sorted(transformed.items()):
        txt_path = os.path.join(config.output_dir, f"{doc_id}.txt")
        ann_path = os.path.join(config.output_dir, f"{doc_id}.ann")
        with open(txt_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(ann_path, "w", encoding="utf-8") as fh:
            fh.write(ann)
        outputs.extend([txt_path, ann_path])
    write_manifest(
        os.path.join(config.output_dir, "manifest.txt"), config, [], outputs[:8]
    )
    print(f"wrote {len(transformed)} transformed documents ({args.mode}) to {config.output_dir}")
    return EXIT_OK


def cmd_synth(args) -> int:
    config = SynthConfig(
        n_docs=args.docs,
        sentences_per_doc=args.sentences,
        marker_signal=args.marker_signal,
        content_signal=args.content_signal,
        seed=args.seed,
    )
    doc_ids = generate_corpus(args.out, config)
    print(f"generated {len(doc_ids)} synthetic documents in {args.out}")
    return EXIT_OK


def make_parser() -> _Parser:
    parser = _Parser(prog="argdissect")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("ingest", cmd_ingest),
        ("run", cmd_run),
        ("anova", cmd_anova),
        ("baseline", cmd_baseline),
    ):
        p = sub.add_parser(name)
        _add_run_options(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("robustness")
    _add_run_options(p)
    p.add_argument("--mode", choices=["randomized", "nocontext"], required=True)
    p.set_defaults(fn=cmd_robustness)

    p = sub.add_parser("transform")
    _add_run_options(p)
    p.add_argument("--mode", choices=["eau_only", "context_only"], required=True)
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("synth")
    p.add_argument("--out", required=True)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--sentences", type=int, default=6)
    p.add_argument("--marker-signal", dest="marker_signal", type=float, default=0.95)
    p.add_argument("--content-signal", dest="content_signal", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.fn(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ArgdissectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
