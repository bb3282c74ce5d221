"""Command-line pipeline orchestration.

Subcommands cover the full flow: ingest -> train-entity / train-doc ->
build-axis -> score -> report-*.  All randomness flows from one --seed;
a flat key=value config file can supply any flag, with CLI flags winning.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
from dataclasses import asdict, replace

from . import axis as axis_mod
from . import report as report_mod
from .corpus import Corpus, parse_pubmed_xml, parse_records, select_by_pubtype, write_records
from .embed_doc import DocHyperparams, DocModel, train_pvdm
from .embed_entity import EntityHyperparams, EntityModel, train_cbow
from .errors import TransprogError
from .mesh import CategoryRules, parse_mesh
from .score import TpRecord, read_scores_csv, score_corpus, write_scores_csv
from .textprep import EntityDictionary, training_tokens

ENTITY_HP_KEYS = (
    "dim", "lr", "min_subword", "max_subword", "window", "epochs",
    "negatives", "min_count", "buckets", "threads", "seed",
)
DOC_HP_KEYS = (
    "dim", "lr", "window", "epochs", "threads", "negatives", "min_count",
    "infer_epochs", "seed",
)


def load_config(path: str) -> dict[str, str]:
    """Flat key=value config; '#' starts a comment."""
    config: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            config[key.strip()] = value.strip()
    return config


def _home() -> str:
    return os.environ.get("TP_HOME", ".")


def _out_path(path: str) -> str:
    if os.path.isabs(path):
        return path
    return os.path.join(_home(), path)


def _atomic_save(save_fn, path: str) -> None:
    path = _out_path(path)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        save_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_corpus(path: str, fmt: str) -> Corpus:
    if fmt == "pubmed-xml":
        with open(path, "rb") as f:
            return parse_pubmed_xml(f, source=path)
    with open(path, encoding="utf-8") as f:
        return parse_records(f, source=path)


def _load_mesh(path: str, rules_path: str | None):
    rules = CategoryRules.from_file(rules_path) if rules_path else None
    with open(path, "rb") as f:
        return parse_mesh(f, rules)


def _load_entities(path: str | None) -> EntityDictionary:
    if not path:
        return EntityDictionary.empty()
    with open(path, encoding="utf-8") as f:
        return EntityDictionary.load(f)


def _entity_hp(args) -> EntityHyperparams:
    hp = EntityHyperparams.desk() if args.preset == "desk" else EntityHyperparams()
    overrides = {
        k: getattr(args, k)
        for k in ENTITY_HP_KEYS
        if getattr(args, k, None) is not None
    }
    return replace(hp, **overrides)


def _doc_hp(args) -> DocHyperparams:
    hp = DocHyperparams.desk() if args.preset == "desk" else DocHyperparams()
    overrides = {
        k: getattr(args, k)
        for k in DOC_HP_KEYS
        if getattr(args, k, None) is not None
    }
    return replace(hp, **overrides)


def _dump_hp(hp) -> None:
    for key, value in sorted(asdict(hp).items()):
        print(f"{key} = {value}")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    def save(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)

    _atomic_save(save, path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    corpus = _load_corpus(args.corpus, args.format)
    def save(tmp: str) -> None:
        with open(tmp, "w", encoding="utf-8") as f:
            write_records(corpus, f)
    _atomic_save(save, args.out)
    print(f"ingest: {len(corpus)} documents -> {args.out}")
    return 0


def cmd_mesh_stats(args) -> int:
    vocab = _load_mesh(args.mesh, args.mesh_rules)
    counts = vocab.category_counts()
    basic, clinical = vocab.basic_terms(), vocab.clinical_terms()
    print(
        f"mesh-stats: {len(vocab)} descriptors; "
        f"A={counts['A']} C={counts['C']} H={counts['H']}; "
        f"basic={len(basic)} clinical={len(clinical)}"
    )
    return 0


def cmd_train_entity(args) -> int:
    hp = _entity_hp(args)
    if args.dump_config:
        _dump_hp(hp)
        return 0
    corpus = _load_corpus(args.corpus, args.format)
    dictionary = _load_entities(args.entities)
    streams = [training_tokens(doc, dictionary) for doc in corpus]
    model = train_cbow(streams, hp)
    _atomic_save(model.save, args.out)
    print(
        f"train-entity: vocab={len(model.vocab)} dim={hp.dim} "
        f"epochs={hp.epochs} -> {args.out}"
    )
    return 0


def cmd_train_doc(args) -> int:
    hp = _doc_hp(args)
    if args.dump_config:
        _dump_hp(hp)
        return 0
    corpus = _load_corpus(args.corpus, args.format)
    dictionary = _load_entities(args.entities)
    model = train_pvdm(corpus, dictionary, hp)
    _atomic_save(model.save, args.out)
    print(
        f"train-doc: vocab={len(model.word_vocab)} docs={len(model.doc_ids)} "
        f"dim={hp.dim} -> {args.out}"
    )
    return 0


def cmd_build_axis(args) -> int:
    if not os.path.exists(args.model):
        print(f"build-axis: model file {args.model!r} does not exist; "
              f"run train-{args.level} first", file=sys.stderr)
        return 2
    vocab = _load_mesh(args.mesh, args.mesh_rules)
    if args.level == "entity":
        model = EntityModel.load(args.model)
        axis = axis_mod.entity_axis(model, vocab)
    else:
        model = DocModel.load(args.model)
        corpus = _load_corpus(args.corpus, args.format)
        axis = axis_mod.doc_axis(model, corpus, vocab)
    _atomic_save(lambda p: axis_mod.save_axis(axis, p), args.out)
    print(
        f"build-axis: level={axis.level} basic={axis.basic_count} "
        f"clinical={axis.clinical_count} excluded="
        f"{axis.excluded_basic}/{axis.excluded_clinical} -> {args.out}"
    )
    return 0


def cmd_score(args) -> int:
    corpus = _load_corpus(args.corpus, args.format)
    dictionary = _load_entities(args.entities)
    vocab = _load_mesh(args.mesh, args.mesh_rules)
    entity_model = EntityModel.load(args.entity_model) if args.entity_model else None
    doc_model = DocModel.load(args.doc_model) if args.doc_model else None
    e_axis = axis_mod.load_axis(args.entity_axis) if args.entity_axis else None
    d_axis = axis_mod.load_axis(args.doc_axis) if args.doc_axis else None
    records = score_corpus(corpus, dictionary, vocab, entity_model, doc_model, e_axis, d_axis)
    _atomic_save(lambda p: write_scores_csv(records, p), args.out)
    scored_e = sum(1 for r in records if r.tpe is not None)
    scored_d = sum(1 for r in records if r.tpd is not None)
    print(f"score: {len(records)} records (tpe={scored_e}, tpd={scored_d}) -> {args.out}")
    return 0


def _read_scores(path: str) -> list[TpRecord]:
    with open(path, encoding="utf-8") as f:
        return read_scores_csv(f)


def cmd_report_phase(args) -> int:
    records = _read_scores(args.scores)
    corpus = _load_corpus(args.corpus, args.format)
    pub_types = {d.id: d.pub_types for d in corpus}
    groups = report_mod.group_by_phase(records, pub_types)
    rep = report_mod.phase_report(groups, args.level)
    _write_csv(
        args.out,
        ["phase", "count", "mean", "std_dev", "min", "max"],
        [[s.group_key, s.count, s.mean, s.std_dev, s.min, s.max] for s in rep.stats],
    )
    if args.svg:
        from .svg import bar_chart
        bar_chart(
            [s.group_key for s in rep.stats], [s.mean for s in rep.stats],
            _out_path(args.out) + ".svg", f"mean {args.level} by trial phase",
        )
    print(f"report-phase: monotone={rep.monotone} positive={rep.positive} -> {args.out}")
    if args.strict and not (rep.monotone and rep.positive):
        return 1
    return 0


def cmd_report_ach(args) -> int:
    records = _read_scores(args.scores)
    rep = report_mod.ach_report(records, args.level)
    _write_csv(
        args.out,
        ["ach", "count", "mean", "std_dev", "min", "max"],
        [[s.group_key, s.count, s.mean, s.std_dev, s.min, s.max] for s in rep.stats],
    )
    if args.svg:
        from .svg import bar_chart
        bar_chart(
            [s.group_key for s in rep.stats], [s.mean for s in rep.stats],
            _out_path(args.out) + ".svg", f"mean {args.level} by ACH label",
        )
    print(f"report-ach: ordering={' < '.join(rep.ordering)} -> {args.out}")
    return 0


def cmd_report_density(args) -> int:
    records = _read_scores(args.scores)
    hist, peaks = report_mod.density(records, args.level, args.bins)
    rows = [
        [hist.bin_edges[i], hist.bin_edges[i + 1], hist.counts[i], hist.density[i]]
        for i in range(len(hist.counts))
    ]
    _write_csv(args.out, ["bin_left", "bin_right", "count", "density"], rows)
    if args.svg:
        from .svg import line_chart
        centers = [
            (hist.bin_edges[i] + hist.bin_edges[i + 1]) / 2 for i in range(len(hist.counts))
        ]
        line_chart(centers, list(hist.density), _out_path(args.out) + ".svg",
                   f"{args.level} density")
    print(f"report-density: {len(peaks)} peaks at {peaks} -> {args.out}")
    return 0


def cmd_report_correlation(args) -> int:
    records = _read_scores(args.scores)
    pearson, spearman, n = report_mod.correlation(records)
    _write_csv(args.out, ["pearson", "spearman", "n"], [[pearson, spearman, n]])
    print(f"report-correlation: pearson={pearson:.4f} spearman={spearman:.4f} n={n} -> {args.out}")
    return 0


def cmd_report_trend(args) -> int:
    records = _read_scores(args.scores)
    trend = report_mod.yearly_trend(records, args.level)
    _write_csv(
        args.out,
        ["year", "count", "mean", "std_dev", "min", "max"],
        [[year, s.count, s.mean, s.std_dev, s.min, s.max] for year, s in trend],
    )
    if args.svg:
        from .svg import line_chart
        line_chart([y for y, _ in trend], [s.mean for _, s in trend],
                   _out_path(args.out) + ".svg", f"mean {args.level} by year")
    print(f"report-trend: {len(trend)} years -> {args.out}")
    return 0


def cmd_validate_all(args) -> int:
    """End-to-end phase-ordering and ACH-ordering validation."""
    corpus = _load_corpus(args.corpus, args.format)
    dictionary = _load_entities(args.entities)
    vocab = _load_mesh(args.mesh, args.mesh_rules)

    entity_hp = _entity_hp(args)
    doc_hp = _doc_hp(args)
    streams = [training_tokens(doc, dictionary) for doc in corpus]
    entity_model = train_cbow(streams, entity_hp)
    doc_model = train_pvdm(corpus, dictionary, doc_hp)
    e_axis = axis_mod.entity_axis(entity_model, vocab)
    d_axis = axis_mod.doc_axis(doc_model, corpus, vocab)
    records = score_corpus(corpus, dictionary, vocab, entity_model, doc_model, e_axis, d_axis)

    pub_types = {d.id: d.pub_types for d in corpus}
    groups = report_mod.group_by_phase(records, pub_types)
    ok = True
    for level in ("tpe", "tpd"):
        rep = report_mod.phase_report(groups, level)
        print(f"validate phase[{level}]: monotone={rep.monotone} positive={rep.positive}")
        ok = ok and rep.monotone and rep.positive
    ach = report_mod.ach_report(records, "tpe")
    means = {s.group_key: s.mean for s in ach.stats}
    basic_labels = [l for l in means if set(l) <= {"A", "C"}]
    mixed_labels = [l for l in means if "H" in l and l != "H"]
    ach_ok = (
        "H" in means
        and bool(basic_labels)
        and max(means[l] for l in basic_labels)
        < min((means[l] for l in mixed_labels), default=means["H"])
        and all(means[l] < means["H"] for l in means if l != "H")
    )
    print(f"validate ach ordering: {' < '.join(ach.ordering)} (basic<mixed<H={ach_ok})")
    ok = ok and ach_ok
    if args.out:
        _atomic_save(lambda p: write_scores_csv(records, p), args.out)
    print(f"validate-all: {'PASS' if ok else 'FAIL'}")
    if args.strict and not ok:
        return 1
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--format", choices=["pubmed-xml", "records"], default=None)


def _add_hp_flags(p: argparse.ArgumentParser, keys: tuple[str, ...]) -> None:
    p.add_argument("--preset", choices=["paper", "desk"], default=None)
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective hyperparameters and exit")
    floats = {"lr"}
    for key in keys:
        p.add_argument(
            f"--{key.replace('_', '-')}",
            type=float if key in floats else int,
            default=None,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transprog",
        description="Translational progression scoring pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a corpus into canonical line-delimited records")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("mesh-stats", help="print A/C/H and basic/clinical term counts")
    _add_common(p)
    p.add_argument("--mesh", required=True)
    p.add_argument("--mesh-rules")
    p.set_defaults(fn=cmd_mesh_stats)

    p = sub.add_parser("train-entity", help="train the entity-level CBOW model")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--entities")
    p.add_argument("--out", required=True)
    _add_hp_flags(p, ENTITY_HP_KEYS)
    p.set_defaults(fn=cmd_train_entity)

    p = sub.add_parser("train-doc", help="train the document-level PV-DM model")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--entities")
    p.add_argument("--out", required=True)
    _add_hp_flags(p, DOC_HP_KEYS)
    p.set_defaults(fn=cmd_train_doc)

    p = sub.add_parser("build-axis", help="build the translational axis from a trained model")
    _add_common(p)
    p.add_argument("--level", choices=["entity", "document"], required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--mesh-rules")
    p.add_argument("--corpus", help="required at the document level")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build_axis)

    p = sub.add_parser("score", help="score a corpus into the TpRecord CSV")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--entities")
    p.add_argument("--mesh", required=True)
    p.add_argument("--mesh-rules")
    p.add_argument("--entity-model")
    p.add_argument("--doc-model")
    p.add_argument("--entity-axis")
    p.add_argument("--doc-axis")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_score)

    for name, fn, needs_corpus, needs_level, needs_bins in (
        ("report-phase", cmd_report_phase, True, True, False),
        ("report-ach", cmd_report_ach, False, True, False),
        ("report-density", cmd_report_density, False, True, True),
        ("report-correlation", cmd_report_correlation, False, False, False),
        ("report-trend", cmd_report_trend, False, True, False),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.add_argument("--scores", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--svg", action="store_true")
        p.add_argument("--strict", action="store_true")
        if needs_corpus:
            p.add_argument("--corpus", required=True)
        if needs_level:
            p.add_argument("--level", choices=["tpe", "tpd"], default="tpe")
        if needs_bins:
            p.add_argument("--bins", type=int, default=100)
        p.set_defaults(fn=fn)

    p = sub.add_parser("validate-all", help="run the phase and ACH validation protocols end-to-end")
    _add_common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--entities")
    p.add_argument("--mesh", required=True)
    p.add_argument("--mesh-rules")
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true")
    _add_hp_flags(p, tuple(sorted(set(ENTITY_HP_KEYS + DOC_HP_KEYS))))
    p.set_defaults(fn=cmd_validate_all)

    return parser


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        if getattr(args, "format", None) is None and hasattr(args, "format"):
            args.format = "records"
        return
    config = load_config(args.config)
    for key, raw in config.items():
        attr = key.replace("-", "_").replace(".", "_")
        if not hasattr(args, attr) or getattr(args, attr) is not None:
            continue
        current_default = None
        if raw.lower() in ("true", "false"):
            value: object = raw.lower() == "true"
        else:
            try:
                value = int(raw)
            except ValueError:
                try:
                    value = float(raw)
                except ValueError:
                    value = raw
        setattr(args, attr, value)
    if getattr(args, "format", None) is None and hasattr(args, "format"):
        args.format = "records"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    try:
        return args.fn(args)
    except (TransprogError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
