"""Command-line interface.

Subcommands: score, weights, controls, neighbors, synth, meta-corr,
export-2d. Exit codes: 0 ok, 1 data error, 2 degenerate-input error.
File outputs are written atomically (temp + rename), so a nonzero exit
never leaves a partial report behind.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ingest, report, retrieval, synthgen, tagspace, weighting
from .errors import DataError, DegenerateInputError
from .simcore import EmbeddingSet


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which this tool reserves for
    # degenerate input; treat usage problems as data errors instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sample_arg(value: str):
    if value == "all":
        return "all"
    try:
        k = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'all' or an integer, got {value!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("sample size must be >= 1")
    return k


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="scoring threads (default 1)")
    p.add_argument(
        "--include-self",
        action="store_true",
        help="keep the self-pair in every similarity profile",
    )
    p.add_argument(
        "--sample",
        type=_sample_arg,
        default="all",
        help="number of items to sample, or 'all' (default)",
    )
    return p


def _embedding_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embeddings", required=True, help="CORREMB1 embedding file")
    p.add_argument("--ids", help="ids sidecar (required unless --csv)")
    p.add_argument(
        "--csv",
        action="store_true",
        help="read --embeddings as CSV (item_id,v1,...) instead of CORREMB1",
    )


def _weighting_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--floor",
        type=float,
        default=0.0,
        help="minimum category weight (default 0: max-entropy category drops out)",
    )
    p.add_argument(
        "--theoretical-max",
        action="store_true",
        help="normalize entropy by ln(category size) instead of the observed range",
    )
    p.add_argument(
        "--drop-category",
        action="append",
        metavar="NAME",
        help="category to drop (repeatable; default: Size, Shoe Size)",
    )
    p.add_argument(
        "--keep-all-categories",
        action="store_true",
        help="drop no categories at all",
    )


def _dropped(args) -> frozenset[str]:
    if args.keep_all_categories:
        return frozenset()
    if args.drop_category:
        return frozenset(args.drop_category)
    return tagspace.DEFAULT_DROPPED_CATEGORIES


def _load_embeddings(args) -> EmbeddingSet:
    if args.csv:
        return ingest.read_embeddings_csv(args.embeddings)
    if not args.ids:
        raise DataError("--ids is required when reading CORREMB1 files")
    return ingest.read_embeddings(args.embeddings, args.ids)


def _compute_weights(args, vocab, annotations_by_id) -> weighting.CategoryWeights:
    histories = ingest.read_histories(args.histories)
    entropies = weighting.entropies_by_category(
        histories, annotations_by_id, vocab.categories
    )
    if args.theoretical_max:
        return weighting.tag_weights_theoretical(
            entropies, vocab.category_sizes(), floor=args.floor
        )
    return weighting.tag_weights(entropies, floor=args.floor)


def _load_scoring_inputs(args):
    """Embeddings plus weighted and unweighted tag sets, aligned on id order."""
    images = _load_embeddings(args)
    annotations = ingest.read_annotations(args.tags)
    by_id = {a.item_id: a for a in annotations}
    vocab = tagspace.build_vocabulary(annotations, dropped=_dropped(args))

    if args.unweighted:
        weights = weighting.CategoryWeights({c: 1.0 for c in vocab.categories})
        mode = "none"
    elif args.weights:
        weights = ingest.read_weights(args.weights)
        mode = "loaded"
    elif args.histories:
        weights = _compute_weights(args, vocab, by_id)
        mode = "computed"
    else:
        raise DataError("need --histories, --weights, or --unweighted")

    tags_weighted = tagspace.build_tag_set(images.item_ids, by_id, vocab, weights)
    tags_unweighted = tagspace.build_tag_set(images.item_ids, by_id, vocab, None)
    return images, tags_weighted, tags_unweighted, weights, mode


def _emit(text: str, out: str | None) -> None:
    if out:
        ingest.atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _run_report(args) -> report.ScoreReport:
    images, tw, tu, _, mode = _load_scoring_inputs(args)
    label = args.label or Path(args.embeddings).stem
    return report.run_score_report(
        images,
        tw,
        tu,
        dataset=label,
        sample=args.sample,
        seed=args.seed,
        include_self=args.include_self,
        threads=args.threads,
        control_runs=args.control_runs,
        weights_mode=mode,
    )


def cmd_score(args) -> int:
    rep = _run_report(args)
    _emit(report.report_tsv(rep), args.out)
    if args.json:
        ingest.atomic_write_text(
            args.json, report.report_json(rep, include_per_item=args.per_item)
        )
    return 0


def cmd_controls(args) -> int:
    rep = _run_report(args)
    _emit(report.report_tsv(rep), args.out)
    return 0


def cmd_weights(args) -> int:
    if args.weights:
        weights = ingest.read_weights(args.weights)
    else:
        if not args.tags or not args.histories:
            raise DataError("need --tags and --histories (or a --weights file)")
        annotations = ingest.read_annotations(args.tags)
        by_id = {a.item_id: a for a in annotations}
        vocab = tagspace.build_vocabulary(annotations, dropped=_dropped(args))
        weights = _compute_weights(args, vocab, by_id)
    if args.out:
        ingest.write_weights(args.out, weights)
    else:
        import json

        sys.stdout.write(json.dumps(weights.as_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_neighbors(args) -> int:
    images = _load_embeddings(args)
    result = retrieval.top_k(images, args.query, args.k)
    lines = ["\t".join(("rank", "item_id", "similarity"))]
    for rank, (item_id, sim) in enumerate(result.neighbors, start=1):
        lines.append(f"{rank}\t{item_id}\t{sim:.6f}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_synth(args) -> int:
    spec = synthgen.SynthSpec(
        n_items=args.items,
        n_tags=args.tags,
        n_categories=args.categories,
        embed_dim=args.dim,
        noise=args.noise,
        seed=args.seed,
        identity_map=args.identity_map,
        n_customers=args.customers,
        rentals_per_customer=args.rentals,
    )
    ds = synthgen.generate(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ingest.write_embeddings(out / "embeddings.corremb", ds.embeddings, dtype=args.dtype)
    ingest.write_ids(out / "ids.txt", ds.embeddings.item_ids)
    ingest.write_annotations(out / "annotations.jsonl", ds.annotations)
    ingest.write_histories(out / "histories.jsonl", ds.histories)
    sys.stdout.write(
        f"wrote {spec.n_items} items (T={spec.n_tags}, d={spec.embed_dim}, "
        f"noise={spec.noise}) to {out}\n"
    )
    return 0


def cmd_meta_corr(args) -> int:
    output_rows = ingest.load_output_scores(args.output_scores)
    pen_rows = ingest.load_penultimate_scores(args.penultimate_scores)
    if args.x_col or args.y_col:
        if not (args.x_col and args.y_col):
            raise DataError("--x-col and --y-col must be given together")
        rows = (
            report.join_score_tables(output_rows, pen_rows)
            if args.table == "joined"
            else output_rows
        )
        exclude = set(args.exclude or [])
        if not args.include_controls and args.table == "output":
            exclude |= report.control_row_names(output_rows)
        value = report.meta_corr(rows, args.x_col, args.y_col, exclude=exclude)
        n = len([r for r in rows if r.model not in exclude])
        entries = [
            report.MetaCorrelation(
                label=f"{args.table}:{args.x_col}~{args.y_col}",
                x_col=args.x_col,
                y_col=args.y_col,
                n=n,
                value=value,
            )
        ]
    else:
        entries = report.fixture_meta_analysis(
            output_rows, pen_rows, include_controls=args.include_controls
        )
    _emit(report.meta_analysis_tsv(entries), args.out)
    return 0


def cmd_export_2d(args) -> int:
    images = _load_embeddings(args)
    lines = []
    for item_id, row in zip(images.item_ids, images.matrix):
        lines.append(item_id + "\t" + "\t".join(repr(float(v)) for v in row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="corrembed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    p = sub.add_parser(
        "score",
        parents=[common],
        help="score a dataset with and without weights plus the four controls",
    )
    _embedding_flags(p)
    p.add_argument("--tags", required=True, help="annotations JSONL")
    p.add_argument("--histories", help="rental histories JSONL (weights computed)")
    p.add_argument("--weights", help="precomputed weights JSON (skip histories)")
    p.add_argument("--unweighted", action="store_true", help="weight every category 1.0")
    _weighting_flags(p)
    p.add_argument("--label", help="dataset label (default: embeddings file stem)")
    p.add_argument("--control-runs", type=int, default=report.CONTROL_RUNS)
    p.add_argument("--out", help="write the TSV summary here instead of stdout")
    p.add_argument("--json", help="also write a JSON report to this path")
    p.add_argument(
        "--per-item", action="store_true", help="include per-item correlations in --json"
    )
    p.set_defaults(func=cmd_score)

    p = sub.add_parser(
        "controls",
        parents=[common],
        help="emit the real score and the four control scores as one TSV row",
    )
    _embedding_flags(p)
    p.add_argument("--tags", required=True)
    p.add_argument("--histories")
    p.add_argument("--weights")
    p.add_argument("--unweighted", action="store_true")
    _weighting_flags(p)
    p.add_argument("--label")
    p.add_argument("--control-runs", type=int, default=report.CONTROL_RUNS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_controls)

    p = sub.add_parser("weights", help="compute or echo the category weight map")
    p.add_argument("--tags", help="annotations JSONL")
    p.add_argument("--histories", help="rental histories JSONL")
    p.add_argument("--weights", help="echo an existing weights JSON instead")
    _weighting_flags(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("neighbors", help="top-k most similar items for a query id")
    _embedding_flags(p)
    p.add_argument("--query", required=True, help="query item id")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("synth", help="generate a synthetic dataset in all ingest formats")
    p.add_argument("--items", type=int, default=200)
    p.add_argument("--tags", type=int, default=24)
    p.add_argument("--categories", type=int, default=6)
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--identity-map", action="store_true")
    p.add_argument("--customers", type=int, default=None)
    p.add_argument("--rentals", type=int, default=20)
    p.add_argument("--dtype", choices=("float32", "float64"), default="float64")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser(
        "meta-corr",
        help="meta-correlations over the bundled (or given) benchmark fixtures",
    )
    p.add_argument("--output-scores", help="output-layer fixture TSV (default bundled)")
    p.add_argument(
        "--penultimate-scores", help="penultimate-layer fixture TSV (default bundled)"
    )
    p.add_argument("--include-controls", action="store_true")
    p.add_argument("--x-col", help="explicit x column (with --y-col)")
    p.add_argument("--y-col", help="explicit y column (with --x-col)")
    p.add_argument("--table", choices=("output", "joined"), default="output")
    p.add_argument("--exclude", action="append", metavar="MODEL")
    p.add_argument("--out")
    p.set_defaults(func=cmd_meta_corr)

    p = sub.add_parser(
        "export-2d",
        help="dump raw embeddings + ids as TSV for external projection tools",
    )
    _embedding_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_2d)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateInputError as e:
        print(f"corrembed: degenerate input: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"corrembed: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"corrembed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
