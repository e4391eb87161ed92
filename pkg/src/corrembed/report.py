"""Report assembly: full score runs with control batteries, and the
meta-analysis of the bundled benchmark fixtures.

The meta-analysis reproduces the published meta-claim from the score
tables. Two headline numbers:

- output_vs_accuracy: Pearson between ImageNet Acc@1 and the output-layer
  score over the models present in both tables (control rows and the model
  without a penultimate score excluded) = 0.767.
- penultimate_vs_output: Pearson between the penultimate-layer and
  output-layer scores over the same models = 0.942.

Literal single-table variants are also emitted as labelled sensitivity
rows, since they are the obvious alternative readings.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .controls import CONTROL_KINDS, ControlSpec, control_score
from .errors import DataError
from .ingest import FixtureRow, PenultimateRow
from .simcore import CorrEmbedResult, EmbeddingSet, TagSet, corr_embed, pearson

CONTROL_RUNS = 3  # seeds per control battery


@dataclass(frozen=True)
class ControlBattery:
    """One control kind scored across several seeds."""

    kind: str
    seeds: tuple[int, ...]
    scores: tuple[float, ...]

    @property
    def mean(self) -> float:
        return math.fsum(self.scores) / len(self.scores)

    @property
    def max_deviation(self) -> float:
        m = self.mean
        return max(abs(s - m) for s in self.scores)


@dataclass(frozen=True)
class ScoreReport:
    """A full scoring run: weighted, unweighted, and the four controls."""

    dataset: str
    n_items: int
    corrembed: CorrEmbedResult
    unweighted: CorrEmbedResult
    controls: tuple[ControlBattery, ...]
    elapsed_seconds: float
    parameters: dict


def run_control_batteries(
    images: EmbeddingSet,
    tags: TagSet,
    base_seed: int = 0,
    runs: int = CONTROL_RUNS,
    density: float | None = None,
    **corr_kwargs,
) -> tuple[ControlBattery, ...]:
    """Score every control kind with ``runs`` consecutive seeds."""
    batteries = []
    for offset, kind in enumerate(CONTROL_KINDS):
        seeds = tuple(base_seed + offset * runs + r for r in range(runs))
        scores = []
        for s in seeds:
            spec = ControlSpec(kind=kind, seed=s, density=density)
            scores.append(control_score(spec, images, tags, **corr_kwargs).mean)
        batteries.append(ControlBattery(kind=kind, seeds=seeds, scores=tuple(scores)))
    return tuple(batteries)


def run_score_report(
    images: EmbeddingSet,
    tags_weighted: TagSet,
    tags_unweighted: TagSet,
    dataset: str,
    sample="all",
    seed: int = 0,
    include_self: bool = False,
    threads: int = 1,
    control_runs: int = CONTROL_RUNS,
    weights_mode: str = "computed",
) -> ScoreReport:
    """Score a dataset with and without weights plus the four controls."""
    start = time.perf_counter()
    kwargs = dict(sample=sample, seed=seed, include_self=include_self, threads=threads)
    weighted = corr_embed(images, tags_weighted, **kwargs)
    unweighted = corr_embed(images, tags_unweighted, **kwargs)
    controls = run_control_batteries(
        images, tags_weighted, base_seed=seed, runs=control_runs, **kwargs
    )
    elapsed = time.perf_counter() - start
    return ScoreReport(
        dataset=dataset,
        n_items=images.n,
        corrembed=weighted,
        unweighted=unweighted,
        controls=controls,
        elapsed_seconds=elapsed,
        parameters={
            "sample": sample if sample == "all" else int(sample),
            "seed": seed,
            "include_self": include_self,
            "threads": threads,
            "control_runs": control_runs,
            "weights_mode": weights_mode,
        },
    )


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def report_tsv(report: ScoreReport) -> str:
    """One header line plus one summary row.

    Byte-stable for fixed inputs and seeds, which is why the wall time
    stays in the JSON report only.
    """
    header = [
        "dataset",
        "n_items",
        "n_scored",
        "n_skipped",
        "corrembed",
        "unweighted",
        *CONTROL_KINDS,
    ]
    by_kind = {b.kind: b for b in report.controls}
    row = [
        report.dataset,
        str(report.n_items),
        str(report.corrembed.n_scored),
        str(report.corrembed.n_skipped),
        _fmt(report.corrembed.mean),
        _fmt(report.unweighted.mean),
        *(
            f"{_fmt(by_kind[k].mean)}±{_fmt(by_kind[k].max_deviation)}"
            for k in CONTROL_KINDS
        ),
    ]
    return "\t".join(header) + "\n" + "\t".join(row) + "\n"


def _result_json(res: CorrEmbedResult, include_per_item: bool) -> dict:
    out = {
        "mean": res.mean,
        "n_scored": res.n_scored,
        "n_skipped": res.n_skipped,
    }
    if include_per_item:
        out["per_item"] = dict(res.per_item)
    return out


def report_json(report: ScoreReport, include_per_item: bool = False) -> str:
    obj = {
        "dataset": report.dataset,
        "n_items": report.n_items,
        "corrembed": _result_json(report.corrembed, include_per_item),
        "unweighted": _result_json(report.unweighted, include_per_item),
        "controls": {
            b.kind: {
                "seeds": list(b.seeds),
                "scores": list(b.scores),
                "mean": b.mean,
                "max_deviation": b.max_deviation,
            }
            for b in report.controls
        },
        "elapsed_seconds": report.elapsed_seconds,
        "parameters": report.parameters,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- meta-analysis of the bundled fixtures ------------------------------------


@dataclass(frozen=True)
class JoinedRow:
    """Output-layer and penultimate-layer scores joined by model name."""

    model: str
    acc1: float
    acc5: float
    corrembed: float
    unweighted: float
    random: float
    shuffled: float
    penultimate: float


@dataclass(frozen=True)
class MetaCorrelation:
    label: str
    x_col: str
    y_col: str
    n: int
    value: float


def meta_corr(
    rows: Sequence,
    x_col: str,
    y_col: str,
    exclude: Iterable[str] = (),
) -> float:
    """Pearson correlation of two named fixture columns.

    ``exclude`` removes rows by model name before correlating; at least
    three rows must remain.
    """
    excluded = set(exclude)
    kept = [r for r in rows if r.model not in excluded]
    if len(kept) < 3:
        raise DataError(
            f"only {len(kept)} fixture rows left after exclusion, need >= 3"
        )
    xs, ys = [], []
    for r in kept:
        for col, acc in ((x_col, xs), (y_col, ys)):
            if not hasattr(r, col):
                raise DataError(f"fixture column '{col}' does not exist")
            v = getattr(r, col)
            if v is None:
                raise DataError(f"fixture row '{r.model}' has no value for '{col}'")
            acc.append(float(v))
    r = pearson(xs, ys)
    if r is None:
        raise DataError(f"columns '{x_col}' and '{y_col}' have zero variance")
    return r


def control_row_names(rows: Sequence[FixtureRow]) -> set[str]:
    """Rows without an accuracy score are the control rows."""
    return {r.model for r in rows if r.acc1 == 0.0 and r.acc5 == 0.0}


def join_score_tables(
    output_rows: Sequence[FixtureRow],
    penultimate_rows: Sequence[PenultimateRow],
) -> list[JoinedRow]:
    """Inner-join the two tables on model name.

    Control rows and models lacking a penultimate score drop out, so the
    joined table holds exactly the models scored at both tap points.
    """
    pen = {r.model: r.corrembed for r in penultimate_rows if r.corrembed is not None}
    controls = control_row_names(output_rows)
    joined = []
    for r in output_rows:
        if r.model in controls or r.model not in pen:
            continue
        joined.append(
            JoinedRow(
                model=r.model,
                acc1=r.acc1,
                acc5=r.acc5,
                corrembed=r.corrembed,
                unweighted=r.unweighted,
                random=r.random,
                shuffled=r.shuffled,
                penultimate=pen[r.model],
            )
        )
    return joined


def fixture_meta_analysis(
    output_rows: Sequence[FixtureRow],
    penultimate_rows: Sequence[PenultimateRow],
    include_controls: bool = False,
) -> list[MetaCorrelation]:
    """The meta-correlations the bundled fixtures support.

    The first two entries are the headline values; the *_literal rows are
    sensitivity variants (all output-table models; accuracy against the
    penultimate column directly). ``include_controls`` adds the variant
    that keeps the zero-accuracy control rows in the output table.
    """
    joined = join_score_tables(output_rows, penultimate_rows)
    controls = control_row_names(output_rows)
    common = {r.model for r in joined}
    out = [
        MetaCorrelation(
            label="output_vs_accuracy",
            x_col="acc1",
            y_col="corrembed",
            n=len(joined),
            value=meta_corr(joined, "acc1", "corrembed"),
        ),
        MetaCorrelation(
            label="penultimate_vs_output",
            x_col="corrembed",
            y_col="penultimate",
            n=len(joined),
            value=meta_corr(joined, "corrembed", "penultimate"),
        ),
        MetaCorrelation(
            label="output_vs_accuracy_literal",
            x_col="acc1",
            y_col="corrembed",
            n=len(output_rows) - len(controls),
            value=meta_corr(output_rows, "acc1", "corrembed", exclude=controls),
        ),
        MetaCorrelation(
            label="penultimate_vs_accuracy_literal",
            x_col="acc1",
            y_col="penultimate",
            n=len(joined),
            value=meta_corr(joined, "acc1", "penultimate"),
        ),
    ]
    if include_controls:
        out.append(
            MetaCorrelation(
                label="output_vs_accuracy_with_controls",
                x_col="acc1",
                y_col="corrembed",
                n=len(output_rows),
                value=meta_corr(output_rows, "acc1", "corrembed"),
            )
        )
    return out


def meta_analysis_tsv(entries: Sequence[MetaCorrelation]) -> str:
    lines = ["\t".join(("label", "x", "y", "n", "pearson"))]
    for e in entries:
        lines.append(
            "\t".join((e.label, e.x_col, e.y_col, str(e.n), f"{e.value:.6f}"))
        )
    return "\n".join(lines) + "\n"
