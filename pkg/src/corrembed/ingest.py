"""On-disk formats. The only module that touches files.

Embeddings travel in a small binary container:

    bytes 0-7    magic "CORREMB1" (ASCII)
    bytes 8-11   n, unsigned 32-bit little-endian
    bytes 12-15  d, unsigned 32-bit little-endian
    byte  16     dtype code: 0 = float32, 1 = float64
    bytes 17-    payload, exactly n*d*(4 or 8) bytes, row-major

Item ids ride in a sidecar text file, one non-empty UTF-8 line per row, LF
separated, same order as the rows. Annotations and rental histories are
JSONL. Everything is written to a temp file and renamed, so partial files
never land on disk.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataError
from .simcore import EmbeddingSet
from .tagspace import ItemAnnotation
from .weighting import CategoryWeights, RentalHistory

MAGIC = b"CORREMB1"
_HEADER = struct.Struct("<8sIIB")
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_DTYPE_CODES = {"float32": 0, "float64": 1}


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.chmod(tmp, 0o644)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


# -- embeddings -------------------------------------------------------------


def write_embeddings(path, embeddings: EmbeddingSet, dtype: str = "float64") -> None:
    """Write the matrix in the binary container; ids are written separately."""
    code = _DTYPE_CODES.get(dtype)
    if code is None:
        raise DataError(f"unsupported dtype '{dtype}' (float32 or float64)")
    m = np.ascontiguousarray(embeddings.matrix, dtype=_DTYPES[code])
    header = _HEADER.pack(MAGIC, embeddings.n, embeddings.dim, code)
    atomic_write_bytes(path, header + m.tobytes(order="C"))


def write_ids(path, item_ids: Iterable[str]) -> None:
    ids = list(item_ids)
    for i in ids:
        if not i or "\n" in i:
            raise DataError(f"item id {i!r} cannot be written to an ids file")
    atomic_write_text(path, "\n".join(ids) + "\n")


def read_ids(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    if not text:
        return []
    lines = text.split("\n")
    for lineno, line in enumerate(lines, start=1):
        if not line:
            raise DataError(f"{path}:{lineno}: empty id line")
    return lines


def read_embeddings(path, ids_path) -> EmbeddingSet:
    """Read a binary container plus its ids sidecar into an EmbeddingSet.

    float32 payloads are widened to float64 in memory.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise DataError(f"{path}: not a CORREMB1 file (truncated header)")
    magic, n, d, code = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataError(f"{path}: not a CORREMB1 file")
    if code not in _DTYPES:
        raise DataError(f"{path}: unknown dtype code {code}")
    if n < 2:
        raise DataError(f"{path}: n >= 2 required, header says n={n}")
    if d < 1:
        raise DataError(f"{path}: d >= 1 required, header says d={d}")
    dt = _DTYPES[code]
    expected = n * d * dt.itemsize
    payload = raw[_HEADER.size :]
    if len(payload) < expected:
        raise DataError(
            f"{path}: truncated payload ({len(payload)} bytes, expected {expected})"
        )
    if len(payload) > expected:
        raise DataError(
            f"{path}: oversized payload ({len(payload)} bytes, expected {expected})"
        )
    matrix = np.frombuffer(payload, dtype=dt).reshape(n, d)
    ids = read_ids(ids_path)
    if len(ids) != n:
        raise DataError(
            f"{ids_path}: has {len(ids)} ids but embedding file has {n} rows"
        )
    return EmbeddingSet(tuple(ids), matrix.astype(np.float64))


def read_embeddings_csv(path) -> EmbeddingSet:
    """CSV import for small hand-made tests: item_id,v1,v2,... per line."""
    ids: list[str] = []
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise DataError(f"{path}:{lineno}: expected item_id,v1,...")
            try:
                rows.append([float(p) for p in parts[1:]])
            except ValueError as e:
                raise DataError(f"{path}:{lineno}: {e}") from None
            ids.append(parts[0])
    if not ids:
        raise DataError(f"{path}: empty CSV")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DataError(f"{path}: ragged rows (widths {sorted(widths)})")
    return EmbeddingSet(tuple(ids), np.array(rows, dtype=np.float64))


# -- annotations and histories ----------------------------------------------


def _read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{lineno}: invalid JSON ({e.msg})") from None


def read_annotations(path) -> list[ItemAnnotation]:
    """Parse annotation JSONL: {"item_id": s, "tags": [{"category": s, "name": s}, ...]}."""
    out: list[ItemAnnotation] = []
    seen: dict[str, int] = {}
    for lineno, obj in _read_jsonl(path):
        try:
            item_id = obj["item_id"]
            tags = frozenset(
                (tag["category"], tag["name"]) for tag in obj["tags"]
            )
        except (TypeError, KeyError) as e:
            raise DataError(f"{path}:{lineno}: malformed annotation ({e})") from None
        if item_id in seen:
            raise DataError(
                f"{path}:{lineno}: duplicate item_id '{item_id}' "
                f"(first seen on line {seen[item_id]})"
            )
        seen[item_id] = lineno
        out.append(ItemAnnotation(item_id=item_id, tags=tags))
    return out


def write_annotations(path, annotations: Iterable[ItemAnnotation]) -> None:
    lines = []
    for a in annotations:
        tags = [{"category": c, "name": t} for c, t in sorted(a.tags)]
        lines.append(json.dumps({"item_id": a.item_id, "tags": tags}, sort_keys=True))
    atomic_write_text(path, "\n".join(lines) + "\n" if lines else "")


def read_histories(path) -> list[RentalHistory]:
    """Parse history JSONL: {"customer_id": s, "item_ids": [s, ...]}.

    Unknown item ids are reported at weighting time, not here.
    """
    out: list[RentalHistory] = []
    for lineno, obj in _read_jsonl(path):
        try:
            out.append(
                RentalHistory(
                    customer_id=str(obj["customer_id"]),
                    item_ids=tuple(obj["item_ids"]),
                )
            )
        except (TypeError, KeyError) as e:
            raise DataError(f"{path}:{lineno}: malformed history ({e})") from None
    return out


def write_histories(path, histories: Iterable[RentalHistory]) -> None:
    lines = [
        json.dumps(
            {"customer_id": h.customer_id, "item_ids": list(h.item_ids)},
            sort_keys=True,
        )
        for h in histories
    ]
    atomic_write_text(path, "\n".join(lines) + "\n" if lines else "")


def read_weights(path) -> CategoryWeights:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e.msg})") from None
    if not isinstance(obj, dict):
        raise DataError(f"{path}: expected a JSON object of category -> weight")
    return CategoryWeights(obj)


def write_weights(path, weights: CategoryWeights) -> None:
    atomic_write_text(
        path, json.dumps(weights.as_dict(), indent=2, sort_keys=True) + "\n"
    )


# -- bundled benchmark fixtures ----------------------------------------------


@dataclass(frozen=True)
class FixtureRow:
    """One published output-layer benchmark row.

    acc1/acc5 are ImageNet1k accuracies (0.0 for the control rows);
    corrembed/unweighted are the weighted and unweighted scores; random and
    shuffled are the tag-side control columns.
    """

    model: str
    acc1: float
    acc5: float
    corrembed: float
    unweighted: float
    random: float
    shuffled: float

    def __post_init__(self):
        if self.acc1 and self.acc5 and self.acc1 > self.acc5:
            raise DataError(
                f"fixture row '{self.model}': acc1 {self.acc1} > acc5 {self.acc5}"
            )


@dataclass(frozen=True)
class PenultimateRow:
    """One published penultimate-layer benchmark row.

    corrembed is None where the experiment could not run (non-flat pre-pool
    tensor). shape is the evaluated tensor shape; params is informational.
    """

    model: str
    params: str
    corrembed: float | None
    inference_time: float
    shape: tuple[int, ...]


def _fixture_path(name: str):
    return resources.files("corrembed").joinpath("fixtures", name)


def _read_tsv(path_or_trav):
    if hasattr(path_or_trav, "read_text"):
        text = path_or_trav.read_text(encoding="utf-8")
    else:
        text = Path(path_or_trav).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if len(lines) < 2:
        raise DataError("fixture TSV needs a header and at least one row")
    header = lines[0].split("\t")
    for lineno, ln in enumerate(lines[1:], start=2):
        cells = ln.split("\t")
        if len(cells) != len(header):
            raise DataError(f"fixture TSV line {lineno}: {len(cells)} cells, expected {len(header)}")
        yield dict(zip(header, cells))


def load_output_scores(path=None) -> list[FixtureRow]:
    """The bundled output-layer score table (19 rows: 2 controls + 17 models)."""
    src = _fixture_path("output_layer_scores.tsv") if path is None else path
    rows = []
    for rec in _read_tsv(src):
        rows.append(
            FixtureRow(
                model=rec["model"],
                acc1=float(rec["acc1"]),
                acc5=float(rec["acc5"]),
                corrembed=float(rec["corrembed"]),
                unweighted=float(rec["unweighted"]),
                random=float(rec["random"]),
                shuffled=float(rec["shuffled"]),
            )
        )
    return rows


def load_penultimate_scores(path=None) -> list[PenultimateRow]:
    """The bundled penultimate-layer score table (17 model rows)."""
    src = _fixture_path("penultimate_layer_scores.tsv") if path is None else path
    rows = []
    for rec in _read_tsv(src):
        ce = rec["corrembed"]
        rows.append(
            PenultimateRow(
                model=rec["model"],
                params=rec["params"],
                corrembed=None if ce == "N/A" else float(ce),
                inference_time=float(rec["inference_time"]),
                shape=tuple(int(x) for x in rec["shape"].split("x")),
            )
        )
    return rows
