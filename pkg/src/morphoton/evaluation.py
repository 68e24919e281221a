"""Grapheme-level metrics, result records, and aggregation arithmetic."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable, Sequence

from . import kernels


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    return kernels.levenshtein(kernels.encode_symbols(a), kernels.encode_symbols(b))


def evaluate(predictions: Sequence[str], golds: Sequence[str]) -> tuple[float, float]:
    """Exact-match fraction and mean edit distance over aligned pairs."""
    if len(predictions) != len(golds):
        raise ValueError(f"{len(predictions)} predictions vs {len(golds)} golds")
    if not golds:
        raise ValueError("cannot evaluate an empty pair list")
    exact = sum(p == g for p, g in zip(predictions, golds))
    total_ed = sum(edit_distance(p, g) for p, g in zip(predictions, golds))
    n = len(golds)
    return exact / n, total_ed / n


@dataclass
class EvalResult:
    language: str
    pos: str
    model: str  # "seq2seq" or "transducer"
    method: str  # "baseline", "feat_seq", "fusion"
    seed: int
    train_size: int
    exact_match: float
    mean_edit_distance: float
    n_samples: int

    def __post_init__(self):
        if not 0.0 <= self.exact_match <= 1.0:
            raise ValueError(f"exact_match out of range: {self.exact_match}")
        if self.mean_edit_distance < 0:
            raise ValueError(f"negative edit distance: {self.mean_edit_distance}")


CSV_HEADER = (
    "language",
    "pos",
    "model",
    "method",
    "seed",
    "train_size",
    "exact_match",
    "mean_edit_distance",
    "n_samples",
)


def write_results_csv(results: Iterable[EvalResult], path: str | Path, append: bool = False) -> None:
    path = Path(path)
    fresh = not (append and path.exists() and path.stat().st_size > 0)
    with open(path, "a" if append else "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        if fresh:
            writer.writeheader()
        for r in results:
            writer.writerow(asdict(r))


def read_results_csv(path: str | Path) -> list[EvalResult]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                EvalResult(
                    row["language"],
                    row["pos"],
                    row["model"],
                    row["method"],
                    int(row["seed"]),
                    int(row["train_size"]),
                    float(row["exact_match"]),
                    float(row["mean_edit_distance"]),
                    int(row["n_samples"]),
                )
            )
    return out


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _sample_std(xs: Sequence[float]) -> float:
    if len(xs) < 2:
        return 0.0
    mu = _mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / (len(xs) - 1))


@dataclass
class AggregateRow:
    group: dict[str, str]
    exact_match_mean: float
    exact_match_std: float
    edit_distance_mean: float
    edit_distance_std: float
    n_datasets: int
    n_results: int


def aggregate(results: Sequence[EvalResult], group_by: Sequence[str] = ("model", "method")) -> list[AggregateRow]:
    """Mean and sample stddev across seeds per language-POS dataset, then
    unweighted averaging across datasets within each group.

    A dataset is a (language, pos) pair; the per-dataset stddev is taken
    across its seeds, and the reported stddev is the unweighted mean of
    the per-dataset stddevs.
    """
    if not results:
        raise ValueError("aggregate() needs at least one result")
    groups: dict[tuple, dict[tuple, list[EvalResult]]] = {}
    for r in results:
        gkey = tuple(getattr(r, f) for f in group_by)
        dkey = (r.language, r.pos)
        groups.setdefault(gkey, {}).setdefault(dkey, []).append(r)
    rows = []
    for gkey in sorted(groups):
        datasets = groups[gkey]
        em_means, em_stds, ed_means, ed_stds = [], [], [], []
        n_results = 0
        for dkey in sorted(datasets):
            rs = datasets[dkey]
            n_results += len(rs)
            em_means.append(_mean([r.exact_match for r in rs]))
            em_stds.append(_sample_std([r.exact_match for r in rs]))
            ed_means.append(_mean([r.mean_edit_distance for r in rs]))
            ed_stds.append(_sample_std([r.mean_edit_distance for r in rs]))
        rows.append(
            AggregateRow(
                dict(zip(group_by, gkey)),
                _mean(em_means),
                _mean(em_stds),
                _mean(ed_means),
                _mean(ed_stds),
                len(datasets),
                n_results,
            )
        )
    return rows


def plot_series(results: Sequence[EvalResult]) -> dict[tuple[str, str, str, str], list[tuple[int, float, float]]]:
    """Per (language, pos, model, method): sorted (train_size, mean, std)
    learning-curve points for external plotting."""
    by_cell: dict[tuple, dict[int, list[float]]] = {}
    for r in results:
        key = (r.language, r.pos, r.model, r.method)
        by_cell.setdefault(key, {}).setdefault(r.train_size, []).append(r.exact_match)
    series = {}
    for key, sizes in by_cell.items():
        series[key] = [
            (size, _mean(vals), _sample_std(vals)) for size, vals in sorted(sizes.items())
        ]
    return series
