"""UniMorph ingestion, reinflection sampling, and lemma-disjoint splits.

All operations are pure functions of their inputs plus an integer seed,
so prepared datasets are byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyCorpus, SplitError


@dataclass(frozen=True)
class InflectedForm:
    lemma: str
    form: str
    tags: tuple[str, ...]  # split on ';', order preserved


@dataclass(frozen=True)
class ReinflectionSample:
    lemma: str
    src_tags: tuple[str, ...]
    src_form: str
    trg_tags: tuple[str, ...]
    trg_form: str


@dataclass
class SplitDataset:
    train: list[ReinflectionSample]
    dev: list[ReinflectionSample]
    test: list[ReinflectionSample]
    seed: int
    warnings: list[str] = field(default_factory=list)


def parse_unimorph(
    path: str | Path, pos: str | None = None
) -> tuple[list[InflectedForm], list[str]]:
    """Parse a UniMorph TSV (lemma<TAB>form<TAB>tag;tag;...).

    Malformed lines are skipped and reported in the returned warning
    list, not raised. `pos` keeps only entries whose first tag matches
    (UniMorph puts the part of speech first).
    """
    forms: list[InflectedForm] = []
    warnings: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3 or not cols[1] or not cols[2]:
                warnings.append(f"line {lineno}: malformed ({line!r})")
                continue
            lemma, form, tagstr = cols
            tags = tuple(t for t in tagstr.split(";") if t)
            if not tags:
                warnings.append(f"line {lineno}: empty tag bundle")
                continue
            if pos is not None and tags[0] != pos:
                continue
            forms.append(InflectedForm(lemma, form, tags))
    return forms, warnings


def _paradigms(forms: list[InflectedForm]) -> dict[str, dict[tuple[str, ...], str]]:
    """Group forms by lemma; first form wins on duplicate tag bundles."""
    by_lemma: dict[str, dict[tuple[str, ...], str]] = {}
    for f in forms:
        slot = by_lemma.setdefault(f.lemma, {})
        slot.setdefault(f.tags, f.form)
    return by_lemma


def sample_reinflection(
    forms: list[InflectedForm], n: int, seed: int
) -> list[ReinflectionSample]:
    """Sample n ordered (src, trg) pairs of distinct-tag forms per lemma.

    Samples without replacement over (lemma, src_tags, trg_tags) triples
    until the pool is exhausted, then with replacement. Deterministic
    given the seed.
    """
    pool: list[ReinflectionSample] = []
    for lemma, paradigm in sorted(_paradigms(forms).items()):
        slots = sorted(paradigm.items())
        if len(slots) < 2:
            continue  # paradigm of size 1 admits no pair
        for src_tags, src_form in slots:
            for trg_tags, trg_form in slots:
                if src_tags != trg_tags:
                    pool.append(
                        ReinflectionSample(lemma, src_tags, src_form, trg_tags, trg_form)
                    )
    if not pool:
        raise EmptyCorpus("no lemma has two forms with distinct tag bundles")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pool))
    samples = [pool[i] for i in order[: min(n, len(pool))]]
    while len(samples) < n:
        samples.append(pool[int(rng.integers(len(pool)))])
    return samples


def split_by_lemma(
    samples: list[ReinflectionSample],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> SplitDataset:
    """Split samples into train/dev/test with pairwise-disjoint lemma sets.

    Lemmas are shuffled by the seed and assigned greedily to the bucket
    with the largest remaining sample-count deficit, so the realized
    ratios approach the targets up to whole-lemma rounding.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise SplitError(f"ratios must sum to 1, got {ratios}")
    by_lemma: dict[str, list[ReinflectionSample]] = {}
    for s in samples:
        by_lemma.setdefault(s.lemma, []).append(s)
    lemmas = sorted(by_lemma)
    if len(lemmas) < 3:
        raise SplitError(f"need at least 3 distinct lemmas, got {len(lemmas)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(lemmas))
    total = len(samples)
    targets = [r * total for r in ratios]
    buckets: list[list[ReinflectionSample]] = [[], [], []]
    counts = [0, 0, 0]
    assigned = [0, 0, 0]  # lemma counts, to keep every bucket non-empty
    for idx in order:
        group = by_lemma[lemmas[idx]]
        deficits = [targets[b] - counts[b] for b in range(3)]
        # A bucket that would otherwise stay empty takes priority.
        empties = [b for b in range(3) if assigned[b] == 0]
        b = min(empties, key=lambda x: targets[x]) if (
            empties and len(lemmas) - sum(assigned) <= len(empties)
        ) else int(np.argmax(deficits))
        buckets[b].append(group)
        counts[b] += len(group)
        assigned[b] += 1
    train, dev, test = ([s for group in b for s in group] for b in buckets)
    return SplitDataset(train, dev, test, seed)


# ---------------------------------------------------------------------------
# Persistence: dataset TSV + sidecar manifest.

_COLUMNS = ("src_tags", "src_form", "trg_tags", "trg_form", "lemma")


def write_samples(samples: list[ReinflectionSample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(
                "\t".join(
                    (";".join(s.src_tags), s.src_form, ";".join(s.trg_tags), s.trg_form, s.lemma)
                )
                + "\n"
            )


def read_samples(path: str | Path) -> list[ReinflectionSample]:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            src_tags, src_form, trg_tags, trg_form, lemma = line.split("\t")
            samples.append(
                ReinflectionSample(
                    lemma,
                    tuple(src_tags.split(";")),
                    src_form,
                    tuple(trg_tags.split(";")),
                    trg_form,
                )
            )
    return samples


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_split(dataset: SplitDataset, out_dir: str | Path, manifest_extra: dict | None = None) -> dict:
    """Write train/dev/test TSVs plus a manifest with seed, counts, hashes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"seed": dataset.seed, "counts": {}, "hashes": {}}
    for name, part in (("train", dataset.train), ("dev", dataset.dev), ("test", dataset.test)):
        path = out_dir / f"{name}.tsv"
        write_samples(part, path)
        manifest["counts"][name] = len(part)
        manifest["hashes"][name] = file_sha256(path)
    if manifest_extra:
        manifest.update(manifest_extra)
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return manifest


def read_split(in_dir: str | Path) -> SplitDataset:
    in_dir = Path(in_dir)
    with open(in_dir / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    return SplitDataset(
        read_samples(in_dir / "train.tsv"),
        read_samples(in_dir / "dev.tsv"),
        read_samples(in_dir / "test.tsv"),
        manifest.get("seed", 0),
    )
