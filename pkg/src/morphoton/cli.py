"""Command-line entry point.

One binary with subcommands; every artifact-producing command drops a
run manifest beside its outputs. Exit codes: 0 success, 1 quality
threshold missed, 2 usage or configuration error, 3 runtime error.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
import time
from pathlib import Path

import click

from . import __version__, experiments
from .corpus import (
    file_sha256,
    parse_unimorph,
    read_samples,
    read_split,
    sample_reinflection,
    split_by_lemma,
    write_split,
)
from .errors import ConversionError, MorphotonError
from .evaluation import EvalResult, plot_series, read_results_csv, write_results_csv
from .g2p import load_language_grammar, transduce
from .nn.checkpoint import ModelCheckpoint
from .nn.model import Hyperparameters
from .phonology import load_inventory

logger = logging.getLogger(__name__)

LANGUAGES = ("tr", "fi", "ka")
METHOD_ALIASES = {"baseline": "baseline", "feat": "feat_seq", "fuse": "fusion"}

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def write_manifest(
    out_dir: Path,
    command: str,
    config: dict,
    inputs: list[Path],
    outputs: list[Path],
    seeds: list[int] | None = None,
) -> Path:
    manifest = {
        "command_line": sys.argv,
        "command": command,
        "config": config,
        "seeds": seeds or [],
        "input_hashes": {str(p): file_sha256(p) for p in inputs if Path(p).exists()},
        "outputs": [str(p) for p in outputs],
        "toolkit_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    path = out_dir / f"manifest_{command}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return path


def _check_language(lang: str) -> None:
    if lang not in LANGUAGES:
        click.echo(f"unknown language code {lang!r} (expected one of {', '.join(LANGUAGES)})", err=True)
        sys.exit(EXIT_USAGE)


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
@click.version_option(__version__)
def main(verbose: bool) -> None:
    """Phonologically-aware morphological reinflection toolkit."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--lang", required=True, help="Language code (tr, fi, ka).")
@click.option("--direction", type=click.Choice(["g2p", "p2g"]), required=True)
@click.option("--in", "in_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
def convert(lang: str, direction: str, in_path: Path, out_path: Path) -> None:
    """Transduce a file line by line.

    For g2p, each input line is a written form and each output line is
    the space-separated phoneme sequence. For p2g, the reverse.
    """
    _check_language(lang)
    grammar = load_language_grammar(lang, direction)
    inv = load_inventory()
    lines_out = []
    for lineno, line in enumerate(in_path.read_text(encoding="utf-8").splitlines(), 1):
        word = line.strip()
        if not word:
            lines_out.append("")
            continue
        try:
            if direction == "g2p":
                lines_out.append(" ".join(inv.tokenize(transduce(word, grammar))))
            else:
                lines_out.append(transduce(word.replace(" ", ""), grammar))
        except ConversionError as exc:
            click.echo(f"{in_path}:{lineno}: cannot convert {word!r}: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines_out) + ("\n" if lines_out else ""), encoding="utf-8")
    write_manifest(
        out_path.parent, "convert",
        {"lang": lang, "direction": direction}, [in_path], [out_path],
    )


@main.command()
@click.option("--unimorph", type=click.Path(exists=True, path_type=Path), default=None,
              help="UniMorph TSV; defaults to the bundled corpus for --lang.")
@click.option("--lang", required=True)
@click.option("--pos", default=None, help="POS filter; defaults to the bundled corpus POS.")
@click.option("--n", default=10000, show_default=True, help="Number of reinflection samples.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), required=True)
def prepare(unimorph: Path | None, lang: str, pos: str | None, n: int, seed: int, out_dir: Path) -> None:
    """Sample reinflection pairs and write lemma-disjoint splits."""
    _check_language(lang)
    if unimorph is None:
        unimorph = experiments.corpus_path(lang)
    if pos is None:
        pos = experiments.CORPORA[lang][1]
    try:
        forms, warnings = parse_unimorph(unimorph, pos=pos)
        for w in warnings:
            logger.warning("%s", w)
        samples = sample_reinflection(forms, n, seed)
        dataset = split_by_lemma(samples, seed=seed)
    except MorphotonError as exc:
        click.echo(f"prepare failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_split(dataset, out_dir, manifest_extra={"language": lang, "pos": pos, "n": n})
    write_manifest(
        out_dir, "prepare",
        {"lang": lang, "pos": pos, "n": n, "seed": seed, "unimorph": str(unimorph)},
        [unimorph],
        [out_dir / f"{part}.tsv" for part in ("train", "dev", "test")],
        seeds=[seed],
    )
    click.echo(
        f"wrote {len(dataset.train)}/{len(dataset.dev)}/{len(dataset.test)} samples to {out_dir}"
    )


def _load_hp(hp_file: Path | None, seed: int) -> Hyperparameters:
    base = {}
    if hp_file is not None:
        base = json.loads(hp_file.read_text(encoding="utf-8"))
    base["seed"] = seed
    try:
        return Hyperparameters.from_dict({**Hyperparameters().to_dict(), **base})
    except (TypeError, ValueError) as exc:
        click.echo(f"bad hyperparameter file: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _dataset_language(dataset_dir: Path, lang: str | None, pos: str | None) -> tuple[str, str]:
    manifest = dataset_dir / "manifest.json"
    if manifest.exists():
        meta = json.loads(manifest.read_text(encoding="utf-8"))
        lang = lang or meta.get("language")
        pos = pos or meta.get("pos")
    if lang is None or pos is None:
        click.echo("dataset manifest lacks language/pos; pass --lang and --pos", err=True)
        sys.exit(EXIT_USAGE)
    return lang, pos


@main.command()
@click.option("--dataset-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--model", "model_type", type=click.Choice(["seq2seq", "transducer"]), default="seq2seq", show_default=True)
@click.option("--method", type=click.Choice(sorted(METHOD_ALIASES)), required=True)
@click.option("--hp-file", type=click.Path(exists=True, path_type=Path), default=None,
              help="JSON file of hyperparameter overrides.")
@click.option("--seed", default=0, show_default=True)
@click.option("--lang", default=None, help="Override the dataset manifest language.")
@click.option("--pos", default=None, help="Override the dataset manifest POS.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Checkpoint path; defaults to <dataset-dir>/<model>_<method>.ckpt.")
def train(dataset_dir: Path, model_type: str, method: str, hp_file: Path | None,
          seed: int, lang: str | None, pos: str | None, out_path: Path | None) -> None:
    """Train one model on a prepared dataset and save the best-dev checkpoint."""
    method = METHOD_ALIASES[method]
    lang, pos = _dataset_language(dataset_dir, lang, pos)
    _check_language(lang)
    hp = _load_hp(hp_file, seed)
    if out_path is None:
        out_path = dataset_dir / f"{model_type}_{method}.ckpt"
    ctx = experiments.load_context(lang)
    dataset = read_split(dataset_dir)
    if method == "feat_seq":
        ratio = experiments.feature_length_ratio(dataset.train, ctx)
        logger.info("feature/grapheme length ratio on train: %.2f", ratio)
    result = experiments.train_on_split(
        dataset, model_type, method, hp, ctx,
        metadata={"language": lang, "pos": pos, "train_size": len(dataset.train)},
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    result.checkpoint.save(out_path)
    history_path = out_path.with_suffix(".history.csv")
    with open(history_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["epoch", "train_loss", "dev_exact_match"])
        writer.writeheader()
        writer.writerows(result.history)
    write_manifest(
        out_path.parent, "train",
        {"model": model_type, "method": method, "lang": lang, "pos": pos, "hp": hp.to_dict()},
        [dataset_dir / f"{part}.tsv" for part in ("train", "dev", "test")],
        [out_path, history_path],
        seeds=[seed],
    )
    if result.diverged:
        click.echo("training diverged; last good checkpoint saved", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(
        f"saved {out_path} (best dev exact match "
        f"{result.checkpoint.metadata['dev_exact_match']:.3f} "
        f"at epoch {result.checkpoint.metadata['best_epoch']})"
    )


@main.command()
@click.option("--checkpoint", "checkpoint_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--test", "test_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True,
              help="Results CSV; the row is appended if the file exists.")
def evaluate(checkpoint_path: Path, test_path: Path, out_path: Path) -> None:
    """Decode a test TSV with a checkpoint and append one results row."""
    try:
        ckpt = ModelCheckpoint.load(checkpoint_path)
        lang = ckpt.metadata.get("language")
        if lang not in LANGUAGES:
            click.echo(f"checkpoint lacks a known language code ({lang!r})", err=True)
            sys.exit(EXIT_USAGE)
        ctx = experiments.load_context(lang)
        samples = read_samples(test_path)
        em, med = experiments.evaluate_checkpoint(ckpt, samples, ctx)
    except (MorphotonError, ValueError) as exc:
        click.echo(f"evaluation failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    row = EvalResult(
        lang, ckpt.metadata.get("pos", "?"), ckpt.model_type, ckpt.method,
        ckpt.metadata.get("seed", 0), ckpt.metadata.get("train_size", 0),
        em, med, len(samples),
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_results_csv([row], out_path, append=out_path.exists())
    write_manifest(
        out_path.parent, "evaluate",
        {"checkpoint": str(checkpoint_path), "test": str(test_path)},
        [checkpoint_path, test_path], [out_path],
    )
    click.echo(f"exact match {em:.4f}, mean edit distance {med:.4f} ({len(samples)} samples)")


def _parse_sizes(spec: str) -> list[int]:
    try:
        parts = [int(x) for x in spec.split(":")]
        if len(parts) == 1:
            return parts
        start, stop, step = parts
        if step <= 0 or stop < start:
            raise ValueError
        return list(range(start, stop + 1, step))
    except ValueError:
        raise click.UsageError(f"bad --sizes spec {spec!r}; expected START:STOP:STEP")


@main.command("learning-curve")
@click.option("--dataset-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--sizes", default="1000:8000:1000", show_default=True, help="START:STOP:STEP train sizes.")
@click.option("--seeds", default=3, show_default=True, help="Number of seeds (0..N-1).")
@click.option("--methods", default="all", show_default=True,
              help="Comma-separated subset of baseline,feat,fuse, or 'all'.")
@click.option("--model", "model_type", type=click.Choice(["seq2seq", "transducer"]), default="seq2seq", show_default=True)
@click.option("--hp-file", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--lang", default=None)
@click.option("--pos", default=None)
@click.option("--out-dir", type=click.Path(path_type=Path), required=True)
def learning_curve(dataset_dir: Path, sizes: str, seeds: int, methods: str, model_type: str,
                   hp_file: Path | None, lang: str | None, pos: str | None, out_dir: Path) -> None:
    """Sweep train sizes and seeds; emit a results CSV and plot data.

    Completed (size, seed) cells are stored as shard CSVs and skipped on
    resume, so an interrupted sweep can be rerun with the same flags.
    """
    size_list = _parse_sizes(sizes)
    if methods == "all":
        method_list = list(METHOD_ALIASES)
    else:
        method_list = [m.strip() for m in methods.split(",")]
        bad = [m for m in method_list if m not in METHOD_ALIASES]
        if bad:
            raise click.UsageError(f"unknown methods: {', '.join(bad)}")
    lang, pos = _dataset_language(dataset_dir, lang, pos)
    _check_language(lang)
    hp = _load_hp(hp_file, 0)
    ctx = experiments.load_context(lang)
    dataset = read_split(dataset_dir)
    if max(size_list) > len(dataset.train):
        click.echo(
            f"largest size {max(size_list)} exceeds train set ({len(dataset.train)})", err=True,
        )
        sys.exit(EXIT_USAGE)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed_list = list(range(seeds))
    results = []
    for alias in method_list:
        results.extend(experiments.learning_curve(
            dataset, size_list, seed_list, lang, pos, METHOD_ALIASES[alias],
            model_type, hp, ctx, shard_dir=out_dir / "shards",
        ))
    csv_path = out_dir / "results.csv"
    write_results_csv(results, csv_path)
    series = plot_series(results)
    plot_path = out_dir / "plot_data.json"
    plot_path.write_text(
        json.dumps({"|".join(k): v for k, v in series.items()}, indent=2, sort_keys=True),
        encoding="utf-8",
    )
    write_manifest(
        out_dir, "learning-curve",
        {"sizes": size_list, "seeds": seed_list, "methods": method_list,
         "model": model_type, "lang": lang, "pos": pos, "hp": hp.to_dict()},
        [dataset_dir / f"{part}.tsv" for part in ("train", "dev", "test")],
        [csv_path, plot_path],
        seeds=seed_list,
    )
    click.echo(f"wrote {len(results)} rows to {csv_path}")


@main.command()
@click.option("--lang", required=True)
@click.option("--unimorph", type=click.Path(exists=True, path_type=Path), default=None,
              help="Corpus to audit; defaults to the bundled corpus for --lang.")
@click.option("--pos", default=None)
def audit(lang: str, unimorph: Path | None, pos: str | None) -> None:
    """Round-trip every corpus form through g2p then p2g and report."""
    _check_language(lang)
    if unimorph is None:
        unimorph = experiments.corpus_path(lang)
    if pos is None:
        pos = experiments.CORPORA[lang][1]
    try:
        ctx = experiments.load_context(lang)
        forms, _ = parse_unimorph(unimorph, pos=pos)
        words = sorted({f.form for f in forms} | {f.lemma for f in forms})
        from .g2p import roundtrip_audit

        report = roundtrip_audit(ctx.g2p, ctx.p2g, words)
    except MorphotonError as exc:
        click.echo(f"audit failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"{lang}: {report.passed}/{report.total} round trips pass "
               f"(rate {report.pass_rate:.4f})")
    for word, got in report.failures:
        click.echo(f"  FAIL {word!r} -> {got!r}")
    if report.pass_rate < 0.99:
        sys.exit(EXIT_THRESHOLD)


if __name__ == "__main__":
    main()
