"""Pipeline glue: dataset encoding for both models, training entry
points, checkpoint evaluation, and the learning-curve harness."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import transducer as td
from .corpus import ReinflectionSample, SplitDataset
from .encoding import (
    BOS,
    EOS,
    SPECIALS,
    PHONEME_BOUNDARY,
    EncodedSample,
    MethodVocabs,
    Vocabulary,
    build_vocabularies,
    decode_to_graphemes,
    encode_sample,
    form_to_features,
    form_to_phonemes,
    symbols_to_graphemes,
)
from .evaluation import EvalResult, evaluate, read_results_csv, write_results_csv
from .g2p import Grammar, load_language_grammar
from .nn.checkpoint import ModelCheckpoint
from .nn.model import Hyperparameters, Seq2SeqModel
from .nn.training import TrainResult, train_model
from .phonology import PhonemeInventory, load_inventory

logger = logging.getLogger(__name__)

MODELS = ("seq2seq", "transducer")

# bundled corpus file and the POS it covers, per language
CORPORA = {
    "tr": ("tur.v.tsv", "V"),
    "fi": ("fin.n.tsv", "N"),
    "ka": ("kat.n.tsv", "N"),
}


def corpus_path(language: str) -> Path:
    from .phonology import _data_dir

    if language not in CORPORA:
        raise ValueError(f"no bundled corpus for language {language!r}")
    return _data_dir() / "unimorph" / CORPORA[language][0]


@dataclass
class LanguageContext:
    """Shared conversion resources for one language."""

    language: str
    inventory: PhonemeInventory
    g2p: Grammar
    p2g: Grammar


def load_context(language: str) -> LanguageContext:
    return LanguageContext(
        language,
        load_inventory(),
        load_language_grammar(language, "g2p"),
        load_language_grammar(language, "p2g"),
    )


def form_symbols(form: str, method: str, ctx: LanguageContext) -> list[str]:
    """The method-specific symbol sequence of a form."""
    if method == "baseline":
        return list(form)
    if method == "feat_seq":
        return form_to_features(form, ctx.g2p, ctx.inventory)[0]
    if method == "fusion":
        return form_to_phonemes(form, ctx.g2p, ctx.inventory)
    raise ValueError(f"unknown method {method!r}")


# --- transducer dataset construction -----------------------------------------


def build_transducer_vocabs(
    samples: list[ReinflectionSample], method: str, ctx: LanguageContext
) -> MethodVocabs:
    """Source vocab as in seq2seq; target vocab over edit-action tokens."""
    base = build_vocabularies(samples, method, ctx.g2p, ctx.inventory)
    # <pb> is a genuine target symbol for feat_seq, so only the framing
    # specials are excluded from the insertable set
    framing = set(SPECIALS) - {PHONEME_BOUNDARY}
    symbols = sorted(set(base.trg.tokens) - framing)
    actions = [td.ACTION_COPY, td.ACTION_DELETE] + [
        td.action_token(td.EditAction(td.INSERT, s)) for s in symbols
    ]
    return MethodVocabs(method, base.src, Vocabulary(actions, "action"), base.features)


def encode_transducer_sample(
    sample: ReinflectionSample, method: str, vocabs: MethodVocabs, ctx: LanguageContext
) -> EncodedSample:
    """Source as in seq2seq; target is the oracle edit-action sequence."""
    # the src vocabulary covers both forms' symbols, so reusing it on the
    # target side keeps encode_sample quiet; enc.trg is discarded below
    shim = MethodVocabs(method, vocabs.src, vocabs.src, vocabs.features)
    enc = encode_sample(sample, method, shim, ctx.g2p, ctx.inventory)
    src_syms = form_symbols(sample.src_form, method, ctx)
    trg_syms = form_symbols(sample.trg_form, method, ctx)
    script = td.oracle_align(src_syms, trg_syms)
    actions = [BOS] + [td.action_token(a) for a in script.actions] + [EOS]
    return EncodedSample(
        enc.src,
        vocabs.trg.encode_all(actions),
        method,
        enc.src_feature_groups,
        enc.src_phoneme_positions,
        sample=sample,
    )


def encode_dataset(
    samples: list[ReinflectionSample],
    model_type: str,
    method: str,
    vocabs: MethodVocabs,
    ctx: LanguageContext,
) -> list[EncodedSample]:
    if model_type == "transducer":
        return [encode_transducer_sample(s, method, vocabs, ctx) for s in samples]
    return [encode_sample(s, method, vocabs, ctx.g2p, ctx.inventory) for s in samples]


def build_vocabs(
    samples: list[ReinflectionSample], model_type: str, method: str, ctx: LanguageContext
) -> MethodVocabs:
    if model_type == "transducer":
        return build_transducer_vocabs(samples, method, ctx)
    return build_vocabularies(samples, method, ctx.g2p, ctx.inventory)


# --- prediction ---------------------------------------------------------------


def predict_graphemes(
    model: Seq2SeqModel,
    encoded: EncodedSample,
    model_type: str,
    ctx: LanguageContext,
) -> str:
    """Greedy decode one sample and map the output to graphemes."""
    ids, _ = model.decode_greedy(encoded)
    method = encoded.method
    if model_type == "transducer":
        tokens = [model.vocabs.trg.decode(i) for i in ids]
        actions = [a for a in map(td.token_to_action, tokens) if a is not None]
        src_syms = form_symbols(encoded.sample.src_form, method, ctx)
        script = td.repair_actions(actions, len(src_syms))
        out_syms = td.apply(script, src_syms)
        return symbols_to_graphemes(out_syms, method, ctx.inventory, ctx.p2g)
    return decode_to_graphemes(ids, method, model.vocabs, ctx.inventory, ctx.p2g)


def evaluate_model(
    model: Seq2SeqModel,
    encoded: list[EncodedSample],
    model_type: str,
    ctx: LanguageContext,
) -> tuple[float, float]:
    preds = [predict_graphemes(model, e, model_type, ctx) for e in encoded]
    golds = [e.sample.trg_form for e in encoded]
    return evaluate(preds, golds)


# --- training entry point -----------------------------------------------------


def train_on_split(
    dataset: SplitDataset,
    model_type: str,
    method: str,
    hp: Hyperparameters,
    ctx: LanguageContext,
    metadata: dict | None = None,
    stop_at_perfect_dev: bool = False,
) -> TrainResult:
    """Build vocabularies from the train portion, encode, and train."""
    if model_type not in MODELS:
        raise ValueError(f"unknown model type {model_type!r}")
    vocabs = build_vocabs(dataset.train, model_type, method, ctx)
    train_enc = encode_dataset(dataset.train, model_type, method, vocabs, ctx)
    dev_enc = encode_dataset(dataset.dev, model_type, method, vocabs, ctx)
    model = Seq2SeqModel(hp, vocabs, rng=np.random.default_rng(hp.seed))
    result = train_model(
        model, train_enc, dev_enc, hp,
        model_type=model_type, stop_at_perfect_dev=stop_at_perfect_dev,
    )
    if metadata:
        result.checkpoint.metadata.update(metadata)
    return result


def evaluate_checkpoint(
    checkpoint: ModelCheckpoint,
    samples: list[ReinflectionSample],
    ctx: LanguageContext,
) -> tuple[float, float]:
    model = checkpoint.build_model()
    encoded = encode_dataset(samples, checkpoint.model_type, checkpoint.method, checkpoint.vocabs, ctx)
    return evaluate_model(model, encoded, checkpoint.model_type, ctx)


# --- learning curves ----------------------------------------------------------


def nested_subsample(
    samples: list[ReinflectionSample], size: int, seed: int
) -> list[ReinflectionSample]:
    """Seeded prefix subsample: for one seed, smaller sizes are subsets of
    larger ones, which reduces variance between adjacent curve points."""
    if size > len(samples):
        raise ValueError(f"requested {size} of {len(samples)} train samples")
    order = np.random.default_rng(seed).permutation(len(samples))
    return [samples[i] for i in order[:size]]


def learning_curve(
    dataset: SplitDataset,
    sizes: list[int],
    seeds: list[int],
    language: str,
    pos: str,
    method: str,
    model_type: str,
    hp: Hyperparameters,
    ctx: LanguageContext,
    shard_dir: str | Path | None = None,
) -> list[EvalResult]:
    """Train one model per (size, seed) cell and evaluate on the fixed
    test set. With a shard directory, completed cells are skipped on
    resume and re-read from their shard CSVs."""
    if shard_dir is not None:
        shard_dir = Path(shard_dir)
        shard_dir.mkdir(parents=True, exist_ok=True)
    results: list[EvalResult] = []
    for seed in seeds:
        for size in sizes:
            shard = (
                shard_dir / f"{language}_{pos}_{model_type}_{method}_{size}_{seed}.csv"
                if shard_dir is not None
                else None
            )
            if shard is not None and shard.exists():
                results.extend(read_results_csv(shard))
                continue
            cell_hp = Hyperparameters.from_dict({**hp.to_dict(), "seed": seed})
            sub = SplitDataset(
                nested_subsample(dataset.train, size, seed), dataset.dev, dataset.test, seed
            )
            trained = train_on_split(sub, model_type, method, cell_hp, ctx)
            em, med = evaluate_checkpoint(trained.checkpoint, dataset.test, ctx)
            row = EvalResult(
                language, pos, model_type, method, seed, size, em, med, len(dataset.test)
            )
            logger.info(
                "learning curve %s/%s %s %s size=%d seed=%d: EM %.3f",
                language, pos, model_type, method, size, seed, em,
            )
            if shard is not None:
                write_results_csv([row], shard)
            results.append(row)
    results.sort(key=lambda r: (r.language, r.pos, r.model, r.method, r.seed, r.train_size))
    return results


def feature_length_ratio(samples: list[ReinflectionSample], ctx: LanguageContext) -> float:
    """Mean per-form ratio of feature-sequence length to grapheme length."""
    ratios = []
    for s in samples:
        for form in (s.src_form, s.trg_form):
            tokens, _ = form_to_features(form, ctx.g2p, ctx.inventory)
            ratios.append(len(tokens) / len(form))
    return float(np.mean(ratios))
