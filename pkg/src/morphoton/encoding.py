"""Token-sequence encodings for the three modeling regimes.

* ``baseline``  - forms as grapheme tokens.
* ``feat_seq``  - forms as distinctive-feature tokens, one bundle per
  phoneme, bundles separated by an explicit boundary token (bundles vary
  between 3 and 4 features, so decoding needs the delimiter).
* ``fusion``    - forms as phoneme tokens plus, per source phoneme, the
  list of its feature indices for the attention fusion layer.

Tag bundles are passed through unchanged in all three regimes; the
source layout is BOS tags SEP form SEP target-tags EOS.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .corpus import ReinflectionSample
from .errors import ConversionError, UnknownFeature
from .g2p import Grammar, transduce
from .phonology import OOV_SYMBOL, PhonemeInventory

logger = logging.getLogger(__name__)

PAD = "<pad>"
BOS = "<bos>"
EOS = "<eos>"
UNK = "<unk>"
SEP = "<sep>"
PHONEME_BOUNDARY = "<pb>"

SPECIALS = (PAD, BOS, EOS, UNK, SEP, PHONEME_BOUNDARY)

METHODS = ("baseline", "feat_seq", "fusion")


class Vocabulary:
    """Dense token<->index bijection with the special tokens first."""

    def __init__(self, tokens: list[str], kind: str):
        self.kind = kind
        self.tokens = list(SPECIALS) + [t for t in tokens if t not in SPECIALS]
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            dupes = [t for t in self.tokens if self.tokens.count(t) > 1]
            raise ValueError(f"duplicate tokens in vocabulary: {sorted(set(dupes))}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def encode(self, token: str) -> int:
        idx = self.index.get(token)
        if idx is None:
            logger.debug("token %r not in %s vocabulary, using UNK", token, self.kind)
            return self.index[UNK]
        return idx

    def decode(self, idx: int) -> str:
        return self.tokens[idx]

    def encode_all(self, tokens: list[str]) -> list[int]:
        return [self.encode(t) for t in tokens]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for t in self.tokens:
                fh.write(t + "\n")

    @classmethod
    def load(cls, path: str | Path, kind: str) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
        if tuple(tokens[: len(SPECIALS)]) != SPECIALS:
            raise ValueError(f"{path}: specials missing or out of order")
        return cls(tokens[len(SPECIALS):], kind)


@dataclass
class MethodVocabs:
    method: str
    src: Vocabulary
    trg: Vocabulary
    features: Vocabulary | None = None  # fusion only


@dataclass
class EncodedSample:
    src: list[int]
    trg: list[int]
    method: str
    src_feature_groups: list[list[int]] | None = None  # fusion only
    src_phoneme_positions: list[int] | None = None  # positions in src the groups refer to
    sample: ReinflectionSample | None = None


def form_to_phonemes(form: str, grammar: Grammar, inv: PhonemeInventory) -> list[str]:
    return inv.tokenize(transduce(form, grammar))


def form_to_features(
    form: str, grammar: Grammar, inv: PhonemeInventory
) -> tuple[list[str], list[list[str]]]:
    """Feature token sequence (with boundaries) and per-phoneme bundles."""
    bundles = [
        [f.name for f in inv.decompose(p)] for p in form_to_phonemes(form, grammar, inv)
    ]
    tokens: list[str] = []
    for i, bundle in enumerate(bundles):
        if i:
            tokens.append(PHONEME_BOUNDARY)
        tokens.extend(bundle)
    return tokens, bundles


def build_vocabularies(
    samples: list[ReinflectionSample],
    method: str,
    g2p_grammar: Grammar | None,
    inv: PhonemeInventory | None,
) -> MethodVocabs:
    """Collect tags and form symbols from the samples into vocabularies."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    tags: set[str] = set()
    symbols: set[str] = set()
    features: set[str] = set()
    for s in samples:
        tags.update(s.src_tags)
        tags.update(s.trg_tags)
        for form in (s.src_form, s.trg_form):
            if method == "baseline":
                symbols.update(form)
            else:
                for p in form_to_phonemes(form, g2p_grammar, inv):
                    if method == "fusion":
                        symbols.add(p)
                    bundle = {f.name for f in inv.decompose(p)}
                    (symbols if method == "feat_seq" else features).update(bundle)
    kind = {"baseline": "grapheme", "feat_seq": "feature", "fusion": "phoneme"}[method]
    src = Vocabulary(sorted(tags) + sorted(symbols), kind)
    trg = Vocabulary(sorted(symbols), kind)
    feats = Vocabulary(sorted(features), "feature") if method == "fusion" else None
    return MethodVocabs(method, src, trg, feats)


def _frame(src_tags, form_tokens, trg_tags, vocab: Vocabulary) -> list[int]:
    tokens = [BOS, *src_tags, SEP, *form_tokens, SEP, *trg_tags, EOS]
    return vocab.encode_all(tokens)


def encode_baseline(sample: ReinflectionSample, vocabs: MethodVocabs) -> EncodedSample:
    src = _frame(sample.src_tags, list(sample.src_form), sample.trg_tags, vocabs.src)
    trg = vocabs.trg.encode_all([BOS, *sample.trg_form, EOS])
    return EncodedSample(src, trg, "baseline", sample=sample)


def encode_features(
    sample: ReinflectionSample,
    g2p_grammar: Grammar,
    inv: PhonemeInventory,
    vocabs: MethodVocabs,
) -> EncodedSample:
    src_feats, _ = form_to_features(sample.src_form, g2p_grammar, inv)
    trg_feats, _ = form_to_features(sample.trg_form, g2p_grammar, inv)
    src = _frame(sample.src_tags, src_feats, sample.trg_tags, vocabs.src)
    trg = vocabs.trg.encode_all([BOS, *trg_feats, EOS])
    return EncodedSample(src, trg, "feat_seq", sample=sample)


def encode_fusion(
    sample: ReinflectionSample,
    g2p_grammar: Grammar,
    inv: PhonemeInventory,
    vocabs: MethodVocabs,
) -> EncodedSample:
    src_phonemes = form_to_phonemes(sample.src_form, g2p_grammar, inv)
    trg_phonemes = form_to_phonemes(sample.trg_form, g2p_grammar, inv)
    src = _frame(sample.src_tags, src_phonemes, sample.trg_tags, vocabs.src)
    trg = vocabs.trg.encode_all([BOS, *trg_phonemes, EOS])
    offset = 1 + len(sample.src_tags) + 1  # BOS + tags + SEP
    positions = list(range(offset, offset + len(src_phonemes)))
    groups = [
        vocabs.features.encode_all([f.name for f in inv.decompose(p)])
        for p in src_phonemes
    ]
    return EncodedSample(src, trg, "fusion", groups, positions, sample=sample)


def encode_sample(
    sample: ReinflectionSample,
    method: str,
    vocabs: MethodVocabs,
    g2p_grammar: Grammar | None = None,
    inv: PhonemeInventory | None = None,
) -> EncodedSample:
    if method == "baseline":
        return encode_baseline(sample, vocabs)
    if method == "feat_seq":
        return encode_features(sample, g2p_grammar, inv, vocabs)
    if method == "fusion":
        return encode_fusion(sample, g2p_grammar, inv, vocabs)
    raise ValueError(f"unknown method {method!r}")


def _phonemes_to_graphemes(symbols: list[str], p2g_grammar: Grammar) -> str:
    """P2G over a phoneme symbol list; OOV markers pass through, chunks
    that fail conversion collapse to the OOV marker."""
    out: list[str] = []
    chunk: list[str] = []

    def flush():
        if not chunk:
            return
        try:
            out.append(transduce("".join(chunk), p2g_grammar))
        except ConversionError:
            out.append(OOV_SYMBOL)
        chunk.clear()

    for sym in symbols:
        if sym == OOV_SYMBOL:
            flush()
            out.append(OOV_SYMBOL)
        else:
            chunk.append(sym)
    flush()
    return "".join(out)


def symbols_to_graphemes(
    tokens: list[str],
    method: str,
    inv: PhonemeInventory | None = None,
    p2g_grammar: Grammar | None = None,
) -> str:
    """Map a (possibly malformed) form-symbol sequence to graphemes.

    Never raises: every malformation maps into the OOV marker ``#``.
    """
    tokens = [t for t in tokens if t not in (PAD, BOS, EOS, SEP)]
    if method == "baseline":
        return "".join(OOV_SYMBOL if t in (UNK, PHONEME_BOUNDARY) else t for t in tokens)
    if method == "feat_seq":
        segments: list[list[str]] = [[]]
        for t in tokens:
            if t == PHONEME_BOUNDARY:
                segments.append([])
            else:
                segments[-1].append(t)
        phonemes = []
        for seg in segments:
            if not seg:
                continue
            try:
                phonemes.append(inv.compose(seg))
            except UnknownFeature:
                phonemes.append(OOV_SYMBOL)
        return _phonemes_to_graphemes(phonemes, p2g_grammar)
    if method == "fusion":
        phonemes = [t if t in inv else OOV_SYMBOL for t in tokens]
        return _phonemes_to_graphemes(phonemes, p2g_grammar)
    raise ValueError(f"unknown method {method!r}")


def decode_to_graphemes(
    prediction: list[int],
    method: str,
    vocabs: MethodVocabs,
    inv: PhonemeInventory | None = None,
    p2g_grammar: Grammar | None = None,
) -> str:
    """Map a model output (token ids) back to a grapheme string."""
    return symbols_to_graphemes(
        [vocabs.trg.decode(i) for i in prediction], method, inv, p2g_grammar
    )
