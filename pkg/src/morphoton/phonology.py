"""Universal phoneme inventory and phoneme <-> distinctive-feature mapping.

Phonemes are IPA segments (possibly multi-codepoint, e.g. ``t͡ʃ``). Each
phoneme is a unique ordered bundle of coarse distinctive features:
consonants carry (voicing, place, manner), vowels carry (height, backness,
roundness), and either may additionally carry ``long``. The shipped
inventory table is the implementer's reconstruction from the IPA chart;
only the /a/ and /g/ bundles are fixed by outside convention.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InventoryError, UnknownFeature, UnknownPhoneme

OOV_SYMBOL = "#"

# Canonical category order. A valid bundle is either consonantal
# (voicing, place, manner) or vocalic (height, backness, roundness),
# optionally followed by `long`, so one global order covers both.
CATEGORY_ORDER = (
    "voicing",
    "place",
    "manner",
    "height",
    "backness",
    "roundness",
    "length",
)

FEATURE_CATEGORIES: dict[str, str] = {}
for _cat, _names in {
    "voicing": ("voiced", "voiceless", "aspirated", "ejective"),
    "place": (
        "bilabial",
        "labiodental",
        "dental",
        "alveolar",
        "postalveolar",
        "palatal",
        "velar",
        "uvular",
        "glottal",
    ),
    "manner": (
        "plosive",
        "nasal",
        "trill",
        "fricative",
        "affricate",
        "approximant",
        "lateral",
    ),
    "height": (
        "close",
        "near-close",
        "close-mid",
        "mid",
        "open-mid",
        "near-open",
        "open",
    ),
    "backness": ("front", "central", "back"),
    "roundness": ("rounded", "unrounded"),
    "length": ("long",),
}.items():
    for _n in _names:
        FEATURE_CATEGORIES[_n] = _cat

_CONSONANT_CATS = ("voicing", "place", "manner")
_VOWEL_CATS = ("height", "backness", "roundness")


@dataclass(frozen=True)
class DistinctiveFeature:
    name: str
    category: str

    def __str__(self) -> str:
        return self.name


def feature(name: str) -> DistinctiveFeature:
    """Look up a feature by name, resolving its category."""
    cat = FEATURE_CATEGORIES.get(name)
    if cat is None:
        raise UnknownFeature(name)
    return DistinctiveFeature(name, cat)


@dataclass(frozen=True)
class Phoneme:
    symbol: str
    kind: str  # "vowel" or "consonant"
    features: tuple[str, ...]  # canonical order


def canonical_bundle(names: Iterable[str | DistinctiveFeature]) -> tuple[str, ...]:
    """Reorder feature names into the canonical category order.

    Raises UnknownFeature for names outside the feature inventory.
    Duplicate or categorically invalid bundles are returned as-is after
    sorting; validity is the inventory's concern, not this function's.
    """
    plain = [n.name if isinstance(n, DistinctiveFeature) else n for n in names]
    for n in plain:
        if n not in FEATURE_CATEGORIES:
            raise UnknownFeature(n)
    return tuple(sorted(plain, key=lambda n: (CATEGORY_ORDER.index(FEATURE_CATEGORIES[n]), n)))


class PhonemeInventory:
    """Immutable bijection between phoneme symbols and feature bundles."""

    def __init__(self, phonemes: Sequence[Phoneme], oov_symbol: str = OOV_SYMBOL):
        self.oov_symbol = oov_symbol
        self.phonemes: dict[str, Phoneme] = {}
        self.by_bundle: dict[tuple[str, ...], str] = {}
        for p in phonemes:
            self._validate(p)
            if p.symbol in self.phonemes:
                raise InventoryError(f"duplicate phoneme symbol {p.symbol!r}")
            if p.features in self.by_bundle:
                raise InventoryError(
                    f"phonemes {self.by_bundle[p.features]!r} and {p.symbol!r} "
                    f"share the bundle {p.features}"
                )
            self.phonemes[p.symbol] = p
            self.by_bundle[p.features] = p.symbol
        # Longest-first symbol list for greedy tokenization.
        self._symbols_by_len = sorted(self.phonemes, key=len, reverse=True)

    @staticmethod
    def _validate(p: Phoneme) -> None:
        if p.kind not in ("vowel", "consonant"):
            raise InventoryError(f"{p.symbol!r}: bad kind {p.kind!r}")
        cats = []
        for name in p.features:
            cat = FEATURE_CATEGORIES.get(name)
            if cat is None:
                raise InventoryError(f"{p.symbol!r}: unknown feature {name!r}")
            cats.append(cat)
        core = _VOWEL_CATS if p.kind == "vowel" else _CONSONANT_CATS
        expected = list(core)
        if len(cats) == len(core) + 1:
            expected.append("length")
        if cats != expected:
            raise InventoryError(
                f"{p.symbol!r}: bundle categories {cats} do not follow the "
                f"canonical {p.kind} order {expected}"
            )
        if canonical_bundle(p.features) != p.features:
            raise InventoryError(f"{p.symbol!r}: bundle not in canonical order")

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.phonemes

    def __len__(self) -> int:
        return len(self.phonemes)

    def __iter__(self):
        return iter(self.phonemes.values())

    def decompose(self, symbol: str) -> list[DistinctiveFeature]:
        """Return the canonical-order feature bundle of a phoneme symbol."""
        p = self.phonemes.get(symbol)
        if p is None:
            raise UnknownPhoneme(symbol)
        return [feature(n) for n in p.features]

    def compose(self, bundle: Iterable[str | DistinctiveFeature]) -> str:
        """Return the unique phoneme matching the bundle, or the OOV symbol.

        Bundle order is irrelevant: the input is canonically reordered
        before lookup. Unknown feature names raise UnknownFeature.
        """
        key = canonical_bundle(bundle)
        return self.by_bundle.get(key, self.oov_symbol)

    def tokenize(self, phoneme_string: str) -> list[str]:
        """Split a concatenated phoneme string into inventory symbols.

        Greedy longest-match; the OOV symbol passes through unchanged.
        """
        out: list[str] = []
        i = 0
        while i < len(phoneme_string):
            if phoneme_string[i] == self.oov_symbol:
                out.append(self.oov_symbol)
                i += 1
                continue
            for sym in self._symbols_by_len:
                if phoneme_string.startswith(sym, i):
                    out.append(sym)
                    i += len(sym)
                    break
            else:
                raise UnknownPhoneme(phoneme_string[i])
        return out


def decompose(symbol: str, inv: PhonemeInventory) -> list[DistinctiveFeature]:
    return inv.decompose(symbol)


def compose(bundle: Iterable[str | DistinctiveFeature], inv: PhonemeInventory) -> str:
    return inv.compose(bundle)


def _data_dir() -> Path:
    override = os.environ.get("MORPHOTON_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("morphoton") / "data"))


def default_inventory_path() -> Path:
    return _data_dir() / "inventory.tsv"


def load_inventory(path: str | Path | None = None) -> PhonemeInventory:
    """Load a phoneme inventory from a TSV table.

    Format: ``symbol<TAB>kind<TAB>feature1,feature2,feature3[,long]``,
    UTF-8, ``#``-prefixed comment lines and blank lines ignored.
    """
    path = Path(path) if path is not None else default_inventory_path()
    phonemes = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InventoryError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
            symbol, kind, feats = parts
            phonemes.append(Phoneme(symbol, kind, tuple(feats.split(","))))
    return PhonemeInventory(phonemes)
