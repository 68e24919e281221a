import pytest

from morphoton.errors import InventoryError, UnknownFeature, UnknownPhoneme
from morphoton.phonology import (
    OOV_SYMBOL,
    Phoneme,
    PhonemeInventory,
    canonical_bundle,
    compose,
    decompose,
    feature,
)


def test_feature_lookup_resolves_category():
    assert feature("voiced").category == "voicing"
    assert feature("open").category == "height"
    assert feature("long").category == "length"


def test_unknown_feature_raises():
    with pytest.raises(UnknownFeature):
        feature("nasalized")


def test_canonical_bundle_reorders():
    assert canonical_bundle(["plosive", "velar", "voiced"]) == ("voiced", "velar", "plosive")
    assert canonical_bundle(["long", "unrounded", "open", "front"]) == (
        "open", "front", "unrounded", "long",
    )


def test_fixed_reference_bundles(inventory):
    # the two bundles pinned by outside convention
    assert [f.name for f in decompose("a", inventory)] == ["open", "front", "unrounded"]
    assert [f.name for f in decompose("g", inventory)] == ["voiced", "velar", "plosive"]


def test_bijection_over_full_inventory(inventory):
    for p in inventory:
        bundle = decompose(p.symbol, inventory)
        assert compose(bundle, inventory) == p.symbol


def test_compose_is_order_insensitive(inventory):
    assert compose(["velar", "plosive", "voiced"], inventory) == "g"


def test_compose_invalid_bundle_returns_oov(inventory):
    # a bundle no language in the inventory uses
    assert compose(["ejective", "glottal", "lateral"], inventory) == OOV_SYMBOL
    # wrong arity: a bare pair is never a valid bundle
    assert compose(["voiced", "velar"], inventory) == OOV_SYMBOL


def test_compose_unknown_feature_raises(inventory):
    with pytest.raises(UnknownFeature):
        compose(["voiced", "velar", "slippery"], inventory)


def test_decompose_unknown_phoneme_raises(inventory):
    with pytest.raises(UnknownPhoneme):
        decompose("q̰", inventory)


def test_length_is_a_feature_not_a_symbol(inventory):
    short = decompose("a", inventory)
    long_ = decompose("aː", inventory)
    assert [f.name for f in long_] == [f.name for f in short] + ["long"]


def test_affricates_are_single_phonemes(inventory):
    assert "t͡ʃ" in inventory
    assert "d͡ʒ" in inventory
    bundle = [f.name for f in decompose("t͡ʃ", inventory)]
    assert "affricate" in bundle


def test_tokenize_longest_match(inventory):
    assert inventory.tokenize("olad͡ʒak") == ["o", "l", "a", "d͡ʒ", "a", "k"]
    assert inventory.tokenize("aːa") == ["aː", "a"]


def test_tokenize_oov_passthrough(inventory):
    assert inventory.tokenize("#a") == ["#", "a"]


def test_tokenize_unknown_symbol_raises(inventory):
    with pytest.raises(UnknownPhoneme):
        inventory.tokenize("aZa")


def test_duplicate_bundle_rejected():
    a = Phoneme("x", "consonant", ("voiced", "velar", "plosive"))
    b = Phoneme("y", "consonant", ("voiced", "velar", "plosive"))
    with pytest.raises(InventoryError):
        PhonemeInventory([a, b])


def test_duplicate_symbol_rejected():
    a = Phoneme("x", "consonant", ("voiced", "velar", "plosive"))
    b = Phoneme("x", "consonant", ("voiceless", "velar", "plosive"))
    with pytest.raises(InventoryError):
        PhonemeInventory([a, b])


def test_non_canonical_bundle_rejected():
    bad = Phoneme("x", "consonant", ("plosive", "velar", "voiced"))
    with pytest.raises(InventoryError):
        PhonemeInventory([bad])


def test_vowel_with_consonant_features_rejected():
    bad = Phoneme("x", "vowel", ("voiced", "velar", "plosive"))
    with pytest.raises(InventoryError):
        PhonemeInventory([bad])
