"""Exception hierarchy shared across the toolkit."""


class MorphotonError(Exception):
    """Base class for all toolkit errors."""


class UnknownPhoneme(MorphotonError):
    """A symbol was looked up that is not in the phoneme inventory."""

    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(f"unknown phoneme symbol: {symbol!r}")


class UnknownFeature(MorphotonError):
    """A feature name was used that is not in the feature inventory."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown distinctive feature: {name!r}")


class InventoryError(MorphotonError):
    """The phoneme inventory file is malformed or inconsistent."""


class GrammarError(MorphotonError):
    """A grammar file failed to parse or validate."""


class ConversionError(MorphotonError):
    """Transduction hit a symbol no rule covers."""

    def __init__(self, word: str, position: int, symbol: str):
        self.word = word
        self.position = position
        self.symbol = symbol
        super().__init__(
            f"no rule covers {symbol!r} at position {position} in {word!r}"
        )


class EmptyCorpus(MorphotonError):
    """No lemma in the corpus admits a reinflection pair."""


class SplitError(MorphotonError):
    """The corpus cannot be split under the lemma-disjointness constraint."""


class MalformedScript(MorphotonError):
    """An edit script does not consume its source exactly."""


class CheckpointError(MorphotonError):
    """A model checkpoint file is unreadable or of an unknown version."""
