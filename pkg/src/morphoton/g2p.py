"""Rule-based grapheme<->phoneme conversion for shallow orthographies.

A grammar is an ordered list of contextual rewrite rules applied in a
single left-to-right pass over the input: at each position the
longest-matching rule whose contexts hold fires, its replacement is
emitted, and the scan advances past the matched pattern. Contexts are
checked against the input tape only, never against emitted output, so
rule application cannot feed itself.

Grammar file format (UTF-8 text, ``;`` starts a comment):

    language: tr
    direction: g2p
    alphabet: a b c ç ...
    pattern -> replacement
    pattern -> replacement / left _ right
    override: pattern -> replacement

``#`` inside a context means a word boundary. An empty replacement
deletes the pattern. ``override:`` lines resolve ambiguous patterns
toward the replacement that is more frequent in the language's corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConversionError, GrammarError
from .phonology import _data_dir

BOUNDARY = "#"


@dataclass(frozen=True)
class RewriteRule:
    pattern: str
    replacement: str
    left_context: str | None
    right_context: str | None
    rank: int

    def __post_init__(self):
        if not self.pattern:
            raise GrammarError("rule pattern must be non-empty")

    def matches(self, word: str, pos: int) -> bool:
        if not word.startswith(self.pattern, pos):
            return False
        lc, rc = self.left_context, self.right_context
        if lc:
            anchored = lc.startswith(BOUNDARY)
            text = lc[1:] if anchored else lc
            start = pos - len(text)
            if start < 0 or word[start:pos] != text:
                return False
            if anchored and start != 0:
                return False
        end = pos + len(self.pattern)
        if rc:
            anchored = rc.endswith(BOUNDARY)
            text = rc[:-1] if anchored else rc
            if word[end : end + len(text)] != text:
                return False
            if anchored and end + len(text) != len(word):
                return False
        return True


@dataclass
class Grammar:
    language: str
    direction: str  # "g2p" or "p2g"
    alphabet: tuple[str, ...]
    rules: list[RewriteRule]
    frequency_overrides: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if self.direction not in ("g2p", "p2g"):
            raise GrammarError(f"bad direction {self.direction!r}")
        uncovered = [s for s in self.alphabet if not any(s in r.pattern for r in self.rules)]
        if uncovered:
            raise GrammarError(
                f"{self.language}/{self.direction}: no rule covers alphabet "
                f"symbols: {' '.join(uncovered)}"
            )

    def best_rule(self, word: str, pos: int) -> RewriteRule | None:
        candidates = [r for r in self.rules if r.matches(word, pos)]
        if not candidates:
            return None
        longest = max(len(r.pattern) for r in candidates)
        candidates = [r for r in candidates if len(r.pattern) == longest]
        if len(candidates) > 1:
            preferred = self.frequency_overrides.get(candidates[0].pattern)
            if preferred is not None:
                for r in candidates:
                    if r.replacement == preferred:
                        return r
        return min(candidates, key=lambda r: r.rank)


def transduce(word: str, grammar: Grammar) -> str:
    """Convert a word in a single deterministic left-to-right pass."""
    out: list[str] = []
    pos = 0
    while pos < len(word):
        rule = grammar.best_rule(word, pos)
        if rule is None:
            raise ConversionError(word, pos, word[pos])
        out.append(rule.replacement)
        pos += len(rule.pattern)
    return "".join(out)


def _parse_rule_line(line: str, lineno: int, rank: int, path: Path) -> RewriteRule:
    if "->" not in line:
        raise GrammarError(f"{path}:{lineno}: expected 'pattern -> replacement'")
    lhs, rhs = line.split("->", 1)
    pattern = lhs.strip()
    left = right = None
    if "/" in rhs:
        rhs, ctx = rhs.split("/", 1)
        if "_" not in ctx:
            raise GrammarError(f"{path}:{lineno}: context must contain '_'")
        lpart, rpart = ctx.split("_", 1)
        left = lpart.strip() or None
        right = rpart.strip() or None
    replacement = rhs.strip()
    if not pattern:
        raise GrammarError(f"{path}:{lineno}: empty pattern")
    return RewriteRule(pattern, replacement, left, right, rank)


def load_grammar(path: str | Path) -> Grammar:
    """Load and validate a grammar file; runs the completeness check."""
    path = Path(path)
    language = direction = None
    alphabet: tuple[str, ...] = ()
    rules: list[RewriteRule] = []
    overrides: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split(";", 1)[0].rstrip("\n").strip()
            if not line:
                continue
            if line.startswith("language:"):
                language = line.split(":", 1)[1].strip()
            elif line.startswith("direction:"):
                direction = line.split(":", 1)[1].strip()
            elif line.startswith("alphabet:"):
                alphabet = tuple(line.split(":", 1)[1].split())
            elif line.startswith("override:"):
                rule = _parse_rule_line(line.split(":", 1)[1], lineno, -1, path)
                overrides[rule.pattern] = rule.replacement
            else:
                rules.append(_parse_rule_line(line, lineno, len(rules), path))
    if language is None or direction is None:
        raise GrammarError(f"{path}: missing 'language:' or 'direction:' header")
    if not rules:
        raise GrammarError(f"{path}: grammar has no rules")
    grammar = Grammar(language, direction, alphabet, rules, overrides)
    grammar.validate()
    return grammar


def grammar_path(language: str, direction: str) -> Path:
    return _data_dir() / "grammars" / f"{language}_{direction}.txt"


def load_language_grammar(language: str, direction: str) -> Grammar:
    path = grammar_path(language, direction)
    if not path.exists():
        raise GrammarError(f"no shipped grammar for {language!r}/{direction!r} at {path}")
    return load_grammar(path)


@dataclass
class AuditReport:
    language: str
    total: int
    passed: int
    failures: list[tuple[str, str]]  # (word, round-trip result or error text)

    @property
    def pass_rate(self) -> float:
        return 1.0 if self.total == 0 else self.passed / self.total


def roundtrip_audit(grammar_g2p: Grammar, grammar_p2g: Grammar, corpus: list[str]) -> AuditReport:
    """Check p2g(g2p(w)) == w over a word list; conversion errors count as failures."""
    if grammar_g2p.language != grammar_p2g.language:
        raise GrammarError("round-trip audit needs both grammars for the same language")
    passed = 0
    failures: list[tuple[str, str]] = []
    for word in corpus:
        try:
            back = transduce(transduce(word, grammar_g2p), grammar_p2g)
        except ConversionError as err:
            failures.append((word, f"error: {err}"))
            continue
        if back == word:
            passed += 1
        else:
            failures.append((word, back))
    return AuditReport(grammar_g2p.language, len(corpus), passed, failures)
