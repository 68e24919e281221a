"""Edit-action reinflection: oracle alignment, script application, and
gold action-sequence construction.

This is a static-oracle stand-in for imitation-learning transducers:
gold scripts come from a deterministic minimal alignment (COPY free,
DELETE/INSERT cost 1, no SUBSTITUTE), and a seq2seq backbone is trained
to emit the action tokens. Tie-breaking during alignment is fixed to
COPY > DELETE > INSERT so gold scripts are identical across platforms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from . import kernels
from .errors import MalformedScript

COPY = "COPY"
DELETE = "DELETE"
INSERT = "INSERT"


@dataclass(frozen=True)
class EditAction:
    kind: str
    symbol: str | None = None  # present iff kind == INSERT

    def __post_init__(self):
        if self.kind not in (COPY, DELETE, INSERT):
            raise ValueError(f"bad action kind {self.kind!r}")
        if (self.symbol is None) == (self.kind == INSERT):
            raise ValueError("INSERT needs a symbol; COPY/DELETE must not carry one")

    def to_text(self) -> str:
        if self.kind == COPY:
            return "C"
        if self.kind == DELETE:
            return "D"
        return f"I({self.symbol})"


@dataclass(frozen=True)
class EditScript:
    actions: tuple[EditAction, ...]
    src_len: int

    def __post_init__(self):
        consumed = sum(a.kind in (COPY, DELETE) for a in self.actions)
        if consumed != self.src_len:
            raise MalformedScript(
                f"script consumes {consumed} source symbols, declared {self.src_len}"
            )

    @property
    def cost(self) -> int:
        return sum(a.kind != COPY for a in self.actions)

    def to_text(self) -> str:
        return " ".join(a.to_text() for a in self.actions)

    @classmethod
    def from_text(cls, text: str) -> "EditScript":
        actions = []
        for tok in text.split():
            if tok == "C":
                actions.append(EditAction(COPY))
            elif tok == "D":
                actions.append(EditAction(DELETE))
            else:
                m = re.fullmatch(r"I\((.*)\)", tok)
                if m is None:
                    raise MalformedScript(f"bad action token {tok!r}")
                actions.append(EditAction(INSERT, m.group(1)))
        src_len = sum(a.kind in (COPY, DELETE) for a in actions)
        return cls(tuple(actions), src_len)


def oracle_align(src: Sequence[str], trg: Sequence[str]) -> EditScript:
    """Minimal deterministic edit script from src to trg.

    COPY is free, DELETE/INSERT cost 1; the walk is forward over a
    suffix-distance table so ties resolve COPY > DELETE > INSERT at the
    earliest position.
    """
    table: dict[str, int] = {}
    for s in list(src) + list(trg):
        table.setdefault(s, len(table))
    a = kernels.encode_symbols(list(src), table)
    b = kernels.encode_symbols(list(trg), table)
    m, n = len(a), len(b)
    # Suffix distances via the DP matrix of the reversed sequences:
    # dist(i, j) = d(src[i:], trg[j:]) = dpR[m - i, n - j].
    dp_rev = kernels.indel_dp(a[::-1].copy(), b[::-1].copy())

    def dist(i: int, j: int) -> int:
        return int(dp_rev[m - i, n - j])

    actions: list[EditAction] = []
    i = j = 0
    while i < m or j < n:
        here = dist(i, j)
        if i < m and j < n and a[i] == b[j] and dist(i + 1, j + 1) == here:
            actions.append(EditAction(COPY))
            i += 1
            j += 1
        elif i < m and dist(i + 1, j) + 1 == here:
            actions.append(EditAction(DELETE))
            i += 1
        else:
            actions.append(EditAction(INSERT, trg[j]))
            j += 1
    return EditScript(tuple(actions), m)


def apply(script: EditScript, src: Sequence[str]) -> list[str]:
    """Replay a script over a source sequence."""
    if script.src_len != len(src):
        raise MalformedScript(
            f"script declares src_len {script.src_len}, source has {len(src)}"
        )
    out: list[str] = []
    pos = 0
    for action in script.actions:
        if action.kind == COPY:
            out.append(src[pos])
            pos += 1
        elif action.kind == DELETE:
            pos += 1
        else:
            out.append(action.symbol)
    return out


# --- action tokens for the seq2seq backbone ---------------------------------

ACTION_COPY = "<copy>"
ACTION_DELETE = "<del>"
_INSERT_PREFIX = "I:"


def action_token(action: EditAction) -> str:
    if action.kind == COPY:
        return ACTION_COPY
    if action.kind == DELETE:
        return ACTION_DELETE
    return _INSERT_PREFIX + action.symbol


def token_to_action(token: str) -> EditAction | None:
    """Inverse of action_token; None for non-action tokens."""
    if token == ACTION_COPY:
        return EditAction(COPY)
    if token == ACTION_DELETE:
        return EditAction(DELETE)
    if token.startswith(_INSERT_PREFIX):
        return EditAction(INSERT, token[len(_INSERT_PREFIX):])
    return None


def repair_actions(actions: list[EditAction], src_len: int) -> EditScript:
    """Make an arbitrary predicted action list applicable to a source of
    the given length: surplus consumption is truncated, missing
    consumption is padded with DELETE (the early-EOS repair)."""
    fixed: list[EditAction] = []
    consumed = 0
    for a in actions:
        if a.kind in (COPY, DELETE):
            if consumed == src_len:
                continue  # would over-consume; drop
            consumed += 1
        fixed.append(a)
    while consumed < src_len:
        fixed.append(EditAction(DELETE))
        consumed += 1
    return EditScript(tuple(fixed), src_len)
