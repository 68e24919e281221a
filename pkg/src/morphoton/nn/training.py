"""Mini-batch training with Adam and early stopping on dev exact match."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..encoding import EncodedSample
from .checkpoint import ModelCheckpoint
from .model import Hyperparameters, Seq2SeqModel

logger = logging.getLogger(__name__)

# Global-norm gradient clip; RNN backprop through long feature sequences
# occasionally spikes without it.
GRAD_CLIP_NORM = 5.0


class Adam:
    """Per-parameter adaptive steps with bias correction."""

    def __init__(self, params: dict, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {k: np.zeros_like(t.data) for k, t in params.items()}
        self.v = {k: np.zeros_like(t.data) for k, t in params.items()}
        self.t = 0

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, tensor in self.params.items():
            g = tensor.grad
            if g is None:
                continue
            self.m[name] = b1 * self.m[name] + (1 - b1) * g
            self.v[name] = b2 * self.v[name] + (1 - b2) * g * g
            m_hat = self.m[name] / (1 - b1**self.t)
            v_hat = self.v[name] / (1 - b2**self.t)
            tensor.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def token_exact_match(model: Seq2SeqModel, samples: list[EncodedSample]) -> float:
    """Fraction of samples whose greedy decode equals the gold sequence."""
    if not samples:
        return 0.0
    hits = 0
    for s in samples:
        ids, _ = model.decode_greedy(s)
        hits += ids == s.trg
    return hits / len(samples)


@dataclass
class TrainResult:
    checkpoint: ModelCheckpoint
    history: list[dict] = field(default_factory=list)
    diverged: bool = False


def train_model(
    model: Seq2SeqModel,
    train_set: list[EncodedSample],
    dev_set: list[EncodedSample],
    hp: Hyperparameters,
    model_type: str = "seq2seq",
    stop_at_perfect_dev: bool = False,
) -> TrainResult:
    """Train to best dev exact match; returns the best-dev checkpoint.

    Deterministic given hp.seed (single-threaded). Divergence (NaN loss)
    aborts and returns the last finite-state checkpoint, flagged.
    """
    if not train_set or not dev_set:
        raise ValueError("train and dev sets must be non-empty")
    rng = np.random.default_rng(hp.seed + 1)
    opt = Adam(model.params, hp.learning_rate)
    best_em = -1.0
    best_tensors = {k: t.data.copy() for k, t in model.params.items()}
    best_epoch = 0
    history: list[dict] = []
    diverged = False
    epochs_run = 0
    for epoch in range(1, hp.max_epochs + 1):
        epochs_run = epoch
        opt.lr = hp.learning_rate * hp.lr_decay ** (epoch - 1)
        order = rng.permutation(len(train_set))
        epoch_loss = 0.0
        for start in range(0, len(order), hp.batch_size):
            batch = [train_set[i] for i in order[start : start + hp.batch_size]]
            model.zero_grads()
            batch_loss = 0.0
            for enc in batch:
                loss = model.sample_loss(enc)
                batch_loss += float(loss.data)
                loss.backward()
            if not np.isfinite(batch_loss):
                logger.error("loss diverged at epoch %d; keeping last good checkpoint", epoch)
                diverged = True
                break
            norm_sq = 0.0
            for t in model.params.values():
                if t.grad is not None:
                    t.grad /= len(batch)
                    norm_sq += float((t.grad * t.grad).sum())
            clip = GRAD_CLIP_NORM / max(math.sqrt(norm_sq), GRAD_CLIP_NORM)
            if clip < 1.0:
                for t in model.params.values():
                    if t.grad is not None:
                        t.grad *= clip
            opt.step()
            epoch_loss += batch_loss
        if diverged:
            break
        dev_em = token_exact_match(model, dev_set)
        history.append(
            {"epoch": epoch, "train_loss": epoch_loss / len(train_set), "dev_exact_match": dev_em}
        )
        if dev_em > best_em:
            best_em = dev_em
            best_epoch = epoch
            best_tensors = {k: t.data.copy() for k, t in model.params.items()}
        if stop_at_perfect_dev and dev_em >= 1.0:
            break
        if epoch - best_epoch >= hp.patience:
            logger.info("early stop at epoch %d (best dev EM %.3f at %d)", epoch, best_em, best_epoch)
            break
    checkpoint = ModelCheckpoint(
        model_type=model_type,
        method=model.method,
        hp=hp,
        vocabs=model.vocabs,
        tensors=best_tensors,
        metadata={
            "epochs": epochs_run,
            "best_epoch": best_epoch,
            "dev_exact_match": max(best_em, 0.0),
            "seed": hp.seed,
            "diverged": diverged,
        },
    )
    return TrainResult(checkpoint, history, diverged)
