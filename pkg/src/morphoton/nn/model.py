"""LSTM encoder-decoder with global attention, plus the phoneme-feature
attention fusion layer used by the model-manipulation regime.

The fusion layer builds one vector per source phoneme by attending from
the phoneme embedding (the query) over its feature embeddings (keys and
values): per head, weights = softmax(q K^T / sqrt(d/n)) and the output
is the weight-matrix product with V (the convex combination of value
rows), heads concatenated back to dimension d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from ..encoding import EncodedSample, MethodVocabs
from . import autodiff as ad
from .autodiff import Tensor

BOS_ID = 1
EOS_ID = 2


@dataclass
class Hyperparameters:
    embed_dim: int = 64
    hidden_dim: int = 128
    fusion_output_dim: int = 64
    fusion_heads: int = 1
    learning_rate: float = 1e-3
    lr_decay: float = 1.0  # multiplicative per-epoch learning-rate decay
    batch_size: int = 32
    max_epochs: int = 100
    patience: int = 10
    max_decode_len_factor: float = 2.0
    seed: int = 0

    def __post_init__(self):
        for name in ("embed_dim", "hidden_dim", "fusion_output_dim", "fusion_heads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.fusion_output_dim % self.fusion_heads != 0:
            raise ValueError("fusion_output_dim must be divisible by fusion_heads")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError(f"lr_decay must be in (0, 1], got {self.lr_decay}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparameters":
        return cls(**d)


def fuse_phoneme(q: Tensor, k_v: Tensor, hp: Hyperparameters) -> Tensor:
    """Fuse one phoneme vector (1, d) with its feature matrix (m, d)."""
    d = hp.fusion_output_dim
    n = hp.fusion_heads
    if q.shape != (1, d) or k_v.shape[1] != d:
        raise ValueError(f"expected q (1,{d}) and K_V (m,{d}), got {q.shape}, {k_v.shape}")
    head = d // n
    scale = 1.0 / math.sqrt(d / n)
    outputs = []
    for h in range(n):
        qh = ad.slice_cols(q, h * head, (h + 1) * head)
        kvh = ad.slice_cols(k_v, h * head, (h + 1) * head)  # K and V coincide
        weights = ad.softmax(ad.scale(ad.matmul(qh, ad.transpose(kvh)), scale))
        outputs.append(ad.matmul(weights, kvh))
    return ad.concat(outputs, axis=1) if n > 1 else outputs[0]


def lstm_step(x: Tensor, h: Tensor, c: Tensor, wx: Tensor, wh: Tensor, b: Tensor):
    """One LSTM cell step; returns (h', c')."""
    hid = h.shape[1]
    gates = ad.add(ad.add(ad.matmul(x, wx), ad.matmul(h, wh)), b)
    i = ad.sigmoid(ad.slice_cols(gates, 0, hid))
    f = ad.sigmoid(ad.slice_cols(gates, hid, 2 * hid))
    g = ad.tanh(ad.slice_cols(gates, 2 * hid, 3 * hid))
    o = ad.sigmoid(ad.slice_cols(gates, 3 * hid, 4 * hid))
    c2 = ad.add(ad.mul(f, c), ad.mul(i, g))
    h2 = ad.mul(o, ad.tanh(c2))
    return h2, c2


class Seq2SeqModel:
    """Encoder-decoder over encoded samples; method decides the encoder
    input construction (plain embeddings vs fused phoneme vectors)."""

    def __init__(self, hp: Hyperparameters, vocabs: MethodVocabs, rng: np.random.Generator | None = None):
        self.hp = hp
        self.vocabs = vocabs
        self.method = vocabs.method
        rng = rng if rng is not None else np.random.default_rng(hp.seed)
        d_e, hid = hp.embed_dim, hp.hidden_dim
        d = hp.fusion_output_dim if self.method == "fusion" else d_e
        self.enc_in_dim = d

        def init(*shape):
            bound = 1.0 / math.sqrt(shape[0])
            return Tensor(rng.uniform(-bound, bound, shape))

        def lstm_bias():
            # forget gate starts open so long sequences train reliably
            b = np.zeros((1, 4 * hid))
            b[0, hid : 2 * hid] = 1.0
            return Tensor(b)

        p: dict[str, Tensor] = {
            "E_src": init(len(vocabs.src), d_e),
            "E_trg": init(len(vocabs.trg), d_e),
            "enc_Wx": init(d, 4 * hid),
            "enc_Wh": init(hid, 4 * hid),
            "enc_b": lstm_bias(),
            "dec_Wx": init(d_e + hid, 4 * hid),
            "dec_Wh": init(hid, 4 * hid),
            "dec_b": lstm_bias(),
            "W_att": init(hid, hid),
            "W_comb": init(2 * hid, hid),
            "b_comb": Tensor(np.zeros((1, hid))),
            "W_out": init(hid, len(vocabs.trg)),
            "b_out": Tensor(np.zeros((1, len(vocabs.trg)))),
        }
        if self.method == "fusion":
            p["E_feat"] = init(len(vocabs.features), d_e)
            if d != d_e:
                p["W_q"] = init(d_e, d)
                p["W_kv"] = init(d_e, d)
        self.params = p

    def zero_grads(self):
        for t in self.params.values():
            t.zero_grad()

    def _project_q(self, e: Tensor) -> Tensor:
        return ad.matmul(e, self.params["W_q"]) if "W_q" in self.params else e

    def _project_kv(self, e: Tensor) -> Tensor:
        return ad.matmul(e, self.params["W_kv"]) if "W_kv" in self.params else e

    def _encoder_inputs(self, encoded: EncodedSample) -> list[Tensor]:
        p = self.params
        inputs = []
        groups = {}
        if self.method == "fusion" and encoded.src_feature_groups:
            groups = dict(zip(encoded.src_phoneme_positions, encoded.src_feature_groups))
        for pos, tok in enumerate(encoded.src):
            e = ad.rows(p["E_src"], [tok])
            if self.method != "fusion":
                inputs.append(e)
                continue
            q = self._project_q(e)
            group = groups.get(pos)
            if group:
                kv = self._project_kv(ad.rows(p["E_feat"], group))
                inputs.append(fuse_phoneme(q, kv, self.hp))
            else:
                inputs.append(q)
        return inputs

    def encode(self, encoded: EncodedSample) -> Tensor:
        """Run the encoder; returns the state matrix (S, hidden)."""
        states, _, _ = self._encode_states(encoded)
        return states

    def _encode_states(self, encoded: EncodedSample) -> tuple[Tensor, Tensor, Tensor]:
        """Encoder state matrix plus the final (h, c) that seed the decoder."""
        p = self.params
        hid = self.hp.hidden_dim
        h = ad.constant(np.zeros((1, hid)))
        c = ad.constant(np.zeros((1, hid)))
        states = []
        for x in self._encoder_inputs(encoded):
            h, c = lstm_step(x, h, c, p["enc_Wx"], p["enc_Wh"], p["enc_b"])
            states.append(h)
        return ad.concat(states, axis=0), h, c

    def _decode_step(self, token: int, h: Tensor, c: Tensor, feed: Tensor, h_enc: Tensor):
        p = self.params
        x = ad.concat([ad.rows(p["E_trg"], [token]), feed], axis=1)
        h, c = lstm_step(x, h, c, p["dec_Wx"], p["dec_Wh"], p["dec_b"])
        scores = ad.matmul(ad.matmul(h, p["W_att"]), ad.transpose(h_enc))
        alpha = ad.softmax(scores)
        ctx = ad.matmul(alpha, h_enc)
        comb = ad.tanh(ad.add(ad.matmul(ad.concat([h, ctx], axis=1), p["W_comb"]), p["b_comb"]))
        probs = ad.softmax(ad.add(ad.matmul(comb, p["W_out"]), p["b_out"]))
        return probs, h, c, comb

    def forward(self, encoded: EncodedSample, teacher_forcing: bool = True) -> list[Tensor]:
        """Per-step output distributions (each a (1, |V_trg|) simplex row).

        With teacher forcing the decoder consumes the gold prefix and
        emits len(trg) - 1 distributions (one per non-BOS gold token);
        without it, greedy argmax feeds back until EOS or the cap.
        """
        h_enc, h, c = self._encode_states(encoded)
        feed = ad.constant(np.zeros((1, self.hp.hidden_dim)))
        outputs = []
        if teacher_forcing:
            for token in encoded.trg[:-1]:
                probs, h, c, feed = self._decode_step(token, h, c, feed, h_enc)
                outputs.append(probs)
            return outputs
        token = BOS_ID
        for _ in range(self._decode_cap(encoded)):
            probs, h, c, feed = self._decode_step(token, h, c, feed, h_enc)
            outputs.append(probs)
            token = int(np.argmax(probs.data))
            if token == EOS_ID:
                break
        return outputs

    def _decode_cap(self, encoded: EncodedSample) -> int:
        return int(self.hp.max_decode_len_factor * len(encoded.src)) + 10

    def decode_greedy(self, encoded: EncodedSample) -> tuple[list[int], bool]:
        """Greedy argmax decode; returns (token ids incl. BOS/EOS, truncated?)."""
        outputs = self.forward(encoded, teacher_forcing=False)
        ids = [BOS_ID]
        for probs in outputs:
            ids.append(int(np.argmax(probs.data)))
        truncated = ids[-1] != EOS_ID
        if truncated:
            ids.append(EOS_ID)
        return ids, truncated

    def loss(self, outputs: list[Tensor], gold: list[int]) -> Tensor:
        """Mean per-token negative log likelihood under teacher forcing.

        ``gold`` is the full target sequence including BOS and EOS; the
        outputs are aligned against gold[1:].
        """
        targets = gold[1:]
        if len(outputs) != len(targets):
            raise ValueError(f"{len(outputs)} outputs vs {len(targets)} gold tokens")
        picked = [ad.pick(ad.log(probs), 0, t) for probs, t in zip(outputs, targets)]
        return ad.neg(ad.mean_scalars(picked))

    def sample_loss(self, encoded: EncodedSample) -> Tensor:
        return self.loss(self.forward(encoded, teacher_forcing=True), encoded.trg)
