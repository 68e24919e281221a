import math

import numpy as np
import pytest

from morphoton.corpus import ReinflectionSample
from morphoton.encoding import build_vocabularies, encode_sample
from morphoton.nn import autodiff as ad
from morphoton.nn.checkpoint import MAGIC, CheckpointError, ModelCheckpoint
from morphoton.nn.gradcheck import grad_check
from morphoton.nn.model import (
    BOS_ID,
    EOS_ID,
    Hyperparameters,
    Seq2SeqModel,
    fuse_phoneme,
    lstm_step,
)

TOY_HP = Hyperparameters(
    embed_dim=8, hidden_dim=10, fusion_output_dim=8, batch_size=4, seed=0
)

SAMPLES = [
    ReinflectionSample("ol", ("V", "FUT"), "olacak", ("V", "PST"), "oldu"),
    ReinflectionSample("gel", ("V", "PST"), "geldi", ("V", "FUT"), "gelecek"),
]


@pytest.fixture(scope="module")
def tr(contexts):
    return contexts["tr"]


def setup_model(tr, method, hp=TOY_HP):
    vocabs = build_vocabularies(SAMPLES, method, tr.g2p, tr.inventory)
    encoded = [encode_sample(s, method, vocabs, tr.g2p, tr.inventory) for s in SAMPLES]
    model = Seq2SeqModel(hp, vocabs, rng=np.random.default_rng(0))
    return model, encoded


# --- hyperparameters ---------------------------------------------------------


def test_hp_roundtrip():
    assert Hyperparameters.from_dict(TOY_HP.to_dict()) == TOY_HP


def test_hp_validation():
    with pytest.raises(ValueError):
        Hyperparameters(embed_dim=0)
    with pytest.raises(ValueError):
        Hyperparameters(fusion_output_dim=8, fusion_heads=3)


# --- fusion layer -------------------------------------------------------------


def test_fuse_phoneme_output_shape_and_convexity():
    hp = Hyperparameters(fusion_output_dim=8, fusion_heads=2)
    q = ad.Tensor(np.random.default_rng(0).standard_normal((1, 8)))
    kv = ad.Tensor(np.random.default_rng(1).standard_normal((4, 8)))
    out = fuse_phoneme(q, kv, hp)
    assert out.shape == (1, 8)
    # each head's output is a convex combination of that head's value rows
    half = kv.data[:, :4]
    lo, hi = half.min(axis=0), half.max(axis=0)
    assert (out.data[0, :4] >= lo - 1e-12).all() and (out.data[0, :4] <= hi + 1e-12).all()


def test_fuse_phoneme_single_feature_passthrough():
    # with one key/value row the softmax weight is 1, so out == value row
    hp = Hyperparameters(fusion_output_dim=8, fusion_heads=1)
    q = ad.Tensor(np.ones((1, 8)))
    kv = ad.Tensor(np.random.default_rng(2).standard_normal((1, 8)))
    out = fuse_phoneme(q, kv, hp)
    assert np.allclose(out.data, kv.data)


def test_fuse_phoneme_scaling_uses_head_dim():
    # the score scale is 1/sqrt(d/n): check against a hand computation
    hp = Hyperparameters(fusion_output_dim=4, fusion_heads=2)
    q = ad.Tensor(np.array([[1.0, 2.0, 3.0, 4.0]]))
    kv = ad.Tensor(np.array([[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]]))
    out = fuse_phoneme(q, kv, hp)
    scale = 1.0 / math.sqrt(4 / 2)
    for h, sl in ((0, slice(0, 2)), (1, slice(2, 4))):
        scores = (q.data[:, sl] @ kv.data[:, sl].T) * scale
        w = np.exp(scores - scores.max())
        w /= w.sum()
        assert np.allclose(out.data[:, sl], w @ kv.data[:, sl])


def test_fuse_phoneme_shape_mismatch():
    hp = Hyperparameters(fusion_output_dim=8)
    with pytest.raises(ValueError):
        fuse_phoneme(ad.Tensor(np.zeros((1, 4))), ad.Tensor(np.zeros((3, 8))), hp)


# --- LSTM cell -----------------------------------------------------------------


def test_lstm_step_shapes_and_bounds():
    rng = np.random.default_rng(0)
    hid = 6
    h, c = ad.Tensor(np.zeros((1, hid))), ad.Tensor(np.zeros((1, hid)))
    x = ad.Tensor(rng.standard_normal((1, 4)))
    wx, wh = ad.Tensor(rng.standard_normal((4, 4 * hid))), ad.Tensor(rng.standard_normal((hid, 4 * hid)))
    b = ad.Tensor(np.zeros((1, 4 * hid)))
    h2, c2 = lstm_step(x, h, c, wx, wh, b)
    assert h2.shape == (1, hid) and c2.shape == (1, hid)
    assert (np.abs(h2.data) < 1.0).all()  # |h| < 1 by construction


# --- forward / decode ------------------------------------------------------------


@pytest.mark.parametrize("method", ["baseline", "feat_seq", "fusion"])
def test_forward_outputs_are_distributions(tr, method):
    model, encoded = setup_model(tr, method)
    outputs = model.forward(encoded[0], teacher_forcing=True)
    assert len(outputs) == len(encoded[0].trg) - 1
    for probs in outputs:
        assert probs.shape == (1, len(model.vocabs.trg))
        assert probs.data.min() > 0
        assert probs.data.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["baseline", "feat_seq", "fusion"])
def test_forward_deterministic(tr, method):
    m1, enc = setup_model(tr, method)
    m2, _ = setup_model(tr, method)
    o1 = m1.forward(enc[0], teacher_forcing=True)
    o2 = m2.forward(enc[0], teacher_forcing=True)
    for a, b in zip(o1, o2):
        assert np.array_equal(a.data, b.data)


def test_decode_greedy_terminates_and_frames(tr):
    model, encoded = setup_model(tr, "baseline")
    ids, truncated = model.decode_greedy(encoded[0])
    assert ids[0] == BOS_ID and ids[-1] == EOS_ID
    cap = int(TOY_HP.max_decode_len_factor * len(encoded[0].src)) + 10
    assert len(ids) <= cap + 2
    assert isinstance(truncated, bool)


# --- loss --------------------------------------------------------------------------


def test_loss_zero_on_one_hot(tr):
    model, encoded = setup_model(tr, "baseline")
    gold = encoded[0].trg
    outputs = []
    for t in gold[1:]:
        row = np.full((1, len(model.vocabs.trg)), 1e-300)
        row[0, t] = 1.0
        outputs.append(ad.Tensor(row))
    assert float(model.loss(outputs, gold).data) == pytest.approx(0.0)


def test_loss_uniform_is_log_vocab(tr):
    model, encoded = setup_model(tr, "baseline")
    gold = encoded[0].trg
    v = len(model.vocabs.trg)
    outputs = [ad.Tensor(np.full((1, v), 1.0 / v)) for _ in gold[1:]]
    assert float(model.loss(outputs, gold).data) == pytest.approx(math.log(v))


def test_loss_matches_nll_oracle(tr):
    model, encoded = setup_model(tr, "baseline")
    gold = encoded[0].trg
    rng = np.random.default_rng(3)
    v = len(model.vocabs.trg)
    rows = rng.dirichlet(np.ones(v), size=len(gold) - 1)
    outputs = [ad.Tensor(r[None, :]) for r in rows]
    oracle = -np.mean([np.log(rows[i, t]) for i, t in enumerate(gold[1:])])
    assert float(model.loss(outputs, gold).data) == pytest.approx(oracle, abs=1e-10)


def test_loss_length_mismatch(tr):
    model, encoded = setup_model(tr, "baseline")
    with pytest.raises(ValueError):
        model.loss([], encoded[0].trg)


# --- gradient checks ------------------------------------------------------------------


@pytest.mark.parametrize("method", ["baseline", "feat_seq", "fusion"])
def test_grad_check(tr, method):
    model, encoded = setup_model(tr, method)
    err = grad_check(model, encoded[0], max_entries_per_param=4, seed=0)
    assert err < 1e-4


# --- checkpointing ----------------------------------------------------------------------


def test_checkpoint_roundtrip_bit_identical(tr, tmp_path):
    model, encoded = setup_model(tr, "fusion")
    ckpt = ModelCheckpoint(
        "seq2seq", "fusion", TOY_HP, model.vocabs,
        {k: t.data for k, t in model.params.items()}, {"note": "test"},
    )
    path = tmp_path / "m.ckpt"
    ckpt.save(path)
    back = ModelCheckpoint.load(path)
    assert back.model_type == "seq2seq" and back.method == "fusion"
    assert back.hp == TOY_HP
    assert back.metadata["note"] == "test"
    for k, arr in ckpt.tensors.items():
        assert np.array_equal(back.tensors[k], arr)
    # a rebuilt model produces identical outputs
    rebuilt = back.build_model()
    o1 = model.forward(encoded[0], teacher_forcing=True)
    o2 = rebuilt.forward(encoded[0], teacher_forcing=True)
    for a, b in zip(o1, o2):
        assert np.array_equal(a.data, b.data)


def test_checkpoint_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"NOTAMODEL" + b"\x00" * 32)
    with pytest.raises(CheckpointError):
        ModelCheckpoint.load(path)


def test_checkpoint_rejects_truncated_file(tr, tmp_path):
    model, _ = setup_model(tr, "baseline")
    ckpt = ModelCheckpoint(
        "seq2seq", "baseline", TOY_HP, model.vocabs,
        {k: t.data for k, t in model.params.items()}, {},
    )
    path = tmp_path / "m.ckpt"
    ckpt.save(path)
    data = path.read_bytes()
    assert data.startswith(MAGIC)
    path.write_bytes(data[:-16])
    with pytest.raises(CheckpointError):
        ModelCheckpoint.load(path)
