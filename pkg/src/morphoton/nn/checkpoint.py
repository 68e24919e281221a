"""Self-describing binary model checkpoints.

Layout: magic string, uint32 format version, uint64 JSON header length,
UTF-8 JSON header (hyperparameters, vocabularies, tensor manifest,
training metadata), then the tensors as contiguous little-endian
float64 in manifest order. Reloading reproduces bit-identical forward
outputs because nothing is quantized.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..encoding import SPECIALS, MethodVocabs, Vocabulary
from ..errors import CheckpointError
from .model import Hyperparameters, Seq2SeqModel

MAGIC = b"MORPHOTON\n"
FORMAT_VERSION = 1


def _vocab_to_dict(v: Vocabulary | None) -> dict | None:
    if v is None:
        return None
    return {"kind": v.kind, "tokens": v.tokens[len(SPECIALS):]}


def _vocab_from_dict(d: dict | None) -> Vocabulary | None:
    if d is None:
        return None
    return Vocabulary(d["tokens"], d["kind"])


@dataclass
class ModelCheckpoint:
    model_type: str  # "seq2seq" or "transducer"
    method: str
    hp: Hyperparameters
    vocabs: MethodVocabs
    tensors: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def save(self, path: str | Path) -> None:
        names = sorted(self.tensors)
        header = {
            "format_version": FORMAT_VERSION,
            "model_type": self.model_type,
            "method": self.method,
            "hyperparameters": self.hp.to_dict(),
            "vocabularies": {
                "src": _vocab_to_dict(self.vocabs.src),
                "trg": _vocab_to_dict(self.vocabs.trg),
                "features": _vocab_to_dict(self.vocabs.features),
            },
            "tensors": [[name, list(self.tensors[name].shape)] for name in names],
            "metadata": self.metadata,
        }
        blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<IQ", FORMAT_VERSION, len(blob)))
            fh.write(blob)
            for name in names:
                fh.write(np.ascontiguousarray(self.tensors[name], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "ModelCheckpoint":
        with open(path, "rb") as fh:
            if fh.read(len(MAGIC)) != MAGIC:
                raise CheckpointError(f"{path}: not a morphoton checkpoint")
            version, header_len = struct.unpack("<IQ", fh.read(12))
            if version != FORMAT_VERSION:
                raise CheckpointError(f"{path}: unknown format version {version}")
            header = json.loads(fh.read(header_len).decode("utf-8"))
            tensors = {}
            for name, shape in header["tensors"]:
                count = int(np.prod(shape)) if shape else 1
                buf = fh.read(count * 8)
                if len(buf) != count * 8:
                    raise CheckpointError(f"{path}: truncated tensor {name!r}")
                tensors[name] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
        vocabs_raw = header["vocabularies"]
        vocabs = MethodVocabs(
            header["method"],
            _vocab_from_dict(vocabs_raw["src"]),
            _vocab_from_dict(vocabs_raw["trg"]),
            _vocab_from_dict(vocabs_raw["features"]),
        )
        return cls(
            header["model_type"],
            header["method"],
            Hyperparameters.from_dict(header["hyperparameters"]),
            vocabs,
            tensors,
            header.get("metadata", {}),
        )

    def build_model(self) -> Seq2SeqModel:
        """Instantiate a model with exactly the stored parameters."""
        model = Seq2SeqModel(self.hp, self.vocabs)
        if set(model.params) != set(self.tensors):
            raise CheckpointError(
                f"parameter roles mismatch: {sorted(set(model.params) ^ set(self.tensors))}"
            )
        for name, tensor in model.params.items():
            if tensor.data.shape != self.tensors[name].shape:
                raise CheckpointError(f"shape mismatch for {name!r}")
            tensor.data = self.tensors[name].copy()
        return model
