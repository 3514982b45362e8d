"""Binary model checkpoints.

Layout (all integers and reals little-endian, regardless of host):

    magic   4 bytes  b"SWAE"
    version u32      currently 1
    dim_x, dim_z, K, n_hidden   u32 each
    hidden widths               u32 * n_hidden
    hidden activation tag       u8 (activation code)
    decoder output tag          u8
    parameter blocks, fixed order: encoder layers, decoder layers,
    prior-net layers, pseudo-inputs; every array is a u32 element count
    followed by that many f8 values.

Loading is strict: wrong magic, unknown version, count mismatches,
truncation and trailing bytes all raise CheckpointError, never a
partially filled model.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import CheckpointError
from .model import SwaeModel
from .nn import MlpParams, MlpSpec

MAGIC = b"SWAE"
VERSION = 1

_ACT_CODES = {"identity": 0, "tanh": 1, "sigmoid": 2}
_ACT_NAMES = {code: name for name, code in _ACT_CODES.items()}


def _pack_array(arr: np.ndarray) -> bytes:
    flat = np.ascontiguousarray(arr, dtype="<f8").reshape(-1)
    return struct.pack("<I", flat.size) + flat.tobytes()


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.buf):
            raise CheckpointError(f"truncated checkpoint while reading {what}")
        out = self.buf[self.pos:self.pos + count]
        self.pos += count
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def array(self, shape: tuple[int, ...], what: str) -> np.ndarray:
        expected = int(np.prod(shape))
        count = self.u32(f"{what} length")
        if count != expected:
            raise CheckpointError(
                f"{what}: expected {expected} values, file says {count}")
        raw = self.take(8 * count, what)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)


def save_checkpoint(model: SwaeModel, path) -> None:
    hidden = model.enc_spec.widths[1:-1]
    hid_act = model.enc_spec.activations[0] if hidden else "identity"
    parts = [
        MAGIC,
        struct.pack("<IIIII", VERSION, model.dim_x, model.dim_z,
                    model.n_pseudo, len(hidden)),
        struct.pack(f"<{len(hidden)}I", *hidden) if hidden else b"",
        struct.pack("<BB", _ACT_CODES[hid_act],
                    _ACT_CODES[model.dec_spec.activations[-1]]),
    ]
    for params in (model.enc_params, model.dec_params, model.prior_params):
        for arr in params.arrays():
            parts.append(_pack_array(arr))
    parts.append(_pack_array(model.pseudo_inputs))
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def _read_params(r: _Reader, spec: MlpSpec, name: str) -> MlpParams:
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(
            zip(spec.widths[:-1], spec.widths[1:])):
        weights.append(r.array((fan_out, fan_in), f"{name} W{layer}"))
        biases.append(r.array((fan_out,), f"{name} b{layer}"))
    return MlpParams(weights, biases)


def load_checkpoint(path) -> SwaeModel:
    try:
        with open(path, "rb") as f:
            buf = f.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    r = _Reader(buf)
    if r.take(4, "magic") != MAGIC:
        raise CheckpointError(f"bad checkpoint magic in {path}")
    version = r.u32("version")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    dim_x = r.u32("dim_x")
    dim_z = r.u32("dim_z")
    k = r.u32("pseudo-input count")
    n_hidden = r.u32("hidden layer count")
    hidden = tuple(r.u32(f"hidden width {i}") for i in range(n_hidden))
    hid_act = _ACT_NAMES.get(r.u8("hidden activation"))
    dec_act = _ACT_NAMES.get(r.u8("decoder activation"))
    if hid_act is None or dec_act is None:
        raise CheckpointError("unknown activation code in checkpoint")

    hid_acts = (hid_act,) * n_hidden
    enc_spec = MlpSpec((dim_x, *hidden, dim_z), (*hid_acts, "identity"))
    dec_spec = MlpSpec((dim_z, *hidden, dim_x), (*hid_acts, dec_act))
    prior_spec = MlpSpec((dim_x, *hidden, 2 * dim_z), (*hid_acts, "identity"))

    enc = _read_params(r, enc_spec, "encoder")
    dec = _read_params(r, dec_spec, "decoder")
    prior = _read_params(r, prior_spec, "prior")
    pseudo = r.array((k, dim_x), "pseudo-inputs")
    if r.pos != len(buf):
        raise CheckpointError(
            f"{len(buf) - r.pos} trailing bytes in checkpoint {path}")
    return SwaeModel(enc_spec=enc_spec, enc_params=enc,
                     dec_spec=dec_spec, dec_params=dec,
                     prior_spec=prior_spec, prior_params=prior,
                     pseudo_inputs=pseudo)
