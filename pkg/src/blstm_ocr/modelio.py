"""Portable model file (``.bocr``).

Layout, all integers unsigned 32-bit little-endian::

    magic            4 bytes  b"BOCR"
    format_version   u32      (currently 1)
    input_size       u32
    hidden_size      u32
    num_classes      u32
    alphabet_length  u32      byte length of the manifest that follows
    alphabet         UTF-8    canonical manifest text (see codec.format_alphabet)
    parameters       float32  little-endian, row-major, in this order:
                              forward bank  W_ix W_ih b_i W_fx W_fh b_f
                                            W_cx W_ch b_c W_ox W_oh b_o
                              backward bank (same order)
                              W_fy W_by b_y
    crc32            u32      zlib CRC-32 of every preceding byte

Weights are trained in float64 and rounded to the nearest float32 on save.
"""

import struct
import zlib
from pathlib import Path

import numpy as np

from .blstm import BlstmModel
from .codec import format_alphabet, parse_alphabet
from .exceptions import ModelCorruptionError, ModelFormatError, ModelVersionError

MAGIC = b"BOCR"
FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (1, 1)
_HEADER = struct.Struct("<4sIIIII")


def parameter_shapes(input_size, hidden_size, num_classes):
    H, I, C = hidden_size, input_size, num_classes
    bank = [(H, I), (H, H), (H,)] * 4
    return bank + bank + [(C, H), (C, H), (C,)]


def model_to_bytes(model, alphabet):
    manifest = format_alphabet(alphabet).encode("utf-8")
    header = _HEADER.pack(
        MAGIC, FORMAT_VERSION, model.input_size, model.hidden_size, model.num_classes,
        len(manifest),
    )
    params = b"".join(np.asarray(a, dtype="<f4").tobytes(order="C") for a in model.arrays())
    body = header + manifest + params
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def model_from_bytes(data):
    if len(data) < _HEADER.size or data[:4] != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    _, version, input_size, hidden_size, num_classes, manifest_len = _HEADER.unpack_from(data)
    lo, hi = SUPPORTED_VERSIONS
    if not lo <= version <= hi:
        raise ModelVersionError(
            f"model format version {version} unsupported (supported: {lo}..{hi})"
        )
    if len(data) < _HEADER.size + 4:
        raise ModelCorruptionError("model file truncated")
    (crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) & 0xFFFFFFFF != crc:
        raise ModelCorruptionError("CRC mismatch: model file is corrupt or truncated")
    shapes = parameter_shapes(input_size, hidden_size, num_classes)
    count = sum(int(np.prod(s)) for s in shapes)
    start = _HEADER.size + manifest_len
    if len(data) != start + 4 * count + 4:
        raise ModelCorruptionError("payload length disagrees with header dimensions")
    alphabet = parse_alphabet(data[_HEADER.size : start].decode("utf-8"), strict_count=False)
    if alphabet.num_classes != num_classes:
        raise ModelFormatError(
            f"embedded alphabet has {alphabet.num_classes} classes, header says {num_classes}"
        )
    flat = np.frombuffer(data, dtype="<f4", count=count, offset=start).astype(np.float64)
    arrays, pos = [], 0
    for shape in shapes:
        n = int(np.prod(shape))
        arrays.append(flat[pos : pos + n].reshape(shape).copy())
        pos += n
    model = BlstmModel.from_arrays(arrays, input_size, hidden_size, num_classes)
    return model, alphabet


def save_model(model, alphabet, path):
    Path(path).write_bytes(model_to_bytes(model, alphabet))


def load_model(path):
    """Return ``(model, alphabet)`` after verifying magic, version and CRC."""
    return model_from_bytes(Path(path).read_bytes())
