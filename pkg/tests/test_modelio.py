import struct
import zlib

import numpy as np
import pytest

from blstm_ocr.blstm import blstm_init
from blstm_ocr.codec import default_alphabet, synthetic_alphabet
from blstm_ocr.exceptions import ModelCorruptionError, ModelFormatError, ModelVersionError
from blstm_ocr.modelio import load_model, model_from_bytes, model_to_bytes, save_model


@pytest.fixture
def small():
    alpha = synthetic_alphabet()
    return blstm_init(48, 6, alpha.num_classes, seed=4), alpha


def with_crc(body):
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def test_round_trip_within_float32(tmp_path, small):
    model, alpha = small
    path = tmp_path / "m.bocr"
    save_model(model, alpha, path)
    loaded, alpha2 = load_model(path)
    assert alpha2.symbols == alpha.symbols
    assert (loaded.input_size, loaded.hidden_size, loaded.num_classes) == (48, 6, 21)
    for a, b in zip(model.arrays(), loaded.arrays()):
        assert a.shape == b.shape
        np.testing.assert_array_equal(b, a.astype(np.float32).astype(np.float64))
        assert np.all(np.abs(a - b) <= np.spacing(np.abs(a).astype(np.float32)))


def test_resave_is_byte_identical(tmp_path, small):
    model, alpha = small
    first = model_to_bytes(model, alpha)
    loaded, alpha2 = model_from_bytes(first)
    assert model_to_bytes(loaded, alpha2) == first


def test_default_alphabet_embedded(tmp_path):
    alpha = default_alphabet()
    model = blstm_init(48, 2, 166, seed=0)
    _, again = model_from_bytes(model_to_bytes(model, alpha))
    assert again.symbols == alpha.symbols and again.blank_index == 165


def test_header_fields(small):
    model, alpha = small
    data = model_to_bytes(model, alpha)
    magic, version, i, h, c = struct.unpack_from("<4sIIII", data)
    assert (magic, version, i, h, c) == (b"BOCR", 1, 48, 6, 21)


@pytest.mark.parametrize("cut", [1, 4, 100, 5000])
def test_truncated_file(small, cut):
    model, alpha = small
    data = model_to_bytes(model, alpha)
    with pytest.raises(ModelCorruptionError):
        model_from_bytes(data[:-cut])


def test_flipped_bit(small):
    model, alpha = small
    data = bytearray(model_to_bytes(model, alpha))
    data[len(data) // 2] ^= 0x10
    with pytest.raises(ModelCorruptionError):
        model_from_bytes(bytes(data))


def test_bad_magic(small):
    model, alpha = small
    data = model_to_bytes(model, alpha)
    with pytest.raises(ModelFormatError, match="magic"):
        model_from_bytes(with_crc(b"XOCR" + data[4:-4]))


def test_future_version(small):
    model, alpha = small
    data = model_to_bytes(model, alpha)
    forged = with_crc(data[:4] + struct.pack("<I", 999) + data[8:-4])
    with pytest.raises(ModelVersionError, match="999.*1..1"):
        model_from_bytes(forged)


def test_dimension_payload_mismatch(small):
    model, alpha = small
    data = model_to_bytes(model, alpha)
    forged = with_crc(data[:12] + struct.pack("<I", 7) + data[16:-4])
    with pytest.raises(ModelCorruptionError):
        model_from_bytes(forged)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_model(tmp_path / "absent.bocr")
