import numpy as np
import pytest

from blstm_ocr.blstm import BlstmModel, blstm_backward, blstm_forward, blstm_init
from blstm_ocr.exceptions import RejectedInputError
from blstm_ocr.lstm import lstm_forward
from blstm_ocr.numeric import glorot_limit
from helpers import max_relative_error, numeric_gradient


def random_model(rng, I, H, C, scale=0.5):
    m = blstm_init(I, H, C, seed=int(rng.integers(2**31)))
    for a in m.arrays():
        a[...] = rng.normal(scale=scale, size=a.shape)
    return m


def test_init_default_dimensions():
    m = blstm_init(48, 128, 166, seed=3)
    assert m.W_fy.shape == (166, 128)
    assert m.W_by.shape == (166, 128)
    assert m.b_y.shape == (166,)
    assert m.fwd.W_ix.shape == (128, 48)
    assert m.bwd.W_oh.shape == (128, 128)
    assert np.all(np.abs(m.W_fy) <= glorot_limit(128, 166))
    assert np.all(np.abs(m.fwd.W_cx) <= glorot_limit(48, 128))
    assert np.all(np.abs(m.fwd.W_ch) <= glorot_limit(128, 128))
    for bank in (m.fwd, m.bwd):
        for b in (bank.b_i, bank.b_f, bank.b_c, bank.b_o):
            assert not np.any(b)
    assert not np.any(m.b_y)


def test_init_deterministic():
    a, b = blstm_init(48, 8, 5, seed=9), blstm_init(48, 8, 5, seed=9)
    for x, y in zip(a.arrays(), b.arrays()):
        assert x.tobytes() == y.tobytes()


def test_init_smallest_model():
    m = blstm_init(1, 1, 2, seed=0)
    logits, _ = blstm_forward(m, np.ones((3, 1)))
    assert logits.shape == (3, 2)


@pytest.mark.parametrize("args", [(0, 1, 2), (1, 0, 2), (1, 1, 0)])
def test_init_rejects_zero_sizes(args):
    with pytest.raises(RejectedInputError):
        blstm_init(*args, seed=0)


def test_zero_model_outputs_zero(rng):
    m = blstm_init(4, 3, 5, seed=0).zeros_like()
    logits, _ = blstm_forward(m, rng.normal(size=(7, 4)))
    np.testing.assert_array_equal(logits, np.zeros((7, 5)))


def test_single_frame_both_directions_see_it(rng):
    m = random_model(rng, 3, 2, 4)
    x = rng.normal(size=(1, 3))
    hf, _ = lstm_forward(m.fwd, x)
    hb, _ = lstm_forward(m.bwd, x)
    logits, _ = blstm_forward(m, x)
    np.testing.assert_allclose(logits[0], m.W_fy @ hf[0] + m.W_by @ hb[0] + m.b_y, atol=1e-14)


def test_composition_of_two_directional_passes(rng):
    m = random_model(rng, 3, 2, 4)
    x = rng.normal(size=(4, 3))
    hf, _ = lstm_forward(m.fwd, x)
    hb_rev, _ = lstm_forward(m.bwd, x[::-1].copy())
    hb = hb_rev[::-1]
    expected = np.stack([m.W_fy @ hf[t] + m.W_by @ hb[t] + m.b_y for t in range(4)])
    logits, _ = blstm_forward(m, x)
    np.testing.assert_allclose(logits, expected, atol=1e-13)


def test_time_reversal_symmetry(rng):
    for _ in range(5):
        m = random_model(rng, 3, 4, 5)
        swapped = BlstmModel(m.bwd, m.fwd, m.W_by, m.W_fy, m.b_y)
        x = rng.normal(size=(6, 3))
        a, _ = blstm_forward(m, x)
        b, _ = blstm_forward(swapped, x[::-1].copy())
        np.testing.assert_allclose(b[::-1], a, rtol=0, atol=1e-12)


def test_output_length_equals_input_length(rng):
    m = random_model(rng, 2, 2, 3)
    for T in (1, 2, 17):
        logits, tapes = blstm_forward(m, rng.normal(size=(T, 2)))
        assert logits.shape == (T, 3)
        assert len(tapes) == T


def test_forward_rejects_wrong_frame_size(rng):
    m = random_model(rng, 3, 2, 4)
    with pytest.raises(RejectedInputError):
        blstm_forward(m, np.zeros((5, 4)))


def test_backward_zero_upstream(rng):
    m = random_model(rng, 3, 2, 4)
    _, tapes = blstm_forward(m, rng.normal(size=(5, 3)))
    g = blstm_backward(m, tapes, np.zeros((5, 4)))
    assert all(not np.any(a) for a in g.arrays())


def test_backward_rejects_length_mismatch(rng):
    m = random_model(rng, 3, 2, 4)
    _, tapes = blstm_forward(m, rng.normal(size=(5, 3)))
    with pytest.raises(RejectedInputError):
        blstm_backward(m, tapes, np.zeros((4, 4)))


def test_output_bias_gradient_is_column_sum(rng):
    m = random_model(rng, 3, 2, 4)
    _, tapes = blstm_forward(m, rng.normal(size=(5, 3)))
    up = rng.normal(size=(5, 4))
    g = blstm_backward(m, tapes, up)
    np.testing.assert_allclose(g.b_y, up.sum(axis=0), atol=1e-14)


def blstm_gradcheck(rng, I, H, C, T):
    m = random_model(rng, I, H, C)
    x = rng.normal(size=(T, I))
    w = rng.normal(size=(T, C))

    def loss():
        logits, _ = blstm_forward(m, x)
        return float(np.sum(w * logits))

    _, tapes = blstm_forward(m, x)
    g = blstm_backward(m, tapes, w)
    return max_relative_error(g.arrays(), numeric_gradient(loss, m.arrays()))


def test_gradient_hidden2_classes3_T3(rng):
    assert blstm_gradcheck(rng, 2, 2, 3, 3) <= 1e-5


def test_gradient_random_suite():
    rng = np.random.default_rng(77)
    for _ in range(10):
        H, C, T, I = rng.integers(1, 4), rng.integers(2, 5), rng.integers(1, 6), rng.integers(1, 4)
        assert blstm_gradcheck(rng, I, H, C, T) <= 1e-5
