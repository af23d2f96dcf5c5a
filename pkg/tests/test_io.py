import numpy as np
import pytest
from PIL import Image

from blstm_ocr.codec import synthetic_alphabet
from blstm_ocr.corpus_io import read_boxes, read_manifest, read_truth, write_corpus
from blstm_ocr.exceptions import ImageFormatError, ManifestError
from blstm_ocr.corpus_io import read_manifest_entries
from blstm_ocr.imageio import read_image, write_image
from blstm_ocr.synth import build_glyph_atlas, generate_corpus, make_word_list


@pytest.mark.parametrize("suffix", [".pgm", ".png"])
def test_image_round_trip(tmp_path, rng, suffix):
    img = rng.integers(0, 256, size=(7, 13), dtype=np.uint8)
    path = tmp_path / f"x{suffix}"
    write_image(path, img)
    back = read_image(path)
    assert back.dtype == np.uint8
    np.testing.assert_array_equal(back, img)


def test_pgm_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n255\n\x00\xff")
    np.testing.assert_array_equal(read_image(path), [[0, 255]])


def test_colour_png_rejected(tmp_path):
    path = tmp_path / "rgb.png"
    Image.new("RGB", (4, 4)).save(path)
    with pytest.raises(ImageFormatError, match="grayscale"):
        read_image(path)


def test_ascii_pgm_rejected(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(ImageFormatError):
        read_image(path)


def test_truncated_pgm(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n10 10\n255\n\x00\x00")
    with pytest.raises(ImageFormatError):
        read_image(path)


def test_garbage_file(tmp_path):
    path = tmp_path / "g.png"
    path.write_bytes(b"not an image at all")
    with pytest.raises(ImageFormatError):
        read_image(path)


def test_truth_strips_one_newline(tmp_path):
    p = tmp_path / "gt.txt"
    p.write_text("ab \n\n", encoding="utf-8")
    assert read_truth(p) == "ab \n"


def test_bad_manifest(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("only-one-column\n", encoding="utf-8")
    with pytest.raises(ManifestError, match="m.tsv:1"):
        read_manifest_entries(p)


def test_corpus_round_trip(tmp_path):
    alpha = synthetic_alphabet()
    atlas = build_glyph_atlas(alpha, 0)
    corpus = generate_corpus(atlas, make_word_list(alpha, 20, 0), 1, (4, 2, 3), pages=2)
    write_corpus(corpus, tmp_path)
    for name in ("train", "val", "test"):
        back = read_manifest(tmp_path / f"{name}.tsv")
        orig = getattr(corpus, name)
        assert [r.id for r in back] == [r.id for r in orig]
        assert [r.truth for r in back] == [r.truth for r in orig]
        for a, b in zip(back, orig):
            np.testing.assert_array_equal(a.image, b.image)
    page = corpus.pages[1]
    assert read_boxes(tmp_path / "pages" / f"{page.id}.boxes.txt") == list(page.boxes)
    np.testing.assert_array_equal(read_image(tmp_path / "pages" / f"{page.id}.pgm"), page.image)
