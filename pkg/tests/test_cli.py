import subprocess
import sys

import pytest

from blstm_ocr.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from blstm_ocr.codec import synthetic_alphabet, save_alphabet
from blstm_ocr.corpus_io import read_boxes
from blstm_ocr.imageio import read_image
from blstm_ocr.trainer import read_reports


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    alpha = root / "alpha.txt"
    save_alphabet(synthetic_alphabet(), alpha)
    assert main(["synth", "--alphabet", str(alpha), "--relax-alphabet", "--counts", "6,3,3",
                 "--seed", "2", "--pages", "2", "--out-dir", str(root / "corpus")]) == EXIT_OK
    assert main(["train", "--manifest", str(root / "corpus/train.tsv"),
                 "--val", str(root / "corpus/val.tsv"), "--alphabet", str(alpha),
                 "--relax-alphabet", "--hidden", "4", "--max-epochs", "2", "--lr", "1e-3",
                 "--out", str(root / "m.bocr"), "--report", str(root / "report.csv")]) == EXIT_OK
    return root


def test_synth_layout(workspace):
    corpus = workspace / "corpus"
    assert len((corpus / "train.tsv").read_text().splitlines()) == 6
    assert len(list((corpus / "pages").glob("*.pgm"))) == 2


def test_train_outputs(workspace):
    reps = read_reports(workspace / "report.csv")
    assert [r.epoch for r in reps] == [1, 2]
    assert (workspace / "m.bocr").read_bytes()[:4] == b"BOCR"


def test_recognize(workspace, capsys):
    images = sorted(str(p) for p in (workspace / "corpus/test").glob("*.pgm"))
    assert main(["recognize", "--model", str(workspace / "m.bocr"), *images]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert [line.split("\t")[0] for line in out] == images


def test_recognize_jobs_match_serial(workspace, capsys):
    images = sorted(str(p) for p in (workspace / "corpus/test").glob("*.pgm"))
    main(["recognize", "--model", str(workspace / "m.bocr"), *images])
    serial = capsys.readouterr().out
    main(["recognize", "--model", str(workspace / "m.bocr"), "--jobs", "3", *images])
    assert capsys.readouterr().out == serial


def test_evaluate(workspace, capsys):
    report = workspace / "eval.csv"
    assert main(["evaluate", "--model", str(workspace / "m.bocr"),
                 "--manifest", str(workspace / "corpus/test.tsv"),
                 "--report", str(report)]) == EXIT_OK
    rows = report.read_text().splitlines()
    assert rows[0] == "line_id,char_med,ref_chars,word_med,ref_words"
    assert rows[-2].startswith("CA_percent,") and rows[-1].startswith("WA_percent,")
    assert "CA" in capsys.readouterr().out


def test_segment(workspace, tmp_path):
    page = next((workspace / "corpus/pages").glob("*.pgm"))
    truth = read_boxes(page.with_suffix(".boxes.txt"))
    assert main(["segment", str(page), "--out-dir", str(tmp_path), "--emit-boxes"]) == EXIT_OK
    lines = sorted(tmp_path.glob("*-line*.pgm"))
    assert len(lines) == len(truth)
    assert len(read_boxes(tmp_path / f"{page.stem}.boxes.txt")) == len(truth)
    assert all(read_image(p).ndim == 2 for p in lines)


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["synth", "--alphabet", "a.txt", "--counts", "1,2", "--seed", "0", "--out-dir", "x"],
    ["train", "--manifest", "x.tsv"],
    ["recognize", "--model", "m.bocr"],
    ["recognize", "--model", "m.bocr", "--beam", "0", "x.pgm"],
    ["recognize", "--model", "m.bocr", "--jobs", "0", "x.pgm"],
    ["segment", "p.pgm", "--out-dir", "o", "--strips", "0"],
    ["synth", "--alphabet", "a.txt", "--counts", "1,1,1", "--seed", "0", "--out-dir", "x",
     "--pages", "-1"],
    ["train", "--manifest", "t", "--val", "v", "--alphabet", "a", "--out", "m", "--report", "r",
     "--hidden", "0"],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_data_errors(workspace, tmp_path):
    assert main(["recognize", "--model", str(tmp_path / "missing.bocr"), "x.pgm"]) == EXIT_DATA
    bad = tmp_path / "bad.bocr"
    bad.write_bytes(b"XOCR" + bytes(40))
    assert main(["recognize", "--model", str(bad), "x.pgm"]) == EXIT_DATA
    page = tmp_path / "blank.pgm"
    page.write_bytes(b"P5\n4 4\n255\n" + bytes([255]) * 16)
    assert main(["segment", str(page), "--out-dir", str(tmp_path / "o")]) == EXIT_OK
    assert not list((tmp_path / "o").glob("*.pgm"))  # blank page: no lines, not an error
    junk = tmp_path / "junk.png"
    junk.write_text("not an image")
    assert main(["segment", str(junk), "--out-dir", str(tmp_path / "o")]) == EXIT_DATA
    alpha = tmp_path / "a.txt"
    save_alphabet(synthetic_alphabet(), alpha)
    assert main(["synth", "--alphabet", str(alpha), "--relax-alphabet", "--counts", "1,1,1",
                 "--seed", "0", "--out-dir", str(tmp_path / "c"), "--degrade", "noise=abc"]) == EXIT_DATA
    # 21-entry manifest without --relax-alphabet
    assert main(["synth", "--alphabet", str(alpha), "--counts", "1,1,1", "--seed", "0",
                 "--out-dir", str(tmp_path / "c")]) == EXIT_DATA


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "blstm_ocr.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()
