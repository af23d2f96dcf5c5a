"""On-disk corpora: line images, ground-truth files and TSV manifests.

A manifest line is ``<image-path>\\t<ground-truth-path>``; relative paths
are resolved against the manifest's directory.  Ground-truth files hold the
UTF-8 text of one line (a trailing newline is ignored).
"""

from pathlib import Path

from .exceptions import ManifestError
from .imageio import read_image, write_image
from .preprocessing import LineBox
from .synth import LineRecord


def read_truth(path):
    text = Path(path).read_text(encoding="utf-8")
    return text[:-1] if text.endswith("\n") else text


def read_manifest_entries(path):
    """``(image_path, truth_path)`` pairs from a training manifest."""
    path = Path(path)
    base = path.parent
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 2:
            raise ManifestError(f"{path}:{lineno}: expected <image>\\t<ground-truth>")
        entries.append(tuple(base / p for p in parts))
    return entries


def read_manifest(path):
    return [
        LineRecord(read_image(img), read_truth(gt), id=img.stem)
        for img, gt in read_manifest_entries(path)
    ]


def write_split(records, directory, manifest_path, suffix=".pgm"):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest_path = Path(manifest_path)
    rows = []
    for rec in records:
        img = directory / f"{rec.id}{suffix}"
        gt = directory / f"{rec.id}.gt.txt"
        write_image(img, rec.image)
        gt.write_text(rec.truth, encoding="utf-8")
        rows.append(
            f"{img.relative_to(manifest_path.parent).as_posix()}\t"
            f"{gt.relative_to(manifest_path.parent).as_posix()}"
        )
    manifest_path.write_text("".join(r + "\n" for r in rows), encoding="utf-8")


def write_page(page, directory):
    """Page image plus ``.boxes.txt`` (``top,bottom,left,right`` per line) and ``.gt.txt``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_image(directory / f"{page.id}.pgm", page.image)
    (directory / f"{page.id}.boxes.txt").write_text(
        "".join(f"{b.top},{b.bottom},{b.left},{b.right}\n" for b in page.boxes), encoding="utf-8"
    )
    (directory / f"{page.id}.gt.txt").write_text(
        "".join(t + "\n" for t in page.truths), encoding="utf-8"
    )


def read_boxes(path):
    boxes = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if raw.strip():
            boxes.append(LineBox(*(int(v) for v in raw.split(","))))
    return boxes


def write_corpus(corpus, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in ("train", "val", "test"):
        write_split(getattr(corpus, name), out_dir / name, out_dir / f"{name}.tsv")
    for page in corpus.pages:
        write_page(page, out_dir / "pages")
