"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .codec import load_alphabet
from .corpus_io import read_manifest, read_manifest_entries, read_truth, write_corpus
from .evaluation import score_corpus
from .exceptions import OcrError
from .imageio import read_image, write_image
from .modelio import load_model, save_model
from .preprocessing import SegmentationConfig, segment_lines
from .recognition import recognize_line
from .synth import Degradation, build_glyph_atlas, generate_corpus, make_word_list
from .trainer import TrainConfig, append_report, train

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("blstm_ocr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _counts(value):
    try:
        counts = tuple(int(v) for v in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected three integers, e.g. 500,100,100")
    if len(counts) != 3 or min(counts) < 1:
        raise argparse.ArgumentTypeError("expected three positive integers, e.g. 500,100,100")
    return counts


def _int_at_least(low):
    def parse(value):
        try:
            n = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}")
        if n < low:
            raise argparse.ArgumentTypeError(f"must be >= {low}, got {n}")
        return n

    return parse


positive = _int_at_least(1)
non_negative = _int_at_least(0)


def cmd_segment(args):
    page = read_image(args.page)
    boxes = segment_lines(page, SegmentationConfig(strips=args.strips))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.page).stem
    for k, box in enumerate(boxes):
        write_image(out / f"{stem}-line{k:03d}.pgm", box.crop(page))
    if args.emit_boxes:
        (out / f"{stem}.boxes.txt").write_text(
            "".join(f"{b.top},{b.bottom},{b.left},{b.right}\n" for b in boxes), encoding="utf-8"
        )
    print(f"{len(boxes)} lines written to {out}")


def cmd_synth(args):
    alphabet = load_alphabet(args.alphabet, strict_count=not args.relax_alphabet)
    atlas = build_glyph_atlas(alphabet, args.style_seed)
    if args.words:
        words = [w for w in Path(args.words).read_text(encoding="utf-8").split() if w]
    else:
        words = make_word_list(alphabet, args.n_words, args.seed)
    corpus = generate_corpus(atlas, words, args.seed, args.counts,
                             Degradation.parse(args.degrade), pages=args.pages)
    write_corpus(corpus, args.out_dir)
    print(f"wrote {sum(args.counts)} lines and {args.pages} pages to {args.out_dir}")


def cmd_train(args):
    alphabet = load_alphabet(args.alphabet, strict_count=not args.relax_alphabet)
    cfg = TrainConfig(
        learning_rate=args.lr,
        momentum=args.momentum,
        max_epochs=args.max_epochs,
        hidden_size=args.hidden,
        seed=args.seed,
        grad_clip=args.grad_clip,
        shuffle=not args.no_shuffle,
    )
    train_set = read_manifest(args.manifest)
    val_set = read_manifest(args.val)
    report = Path(args.report)
    if report.exists():
        report.unlink()
    result = train(train_set, val_set, alphabet, cfg, on_epoch=lambda r: append_report(report, r))
    save_model(result.model, alphabet, args.out)
    for issue in result.issues:
        print(f"skipped {issue.id}: {issue.reason}", file=sys.stderr)
    print(f"best epoch {result.best_epoch} of {len(result.reports)}; model written to {args.out}")


def _recognize_all(model, alphabet, paths, beam, jobs):
    def one(path):
        return recognize_line(model, alphabet, read_image(path), beam)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(one, paths))
    return [one(p) for p in paths]


def cmd_recognize(args):
    model, alphabet = load_model(args.model)
    texts = _recognize_all(model, alphabet, args.images, args.beam, args.jobs)
    for path, text in zip(args.images, texts):
        print(f"{path}\t{text}")


def cmd_evaluate(args):
    model, alphabet = load_model(args.model)
    entries = read_manifest_entries(args.manifest)
    hyps = _recognize_all(model, alphabet, [img for img, _ in entries], args.beam, args.jobs)
    refs = [read_truth(gt) for _, gt in entries]
    report = score_corpus(zip(hyps, refs), ids=[img.stem for img, _ in entries])
    Path(args.report).write_text(report.to_csv(), encoding="utf-8")
    print(report.summary(), end="")


def build_parser():
    p = _Parser(prog="blstm-ocr", description="BLSTM-CTC printed text-line OCR")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("segment", help="split a page image into line images")
    s.add_argument("page")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--strips", type=positive, default=4)
    s.add_argument("--emit-boxes", action="store_true")
    s.set_defaults(func=cmd_segment)

    s = sub.add_parser("synth", help="generate a synthetic corpus")
    s.add_argument("--alphabet", required=True)
    s.add_argument("--counts", type=_counts, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--degrade", default="none", help='e.g. "noise=10,scale=0.1,jitter=2"')
    s.add_argument("--pages", type=non_negative, default=0)
    s.add_argument("--words", help="whitespace-separated word list (default: random words)")
    s.add_argument("--n-words", type=positive, default=200)
    s.add_argument("--style-seed", type=int, default=0)
    s.add_argument("--relax-alphabet", action="store_true",
                   help="accept manifests that do not list exactly 165 symbols")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("train", help="train a model from line manifests")
    s.add_argument("--manifest", required=True)
    s.add_argument("--val", required=True)
    s.add_argument("--alphabet", required=True)
    s.add_argument("--hidden", type=positive, default=128)
    s.add_argument("--lr", type=float, default=1e-4)
    s.add_argument("--momentum", type=float, default=0.9)
    s.add_argument("--max-epochs", type=positive, default=80)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grad-clip", type=float, default=None)
    s.add_argument("--no-shuffle", action="store_true")
    s.add_argument("--relax-alphabet", action="store_true")
    s.add_argument("--out", required=True)
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("recognize", help="recognize line images")
    s.add_argument("--model", required=True)
    s.add_argument("images", nargs="+")
    s.add_argument("--beam", type=positive, default=10)
    s.add_argument("--jobs", type=positive, default=1)
    s.set_defaults(func=cmd_recognize)

    s = sub.add_parser("evaluate", help="score a model on a test manifest")
    s.add_argument("--model", required=True)
    s.add_argument("--manifest", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--beam", type=positive, default=10)
    s.add_argument("--jobs", type=positive, default=1)
    s.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (OcrError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort reporting
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
