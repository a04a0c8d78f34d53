"""Command-line interface: ``sewglyph <subcommand> ...``.

Exit status: 0 success, 1 partial success (some samples failed), 2 bad
configuration or input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .corpus import (
    ColumnMap,
    LoadReport,
    load_corpus,
    read_table,
    split_train_test,
    tokenize,
    truncation_report,
    word_count_stats,
)
from .dataset import DatasetManifest, batch_render
from .errors import SewError
from .evalkit import downsample, evaluate, train_linear
from .glyphfont import rasterize_scaled
from .layout import SCHEMES, BlueprintGrid, attention_blueprint, default_config, plan_scheme
from .profile import encode_profile, parse_profile_arg
from .render import ImageBuffer, encode, read_image, render

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("sewglyph")


def _pairs(values, flag):
    out = {}
    for item in values or ():
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise SewError(f"{flag} expects NAME=COLUMN, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _add_layout_flags(p):
    p.add_argument("--mode", choices=SCHEMES, default="sew")
    p.add_argument("--image-px", type=int)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--cut-length", type=int)
    p.add_argument("--attn-count", type=int)
    p.add_argument("--attn-scale", type=int)
    p.add_argument("--chars-per-row", type=int)
    p.add_argument("--margin-px", type=int)
    p.add_argument("--blueprint", metavar="FILE", help="attention blueprint override (plain-text grid)")
    p.add_argument("--no-fallback", action="store_true", help="fail on characters outside the font")
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")


def _add_corpus_flags(p):
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--text-col", required=True)
    p.add_argument("--id-col")
    p.add_argument("--label-col", action="append", metavar="NAME=COLUMN")
    p.add_argument("--profile-col", action="append", metavar="FIELD=COLUMN")


def _config_from(args):
    return default_config(
        args.mode,
        image_px=args.image_px,
        grid_n=args.grid_n,
        cut_length=args.cut_length,
        attn_count=args.attn_count,
        attn_scale=args.attn_scale,
        chars_per_row=args.chars_per_row,
        margin_px=args.margin_px,
    )


def _blueprint_from(args):
    if not args.blueprint:
        return None
    with open(args.blueprint) as fh:
        return BlueprintGrid.from_text(fh.read())


def _load(args):
    cmap = ColumnMap(
        text=args.text_col,
        id=args.id_col,
        labels=_pairs(args.label_col, "--label-col"),
        profile=_pairs(getattr(args, "profile_col", None), "--profile-col"),
    )
    report = LoadReport()
    samples = load_corpus(args.input, args.input_format, cmap, report=report)
    return samples, report


def _write(path, data):
    if path == "-":
        sys.stdout.buffer.write(data)
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def cmd_render(args):
    config = _config_from(args)
    profile_tokens = encode_profile(parse_profile_arg(args.profile)) if args.profile else []
    plan = plan_scheme(args.mode, tokenize(args.text), config, profile_tokens=profile_tokens,
                       blueprint=_blueprint_from(args))
    image = render(plan, config, fallback=not args.no_fallback)
    _write(args.out, encode(image, args.format))
    log.info("placed %d words, truncated %d", plan.words_placed, plan.words_truncated)
    return EXIT_OK


def cmd_batch(args):
    config = _config_from(args)
    samples, report = _load(args)
    blueprint = _blueprint_from(args)
    if args.split_ratio:
        train, test = split_train_test(samples, args.split_ratio, args.seed)
        parts = {"train": train, "test": test}
    else:
        parts = {"": samples}
    failed = 0
    for name, part in parts.items():
        out_dir = os.path.join(args.out_dir, name) if name else args.out_dir
        manifest = batch_render(part, config, args.mode, out_dir, args.format, blueprint=blueprint,
                                fallback=not args.no_fallback, workers=args.workers)
        failed += len(manifest.errors)
        print(f"{out_dir}: {len(manifest.entries) - len(manifest.errors)} images, "
              f"{len(manifest.errors)} errors, fingerprint {manifest.fingerprint}")
    if report.malformed:
        print(f"skipped {len(report.malformed)} malformed row(s)", file=sys.stderr)
    return EXIT_PARTIAL if failed or report.malformed else EXIT_OK


def cmd_stats(args):
    samples, _ = _load(args)
    stats = word_count_stats(samples, tuple(args.coverage or (25, 64)))
    result = stats.to_dict()
    result["cut_length"] = args.cut_length
    result["truncated_fraction"] = truncation_report(samples, args.cut_length)
    if args.histogram_csv:
        with open(args.histogram_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["word_count", "count"])
            w.writerows(stats.histogram.items())
    if args.json:
        print(json.dumps(result, indent=2))
        return EXIT_OK
    print(f"samples        {stats.n_samples}")
    print(f"mean words     {stats.mean_words:.2f}")
    print(f"median words   {stats.median_words:g}")
    print(f"max words      {stats.max_words}")
    for k, v in stats.coverage.items():
        print(f"coverage({k:>3})  {100 * v:.2f}%")
    print(f"truncated (>{args.cut_length})  {100 * result['truncated_fraction']:.2f}%")
    return EXIT_OK


def cmd_split(args):
    header, rows = read_table(args.input, args.input_format)
    train, test = split_train_test(rows, args.ratio, args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    delim = "," if args.input_format == "csv" else "\t"
    ext = args.input_format
    for name, part in (("train", train), ("test", test)):
        with open(os.path.join(args.out_dir, f"{name}.{ext}"), "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=header, delimiter=delim, extrasaction="ignore")
            w.writeheader()
            w.writerows(part)
    print(f"train {len(train)}  test {len(test)}")
    return EXIT_OK


def cmd_blueprint(args):
    if args.action == "emit":
        grid = attention_blueprint(args.grid_n, args.attn_count, args.attn_scale)
        _write(args.out, grid.to_text().encode())
        return EXIT_OK
    with open(args.file) as fh:
        grid = BlueprintGrid.from_text(fh.read())
    print(f"valid {grid.n}x{grid.n} blueprint: {grid.count(1)} anchors, "
          f"{grid.count(-1)} covered, {grid.count(0)} flow cells")
    return EXIT_OK


def cmd_eval(args):
    manifest = DatasetManifest.read(args.manifest)
    root = os.path.dirname(os.path.abspath(args.manifest))
    feats, labels, image_px = [], [], None
    for entry in manifest.entries:
        if entry.error is not None or args.label_name not in entry.labels:
            continue
        image = read_image(os.path.join(root, entry.image))
        image_px = image.width
        feats.append(downsample(image, args.factor))
        labels.append(entry.labels[args.label_name])
    if len(feats) < 2:
        raise SewError(f"manifest has fewer than 2 usable samples with label {args.label_name!r}")
    idx_train, idx_test = split_train_test(range(len(feats)), args.ratio, args.seed)
    X, y = np.array(feats), np.array(labels)
    model = train_linear(X[idx_train], y[idx_train], epochs=args.epochs, learning_rate=args.lr, l2=args.l2,
                         seed=args.seed, factor=args.factor, image_px=image_px)
    for name, idx in (("train", idx_train), ("test", idx_test)):
        if not idx:
            continue
        r = evaluate(model, X[idx], y[idx])
        print(f"{name:5s} accuracy {r.accuracy:.4f}  tp={r.tp} fp={r.fp} tn={r.tn} fn={r.fn}")
    if args.model_out:
        model.save(args.model_out)
    return EXIT_OK


def cmd_glyph(args):
    block = rasterize_scaled(args.char, args.size)
    image = ImageBuffer.from_array(np.where(block == 1, 0, 255))
    _write(args.out, encode(image, "pgm"))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sewglyph", description="Render English text as squared-word glyph images.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one sentence")
    _add_layout_flags(p)
    p.add_argument("--text", required=True)
    p.add_argument("--profile", help="age=..,country=..,marriage=..,gender=..")
    p.add_argument("--out", required=True, help="output file, or - for stdout")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("batch", help="render a corpus into an image dataset")
    _add_layout_flags(p)
    _add_corpus_flags(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--split-ratio", type=float, help="also split into train/ and test/ subfolders")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("stats", help="word-count statistics and histogram")
    _add_corpus_flags(p)
    p.add_argument("--coverage", type=int, action="append", metavar="K")
    p.add_argument("--cut-length", type=int, default=36)
    p.add_argument("--histogram-csv")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="seeded train/test split of a CSV/TSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("blueprint", help="emit or validate an attention blueprint")
    bsub = p.add_subparsers(dest="action", required=True)
    e = bsub.add_parser("emit")
    e.add_argument("--grid-n", type=int, default=8)
    e.add_argument("--attn-count", type=int, default=4)
    e.add_argument("--attn-scale", type=int, default=2)
    e.add_argument("--out", default="-")
    v = bsub.add_parser("validate")
    v.add_argument("file")
    p.set_defaults(func=cmd_blueprint)

    p = sub.add_parser("eval", help="train and test the linear pixel baseline on a rendered dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--label-name", required=True)
    p.add_argument("--factor", type=int, default=28)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--model-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("glyph", help="dump one glyph at a given cell size as PGM")
    p.add_argument("--char", required=True)
    p.add_argument("--size", type=int, default=16)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_glyph)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (SewError, OSError) as exc:
        print(f"sewglyph: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
