"""Batch rendering of corpora into image folders with a JSON Lines manifest."""

from __future__ import annotations

import hashlib
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .corpus import TOKENIZER_VERSION, tokenize, word_count_stats
from .errors import SewError
from .glyphfont import BASE_RESOLUTION
from .layout import SCHEMES, plan_scheme
from .profile import encode_profile
from .render import encode, render

FONT_ID = f"font8x8-x2/{BASE_RESOLUTION}"
MANIFEST_NAME = "manifest.jsonl"
SUMMARY_NAME = "summary.json"


@dataclass
class ManifestEntry:
    id: str
    image: str | None
    labels: dict
    words_placed: int
    words_truncated: int
    scheme: str
    fingerprint: str
    error: str | None = None


@dataclass
class DatasetManifest:
    entries: list = field(default_factory=list)
    fingerprint: str = ""

    @property
    def errors(self):
        return [e for e in self.entries if e.error is not None]

    def to_jsonl(self):
        return "".join(json.dumps(asdict(e), sort_keys=True) + "\n" for e in self.entries)

    @classmethod
    def read(cls, path):
        entries = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    entries.append(ManifestEntry(**json.loads(line)))
        fp = entries[0].fingerprint if entries else ""
        return cls(entries, fp)


def config_fingerprint(config, scheme, blueprint=None, *, fallback=True):
    """Short hash of every setting that can change a rendered pixel."""
    payload = {
        "config": config.to_dict(),
        "scheme": scheme,
        "blueprint": blueprint.to_text() if blueprint is not None else None,
        "tokenizer": TOKENIZER_VERSION,
        "font": FONT_ID,
        "fallback": bool(fallback),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


def safe_names(ids):
    """Filesystem-safe, case-insensitively unique stems for a list of ids.

    Unsafe runs become "_"; a clash gets "-1", "-2", ... appended.
    """
    taken, out = set(), []
    for raw in ids:
        stem = _UNSAFE.sub("_", str(raw)).lstrip(".")[:120] or "sample"
        candidate, k = stem, 0
        while candidate.lower() in taken:
            k += 1
            candidate = f"{stem}-{k}"
        taken.add(candidate.lower())
        out.append(candidate)
    return out


def render_sample(sample, config, scheme, *, blueprint=None, fallback=True):
    """Plan and render one corpus sample; returns (plan, image)."""
    profile_tokens = encode_profile(sample.profile) if sample.profile is not None else []
    plan = plan_scheme(scheme, tokenize(sample.text), config, profile_tokens=profile_tokens, blueprint=blueprint)
    return plan, render(plan, config, fallback=fallback)


def batch_render(corpus, config, scheme, out_dir, image_format="pgm", *, blueprint=None, fallback=True,
                 workers=1):
    """Render every sample to ``out_dir/<id>.<ext>`` and write the manifest.

    A sample that fails to lay out or render gets an error entry and no
    image; the rest of the batch continues. Manifest lines follow corpus
    order whatever the worker count.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    corpus = list(corpus)
    os.makedirs(out_dir, exist_ok=True)
    fingerprint = config_fingerprint(config, scheme, blueprint, fallback=fallback)
    names = safe_names(s.id for s in corpus)

    def work(item):
        sample, name = item
        try:
            plan, image = render_sample(sample, config, scheme, blueprint=blueprint, fallback=fallback)
        except SewError as exc:
            n_words = len(tokenize(sample.text))
            return ManifestEntry(sample.id, None, dict(sample.labels), 0, n_words, scheme, fingerprint,
                                 f"{type(exc).__name__}: {exc}")
        filename = f"{name}.{image_format}"
        with open(os.path.join(out_dir, filename), "wb") as fh:
            fh.write(encode(image, image_format))
        return ManifestEntry(sample.id, filename, dict(sample.labels), plan.words_placed, plan.words_truncated,
                             scheme, fingerprint)

    items = list(zip(corpus, names))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(work, items))
    else:
        entries = [work(item) for item in items]

    manifest = DatasetManifest(entries, fingerprint)
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_jsonl())
    with open(os.path.join(out_dir, SUMMARY_NAME), "w", encoding="utf-8") as fh:
        json.dump(summarize(manifest, corpus, config, scheme), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def summarize(manifest, corpus, config, scheme):
    n = len(manifest.entries)
    rendered = [e for e in manifest.entries if e.error is None]
    summary = {
        "scheme": scheme,
        "fingerprint": manifest.fingerprint,
        "config": config.to_dict(),
        "samples": n,
        "images": len(rendered),
        "errors": n - len(rendered),
        "truncated_fraction": (sum(1 for e in rendered if e.words_truncated) / len(rendered)) if rendered else 0.0,
    }
    if corpus:
        summary["stats"] = word_count_stats(corpus, (config.cut_length,)).to_dict()
    return summary
