"""Layout planning: turns token sequences into ordered draw commands.

Every scheme works on an integer pixel grid. Grid schemes give each word its
own square region; letters inside a region sit on a c x c sub-grid with
c = ceil(sqrt(len(word))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import (
    BlueprintFormatError,
    BlueprintOverflow,
    ConfigError,
    SquareTooSmall,
    WordTooLong,
)

SCHEMES = ("raw", "raw-linewrap", "sew", "sew-attn", "sew-profile", "sew-attn-profile")
PROFILE_MODES = ("uniform", "attended")


@dataclass(frozen=True)
class RenderConfig:
    image_px: int = 224
    grid_n: int = 6
    cut_length: int = 36
    attn_count: int = 0
    attn_scale: int = 2
    chars_per_row: int = 16
    margin_px: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{f.name} must be an integer, got {value!r}")
        if self.image_px < 1:
            raise ConfigError("image_px must be >= 1")
        if self.margin_px < 0:
            raise ConfigError("margin_px must be >= 0")
        for name in ("grid_n", "cut_length", "attn_scale", "chars_per_row"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.attn_count < 0:
            raise ConfigError("attn_count must be >= 0")
        if self.usable_px < max(self.grid_n, self.chars_per_row):
            raise ConfigError(
                f"usable width {self.usable_px}px leaves no room for "
                f"grid_n={self.grid_n} / chars_per_row={self.chars_per_row}"
            )
        if self.attn_count * self.attn_scale**2 > self.grid_n**2:
            raise ConfigError(
                f"{self.attn_count} attended words at scale {self.attn_scale} "
                f"need more than the {self.grid_n**2} grid cells"
            )

    @property
    def usable_px(self):
        return self.image_px - 2 * self.margin_px

    @property
    def cell_side(self):
        """Pixel side of one grid cell in SEW schemes."""
        return self.usable_px // self.grid_n

    @property
    def grid_origin(self):
        """Top-left pixel of the centred grid block (same for x and y)."""
        return self.margin_px + (self.usable_px - self.grid_n * self.cell_side) // 2

    @property
    def char_cell(self):
        """Pixel side of one character cell in raw schemes."""
        return self.usable_px // self.chars_per_row

    @property
    def char_rows(self):
        return self.usable_px // self.char_cell

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def default_config(scheme, **overrides):
    """Configuration used for each scheme unless the caller overrides it.

    Grid-8 attention schemes get cut_length = 64 so that blueprint capacity,
    not the cut, bounds the word count.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")
    base = {
        "raw": dict(chars_per_row=16, cut_length=256),
        "raw-linewrap": dict(chars_per_row=16, cut_length=256),
        "sew": dict(grid_n=6, cut_length=36),
        "sew-profile": dict(grid_n=6, cut_length=36),
        "sew-attn": dict(grid_n=8, cut_length=64, attn_count=4, attn_scale=2),
        "sew-attn-profile": dict(grid_n=8, cut_length=64, attn_count=4, attn_scale=2),
    }[scheme]
    base.update({k: v for k, v in overrides.items() if v is not None})
    return RenderConfig(**base)


@dataclass(frozen=True)
class SquareRegion:
    x: int
    y: int
    side: int

    def __post_init__(self):
        if self.side < 1:
            raise ValueError(f"square side must be >= 1, got {self.side}")

    def contains_cell(self, x, y, size):
        return self.x <= x and self.y <= y and x + size <= self.x + self.side and y + size <= self.y + self.side

    def inside_image(self, image_px):
        return self.x >= 0 and self.y >= 0 and self.x + self.side <= image_px and self.y + self.side <= image_px


@dataclass(frozen=True)
class DrawCommand:
    character: str
    x: int
    y: int
    cell_px: int


@dataclass(frozen=True)
class LayoutPlan:
    commands: tuple
    words_placed: int
    words_truncated: int
    scheme: str
    # Every token drawn, in placement order (profile tokens included), and
    # for grid schemes the square each one occupies.
    tokens: tuple = ()
    regions: tuple = ()
    profile_placed: int = 0

    @property
    def word_count(self):
        return self.words_placed + self.words_truncated


# -- word squares -------------------------------------------------------------


def letters_per_side(length):
    return math.isqrt(length - 1) + 1 if length > 0 else 0


def word_square_plan(word, square):
    """Lay a word's letters row-major on a c x c sub-grid of ``square``.

    c = ceil(sqrt(len(word))) and each letter cell is floor(side / c)
    pixels, so the letters never leave the square even when len(word) is not
    a perfect square.
    """
    if not word:
        return []
    c = letters_per_side(len(word))
    if square.side < c:
        raise SquareTooSmall(f"{square.side}px square cannot hold {len(word)} letters ({c} per side)")
    step = square.side // c
    return [
        DrawCommand(ch, square.x + (i % c) * step, square.y + (i // c) * step, step)
        for i, ch in enumerate(word)
    ]


def _grid_square(config, row, col, span=1):
    side = config.cell_side
    origin = config.grid_origin
    return SquareRegion(origin + col * side, origin + row * side, span * side)


def _place(tokens, squares):
    commands = []
    for token, square in zip(tokens, squares):
        commands.extend(word_square_plan(token, square))
    return tuple(commands)


def sew_grid_plan(words, config, *, scheme="sew"):
    """One word per grid cell, row-major, up to min(cut_length, grid_n**2) words."""
    words = list(words)
    n = config.grid_n
    limit = min(len(words), config.cut_length, n * n)
    placed = tuple(words[:limit])
    squares = tuple(_grid_square(config, i // n, i % n) for i in range(limit))
    return LayoutPlan(_place(placed, squares), limit, len(words) - limit, scheme, placed, squares)


# -- attention blueprint -------------------------------------------------------


@dataclass(frozen=True)
class BlueprintGrid:
    """n x n grid: 0 = flow cell, 1 = anchor of an attention square, -1 = covered."""

    n: int
    cells: tuple

    def __post_init__(self):
        cells = tuple(tuple(int(v) for v in row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        if self.n < 1 or len(cells) != self.n or any(len(row) != self.n for row in cells):
            raise BlueprintFormatError(f"blueprint must be {self.n}x{self.n}")
        if any(v not in (-1, 0, 1) for row in cells for v in row):
            raise BlueprintFormatError("blueprint values must be -1, 0 or 1")
        self._check_blocks()

    def _block_size(self, r, c):
        s = 1
        while c + s < self.n and self.cells[r][c + s] == -1:
            s += 1
        return s

    def _check_blocks(self):
        owner = [[None] * self.n for _ in range(self.n)]
        for r, c, s in self.anchors():
            if r + s > self.n:
                raise BlueprintFormatError(f"attention block at ({r},{c}) runs off the grid")
            for dr in range(s):
                for dc in range(s):
                    expected = 1 if dr == dc == 0 else -1
                    if self.cells[r + dr][c + dc] != expected or owner[r + dr][c + dc] is not None:
                        raise BlueprintFormatError(f"malformed attention block at ({r},{c}) of size {s}")
                    owner[r + dr][c + dc] = (r, c)
        for r in range(self.n):
            for c in range(self.n):
                if self.cells[r][c] == -1 and owner[r][c] is None:
                    raise BlueprintFormatError(f"cell ({r},{c}) is -1 but belongs to no attention block")

    def anchors(self):
        """(row, col, block size) for every anchor cell, row-major."""
        return [
            (r, c, self._block_size(r, c))
            for r in range(self.n)
            for c in range(self.n)
            if self.cells[r][c] == 1
        ]

    def count(self, value):
        return sum(row.count(value) for row in self.cells)

    def to_text(self):
        lines = [str(self.n)] + [" ".join(str(v) for v in row) for row in self.cells]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise BlueprintFormatError("empty blueprint")
        try:
            n = int(lines[0])
            rows = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
        except ValueError as exc:
            raise BlueprintFormatError(f"non-integer token in blueprint: {exc}") from None
        return cls(n, tuple(rows))

    @classmethod
    def zeros(cls, n):
        return cls(n, tuple((0,) * n for _ in range(n)))


def attention_blueprint(grid_n, attn_count, attn_scale):
    """Centre ``attn_count`` square blocks of ``attn_scale`` cells in the grid.

    Blocks are arranged ceil(sqrt(count)) per row, filled row-major and
    left-aligned; the whole group is centred with its top-left corner
    rounded down to whole cells.
    """
    if grid_n < 1 or attn_count < 0 or attn_scale < 1:
        raise ConfigError("need grid_n >= 1, attn_count >= 0, attn_scale >= 1")
    cells = [[0] * grid_n for _ in range(grid_n)]
    if attn_count:
        per_row = letters_per_side(attn_count)
        block_rows = -(-attn_count // per_row)
        width, height = per_row * attn_scale, block_rows * attn_scale
        if width > grid_n or height > grid_n:
            raise BlueprintOverflow(
                f"{attn_count} blocks of {attn_scale}x{attn_scale} need {height}x{width} cells; grid is {grid_n}x{grid_n}"
            )
        top, left = (grid_n - height) // 2, (grid_n - width) // 2
        for k in range(attn_count):
            br, bc = divmod(k, per_row)
            r0, c0 = top + br * attn_scale, left + bc * attn_scale
            for dr in range(attn_scale):
                for dc in range(attn_scale):
                    cells[r0 + dr][c0 + dc] = -1
            cells[r0][c0] = 1
    return BlueprintGrid(grid_n, tuple(map(tuple, cells)))


def _blueprint_layout(anchor_tokens, flow_tokens, blueprint, config):
    """Assign tokens to blueprint cells, scanning row-major.

    Anchor cells (1) take ``anchor_tokens`` in order, flow cells (0) take
    ``flow_tokens``, covered cells (-1) are skipped. The result lists anchor
    placements first so that placement order matches input order.
    """
    anchors = blueprint.anchors()
    placed = [(t, _grid_square(config, r, c, s)) for t, (r, c, s) in zip(anchor_tokens, anchors)]
    flow_cells = [(r, c) for r in range(blueprint.n) for c in range(blueprint.n) if blueprint.cells[r][c] == 0]
    placed += [(t, _grid_square(config, r, c)) for t, (r, c) in zip(flow_tokens, flow_cells)]
    return tuple(t for t, _ in placed), tuple(sq for _, sq in placed)


def sew_attention_plan(words, blueprint, config, *, scheme="sew-attn"):
    """The first words go into anchor squares, the rest flow through 0-cells."""
    if blueprint.n != config.grid_n:
        raise ConfigError(f"blueprint is {blueprint.n}x{blueprint.n} but grid_n={config.grid_n}")
    words = list(words)
    n_anchor = blueprint.count(1)
    limit = min(len(words), config.cut_length, n_anchor + blueprint.count(0))
    n_att = min(n_anchor, limit)
    tokens, squares = _blueprint_layout(words[:n_att], words[n_att:limit], blueprint, config)
    return LayoutPlan(_place(tokens, squares), limit, len(words) - limit, scheme, tokens, squares)


# -- raw character flow --------------------------------------------------------


def raw_sc_plan(text, config, preserve_words=False):
    """Character-level layout: one equal cell per character, spaces included.

    With ``preserve_words`` a word that would straddle a row boundary moves
    to the next row and the separating space is dropped when the row is
    already full. Only whole words are drawn; words that do not fit in the
    remaining rows, or lie past cut_length, are counted as truncated.
    """
    words = text.split()
    scheme = "raw-linewrap" if preserve_words else "raw"
    cpr, rows, cell = config.chars_per_row, config.char_rows, config.char_cell
    if preserve_words:
        too_long = [w for w in words if len(w) > cpr]
        if too_long:
            raise WordTooLong(f"{too_long[0]!r} has {len(too_long[0])} characters; rows hold {cpr}")
    x0 = config.margin_px + (config.usable_px - cpr * cell) // 2
    y0 = config.margin_px + (config.usable_px - rows * cell) // 2

    commands, placed = [], []
    row = col = 0
    for i, word in enumerate(words[: config.cut_length]):
        pending = []
        r, c = row, col
        if i > 0:
            if not preserve_words and c == cpr:
                r, c = r + 1, 0
            if c < cpr:
                pending.append((" ", r, c))
                c += 1
        if preserve_words and c + len(word) > cpr:
            r, c = r + 1, 0
        for ch in word:
            if c == cpr:
                r, c = r + 1, 0
            pending.append((ch, r, c))
            c += 1
        if r >= rows:
            break
        commands.extend(DrawCommand(ch, x0 + cc * cell, y0 + rr * cell, cell) for ch, rr, cc in pending)
        placed.append(word)
        row, col = r, c
    return LayoutPlan(tuple(commands), len(placed), len(words) - len(placed), scheme, tuple(placed))


# -- profile fusion -------------------------------------------------------------


def compose_profile_plan(words, profile_tokens, mode, config, *, blueprint=None):
    """Fuse profile tokens with text.

    uniform: profile tokens take the first grid cells at normal size.
    attended: profile tokens fill the attention anchors; text uses flow cells.
    """
    words, profile_tokens = list(words), [t for t in profile_tokens if t]
    if mode == "uniform":
        capacity = config.grid_n**2
        n_prof = min(len(profile_tokens), capacity)
        limit = min(len(words), config.cut_length, capacity - n_prof)
        tokens = tuple(profile_tokens[:n_prof] + words[:limit])
        n = config.grid_n
        squares = tuple(_grid_square(config, i // n, i % n) for i in range(len(tokens)))
        return LayoutPlan(_place(tokens, squares), limit, len(words) - limit, "sew-profile", tokens, squares, n_prof)
    if mode == "attended":
        if blueprint is None:
            blueprint = attention_blueprint(config.grid_n, config.attn_count, config.attn_scale)
        if blueprint.n != config.grid_n:
            raise ConfigError(f"blueprint is {blueprint.n}x{blueprint.n} but grid_n={config.grid_n}")
        n_anchor = blueprint.count(1)
        if len(profile_tokens) > n_anchor:
            raise ConfigError(f"{len(profile_tokens)} profile tokens but only {n_anchor} attention anchors")
        limit = min(len(words), config.cut_length, blueprint.count(0))
        tokens, squares = _blueprint_layout(profile_tokens, words[:limit], blueprint, config)
        return LayoutPlan(
            _place(tokens, squares), limit, len(words) - limit, "sew-attn-profile", tokens, squares, len(profile_tokens)
        )
    raise ConfigError(f"profile mode must be one of {PROFILE_MODES}, got {mode!r}")


def plan_scheme(scheme, words, config, *, profile_tokens=(), blueprint=None):
    """Dispatch a token list to the layout for ``scheme``."""
    words = list(words)
    if scheme in ("raw", "raw-linewrap"):
        return raw_sc_plan(" ".join(words), config, preserve_words=scheme == "raw-linewrap")
    if scheme == "sew":
        return sew_grid_plan(words, config)
    if scheme == "sew-attn":
        if blueprint is None:
            blueprint = attention_blueprint(config.grid_n, config.attn_count, config.attn_scale)
        return sew_attention_plan(words, blueprint, config)
    if scheme == "sew-profile":
        return compose_profile_plan(words, profile_tokens, "uniform", config)
    if scheme == "sew-attn-profile":
        return compose_profile_plan(words, profile_tokens, "attended", config, blueprint=blueprint)
    raise ConfigError(f"unknown scheme {scheme!r}")


def read_back(plan):
    """Recover the token sequence a plan draws, from its commands alone.

    Grid plans are read square by square; raw plans are read row by row,
    treating a row break as a word boundary only when words are kept whole.
    """
    if plan.regions:
        out = []
        for square in plan.regions:
            chars = [cmd.character for cmd in plan.commands if square.contains_cell(cmd.x, cmd.y, cmd.cell_px)]
            out.append("".join(chars))
        return out
    rows = {}
    for cmd in plan.commands:
        rows.setdefault(cmd.y, []).append(cmd.character)
    joiner = " " if plan.scheme == "raw-linewrap" else ""
    return joiner.join("".join(chars) for _, chars in sorted(rows.items())).split()
