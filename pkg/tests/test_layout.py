import string

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import FIG1_PROFILE, command_regions, ownership_violations
from sewglyph.errors import BlueprintFormatError, BlueprintOverflow, ConfigError, SquareTooSmall, WordTooLong
from sewglyph.layout import (
    SCHEMES,
    BlueprintGrid,
    DrawCommand,
    RenderConfig,
    SquareRegion,
    attention_blueprint,
    compose_profile_plan,
    default_config,
    plan_scheme,
    raw_sc_plan,
    read_back,
    sew_attention_plan,
    sew_grid_plan,
    word_square_plan,
)

words_st = st.text(alphabet=string.ascii_lowercase + string.digits, min_size=1, max_size=20)


def positions(cmds):
    return [(c.character, c.x, c.y, c.cell_px) for c in cmds]


# -- word squares -------------------------------------------------------------


def test_word_square_two_letters():
    cmds = word_square_plan("me", SquareRegion(0, 0, 60))
    assert positions(cmds) == [("m", 0, 0, 30), ("e", 30, 0, 30)]


def test_word_square_five_letters():
    cmds = word_square_plan("happy", SquareRegion(0, 0, 60))
    assert [(c.x, c.y) for c in cmds] == [(0, 0), (20, 0), (40, 0), (0, 20), (20, 20)]
    assert {c.cell_px for c in cmds} == {20}
    # brute-force containment: every pixel of every cell is inside the 60px square
    for c in cmds:
        for y in range(c.y, c.y + c.cell_px):
            for x in range(c.x, c.x + c.cell_px):
                assert 0 <= x < 60 and 0 <= y < 60


def test_word_square_single_letter_fills():
    assert positions(word_square_plan("i", SquareRegion(0, 0, 60))) == [("i", 0, 0, 60)]


def test_word_square_offset_and_perfect_square():
    cmds = word_square_plan("abcd", SquareRegion(10, 20, 40))
    assert positions(cmds) == [("a", 10, 20, 20), ("b", 30, 20, 20), ("c", 10, 40, 20), ("d", 30, 40, 20)]


def test_word_square_empty_and_too_small():
    assert word_square_plan("", SquareRegion(0, 0, 10)) == []
    with pytest.raises(SquareTooSmall):
        word_square_plan("abcde", SquareRegion(0, 0, 2))
    assert len(word_square_plan("abcd", SquareRegion(0, 0, 2))) == 4


@settings(max_examples=300)
@given(word=words_st, side=st.integers(8, 256))
def test_word_square_containment_property(word, side):
    square = SquareRegion(0, 0, side)
    cmds = word_square_plan(word, square)
    assert len(cmds) == len(word)
    assert ownership_violations(cmds, side, [square] * len(cmds)) == 0
    assert "".join(c.character for c in cmds) == word


# -- config ---------------------------------------------------------------------


def test_config_defaults_and_geometry():
    c = RenderConfig()
    assert (c.image_px, c.margin_px, c.grid_n, c.cut_length) == (224, 0, 6, 36)
    assert c.cell_side == 37  # floor(224 / 6)
    assert c.grid_origin == 1  # 224 - 6*37 = 2 spare pixels, split evenly
    c8 = RenderConfig(grid_n=8, margin_px=4)
    assert c8.cell_side == 27 and c8.grid_origin == 4 + (216 - 216) // 2


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(cut_length=0),
        dict(grid_n=0),
        dict(attn_scale=0),
        dict(attn_count=-1),
        dict(grid_n=4, attn_count=5, attn_scale=2),
        dict(image_px=10, grid_n=11),
        dict(image_px=100, margin_px=60),
        dict(grid_n=2.5),
        dict(grid_n=True),
    ],
)
def test_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        RenderConfig(**kwargs)


def test_default_config_per_scheme():
    assert default_config("sew").grid_n == 6
    att = default_config("sew-attn")
    assert (att.grid_n, att.attn_count, att.attn_scale, att.cut_length) == (8, 4, 2, 64)
    assert default_config("sew", grid_n=14, cut_length=196).cut_length == 196
    with pytest.raises(ConfigError):
        default_config("nope")


# -- SEW grid ---------------------------------------------------------------------


def test_sew_full_grid():
    words = [f"w{i}" for i in range(36)]
    plan = sew_grid_plan(words, RenderConfig(grid_n=6, cut_length=36))
    assert (plan.words_placed, plan.words_truncated) == (36, 0)
    assert len(plan.regions) == 36


def test_sew_truncates_after_cut_length():
    words = [f"w{i}" for i in range(40)]
    plan = sew_grid_plan(words, RenderConfig(grid_n=6, cut_length=36))
    assert (plan.words_placed, plan.words_truncated) == (36, 4)
    assert list(plan.tokens) == words[:36]


def test_sew_cut_length_below_capacity():
    plan = sew_grid_plan(["a"] * 20, RenderConfig(grid_n=6, cut_length=10))
    assert (plan.words_placed, plan.words_truncated) == (10, 10)


def test_sew_empty():
    plan = sew_grid_plan([], RenderConfig())
    assert plan.commands == () and plan.words_placed == plan.words_truncated == 0


def test_sew_row_major_cells():
    c = RenderConfig(grid_n=6)
    plan = sew_grid_plan(["a", "b", "c", "d", "e", "f", "g"], c)
    assert [(r.x, r.y) for r in plan.regions] == [(1 + 37 * i, 1) for i in range(6)] + [(1, 38)]


# -- blueprint ---------------------------------------------------------------------


def grid_counts(bp):
    flat = [v for row in bp.cells for v in row]
    return flat.count(1), flat.count(-1), flat.count(0)


def test_blueprint_paper_configuration():
    bp = attention_blueprint(8, 4, 2)
    assert grid_counts(bp) == (4, 12, 48)
    central = {(r, c) for r in range(2, 6) for c in range(2, 6)}
    nonzero = {(r, c) for r in range(8) for c in range(8) if bp.cells[r][c] != 0}
    assert nonzero == central
    assert [(r, c) for r, c, _ in bp.anchors()] == [(2, 2), (2, 4), (4, 2), (4, 4)]


def test_blueprint_no_attention():
    assert grid_counts(attention_blueprint(8, 0, 2)) == (0, 0, 64)


def test_blueprint_exact_fill():
    bp = attention_blueprint(4, 4, 2)
    assert grid_counts(bp) == (4, 12, 0)


def test_blueprint_overflow():
    with pytest.raises(BlueprintOverflow):
        attention_blueprint(4, 5, 2)
    with pytest.raises(BlueprintOverflow):
        attention_blueprint(5, 2, 3)


def test_blueprint_odd_centering_rounds_down():
    bp = attention_blueprint(7, 1, 2)
    assert bp.anchors() == [(2, 2, 2)]  # (7 - 2) // 2 = 2


def test_blueprint_partial_last_row_left_aligned():
    bp = attention_blueprint(8, 3, 2)
    assert [(r, c) for r, c, _ in bp.anchors()] == [(2, 2), (2, 4), (4, 2)]


def test_blueprint_text_roundtrip():
    bp = attention_blueprint(8, 4, 2)
    text = bp.to_text()
    assert text.splitlines()[0] == "8"
    assert text.splitlines()[3] == "0 0 1 -1 1 -1 0 0"
    assert BlueprintGrid.from_text(text) == bp


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2\n0 0\n",
        "2\n0 0\n0 2\n",
        "2\n0 -1\n0 0\n",
        "2\n1 -1\n0 0\n",
        "3\n1 -1 0\n-1 0 0\n0 0 0\n",
        "2\n0 x\n0 0\n",
    ],
)
def test_blueprint_rejects_malformed(text):
    with pytest.raises(BlueprintFormatError):
        BlueprintGrid.from_text(text)


@given(n=st.integers(1, 16), count=st.integers(0, 8), scale=st.integers(1, 4))
def test_blueprint_accounting_property(n, count, scale):
    try:
        bp = attention_blueprint(n, count, scale)
    except BlueprintOverflow:
        return
    ones, minus, zeros = grid_counts(bp)
    assert ones == count
    assert minus == count * (scale * scale - 1)
    assert zeros == n * n - count * scale * scale
    assert all(s == scale for _, _, s in bp.anchors())


# -- attention plans ---------------------------------------------------------------


CFG8 = RenderConfig(grid_n=8, cut_length=64, attn_count=4, attn_scale=2)


def test_attention_twenty_words():
    words = [f"w{i}" for i in range(1, 21)]
    plan = sew_attention_plan(words, attention_blueprint(8, 4, 2), CFG8)
    assert plan.words_placed == 20
    side = CFG8.cell_side
    by_token = dict(zip(plan.tokens, plan.regions))
    for i, (r, c) in enumerate([(2, 2), (2, 4), (4, 2), (4, 4)]):
        region = by_token[f"w{i + 1}"]
        assert (region.x, region.y, region.side) == (c * side, r * side, 2 * side)
    flow_cells = [(r, c) for r in range(8) for c in range(8) if not (2 <= r < 6 and 2 <= c < 6)][:16]
    for k, (r, c) in enumerate(flow_cells):
        region = by_token[f"w{k + 5}"]
        assert (region.x, region.y, region.side) == (c * side, r * side, side)


def test_attention_short_sentence():
    plan = sew_attention_plan(["a", "b", "c"], attention_blueprint(8, 4, 2), CFG8)
    assert plan.words_placed == 3 and plan.words_truncated == 0
    assert all(r.side == 2 * CFG8.cell_side for r in plan.regions)


def test_attention_capacity():
    plan = sew_attention_plan([f"w{i}" for i in range(64)], attention_blueprint(8, 4, 2), CFG8)
    assert (plan.words_placed, plan.words_truncated) == (52, 12)


def test_attention_respects_cut_length():
    cfg = CFG8.replace(cut_length=36)
    plan = sew_attention_plan([f"w{i}" for i in range(64)], attention_blueprint(8, 4, 2), cfg)
    assert (plan.words_placed, plan.words_truncated) == (36, 28)


def test_attention_blueprint_size_mismatch():
    with pytest.raises(ConfigError):
        sew_attention_plan(["a"], attention_blueprint(6, 1, 2), CFG8)


def test_attention_custom_blueprint_mixed_scales():
    bp = BlueprintGrid.from_text("4\n1 -1 -1 1\n-1 -1 -1 0\n-1 -1 -1 0\n0 0 0 0\n")
    cfg = RenderConfig(image_px=40, grid_n=4, cut_length=16)
    plan = sew_attention_plan(list("abcdefghij"), bp, cfg)
    assert [(t, r.side) for t, r in zip(plan.tokens, plan.regions)] == [
        ("a", 30), ("b", 10), ("c", 10), ("d", 10), ("e", 10), ("f", 10), ("g", 10), ("h", 10)
    ]
    assert plan.words_truncated == 2


@settings(max_examples=200)
@given(words=st.lists(words_st, max_size=80), n=st.integers(2, 10), count=st.integers(0, 6),
       scale=st.integers(1, 3), cut=st.integers(1, 120))
def test_attention_capacity_law(words, n, count, scale, cut):
    try:
        bp = attention_blueprint(n, count, scale)
    except BlueprintOverflow:
        return
    cfg = RenderConfig(image_px=320, grid_n=n, cut_length=cut)
    plan = sew_attention_plan(words, bp, cfg)
    assert plan.words_placed == min(len(words), cut, count + bp.count(0))
    assert plan.words_placed + plan.words_truncated == len(words)
    assert read_back(plan) == words[: plan.words_placed]
    assert ownership_violations(plan.commands, 320) == 0


@settings(max_examples=100)
@given(words=st.lists(words_st, max_size=60), n=st.integers(1, 10), cut=st.integers(1, 100))
def test_zero_attention_matches_plain_grid(words, n, cut):
    cfg = RenderConfig(grid_n=n, cut_length=cut)
    a = sew_attention_plan(words, attention_blueprint(n, 0, 2), cfg)
    b = sew_grid_plan(words, cfg)
    assert a.commands == b.commands
    assert (a.words_placed, a.words_truncated) == (b.words_placed, b.words_truncated)


# -- raw schemes ------------------------------------------------------------------


RAW3 = RenderConfig(image_px=30, chars_per_row=3, cut_length=100)


def chars_by_row(plan):
    rows = {}
    for c in plan.commands:
        rows.setdefault(c.y, []).append(c.character)
    return ["".join(v) for _, v in sorted(rows.items())]


def test_raw_wraps_mid_word():
    plan = raw_sc_plan("ab cd", RAW3, preserve_words=False)
    assert chars_by_row(plan) == ["ab ", "cd"]
    assert plan.words_placed == 2 and plan.scheme == "raw"


def test_raw_linewrap_same_when_word_fits():
    plan = raw_sc_plan("ab cd", RAW3, preserve_words=True)
    assert chars_by_row(plan) == ["ab ", "cd"]
    assert plan.scheme == "raw-linewrap"


def test_raw_linewrap_moves_straddling_word():
    assert chars_by_row(raw_sc_plan("a bcd", RAW3, preserve_words=True)) == ["a ", "bcd"]
    assert chars_by_row(raw_sc_plan("a bcd", RAW3, preserve_words=False)) == ["a b", "cd"]
    # a full row already separates the words, so no space is spent
    assert chars_by_row(raw_sc_plan("abc de", RAW3, preserve_words=True)) == ["abc", "de"]


def test_raw_word_too_long():
    with pytest.raises(WordTooLong):
        raw_sc_plan("abcd e", RAW3, preserve_words=True)
    assert raw_sc_plan("abcd e", RAW3, preserve_words=False).words_placed == 2


def test_raw_cell_geometry():
    plan = raw_sc_plan("ab", RAW3)
    assert positions(plan.commands) == [("a", 0, 0, 10), ("b", 10, 0, 10)]


def test_raw_truncates_whole_words_when_rows_run_out():
    cfg = RenderConfig(image_px=30, chars_per_row=3, cut_length=100)  # 3 rows of 3
    plan = raw_sc_plan("ab cd ef gh", cfg)
    # "ab cd ef" needs 8 cells; " gh" would need cells 9..11
    assert chars_by_row(plan) == ["ab ", "cd ", "ef"]
    assert (plan.words_placed, plan.words_truncated) == (3, 1)


def test_raw_respects_cut_length():
    plan = raw_sc_plan("a b c d", RAW3.replace(cut_length=2))
    assert (plan.words_placed, plan.words_truncated) == (2, 2)


@settings(max_examples=200)
@given(words=st.lists(words_st.filter(lambda w: len(w) <= 8), max_size=40), cpr=st.integers(8, 20),
       preserve=st.booleans())
def test_raw_properties(words, cpr, preserve):
    cfg = RenderConfig(image_px=160, chars_per_row=cpr, cut_length=1000)
    plan = raw_sc_plan(" ".join(words), cfg, preserve_words=preserve)
    assert plan.words_placed + plan.words_truncated == len(words)
    assert read_back(plan) == words[: plan.words_placed]
    assert ownership_violations(plan.commands, 160) == 0
    if not preserve:
        assert "".join(c.character for c in plan.commands) == " ".join(words[: plan.words_placed])


# -- profile fusion ------------------------------------------------------------------


def test_profile_uniform(fig1_words):
    cfg = RenderConfig(grid_n=6, cut_length=36)
    plan = compose_profile_plan(fig1_words, FIG1_PROFILE, "uniform", cfg)
    side = cfg.cell_side
    assert list(plan.tokens[:4]) == FIG1_PROFILE
    assert [(r.x, r.y) for r in plan.regions[:5]] == [(1 + side * c, 1) for c in range(5)]
    assert plan.tokens[4] == fig1_words[0]
    assert plan.profile_placed == 4
    assert plan.words_placed == 32 and plan.words_truncated == len(fig1_words) - 32


def test_profile_attended(fig1_words):
    cfg = RenderConfig(grid_n=8, cut_length=64, attn_count=4, attn_scale=2)
    plan = compose_profile_plan(fig1_words, FIG1_PROFILE, "attended", cfg)
    side = cfg.cell_side
    big = [(t, (r.x // side, r.y // side)) for t, r in zip(plan.tokens, plan.regions) if r.side == 2 * side]
    assert big == [("36", (2, 2)), ("IND", (4, 2)), ("m", (2, 4)), ("m", (4, 4))]
    small = [t for t, r in zip(plan.tokens, plan.regions) if r.side == side]
    assert small == fig1_words
    assert plan.words_placed == len(fig1_words)


def test_profile_empty_uniform_is_plain_sew(fig1_words):
    cfg = RenderConfig(grid_n=6)
    a = compose_profile_plan(fig1_words, [], "uniform", cfg)
    b = sew_grid_plan(fig1_words, cfg)
    assert a.commands == b.commands and a.words_placed == b.words_placed


def test_profile_attended_too_many_tokens():
    cfg = RenderConfig(grid_n=8, attn_count=2, attn_scale=2)
    with pytest.raises(ConfigError):
        compose_profile_plan(["a"], ["1", "2", "3"], "attended", cfg)


def test_profile_bad_mode():
    with pytest.raises(ConfigError):
        compose_profile_plan(["a"], [], "sideways", RenderConfig())


# -- all schemes ------------------------------------------------------------------


@pytest.mark.parametrize("scheme", SCHEMES)
def test_every_scheme_conserves_words_and_order(scheme, fig1_words):
    cfg = default_config(scheme)
    plan = plan_scheme(scheme, fig1_words, cfg, profile_tokens=FIG1_PROFILE)
    assert plan.scheme == scheme
    assert plan.words_placed + plan.words_truncated == len(fig1_words)
    text_tokens = read_back(plan)[plan.profile_placed:] if scheme == "sew-profile" else read_back(plan)
    if scheme == "sew-attn-profile":
        text_tokens = [t for t, r in zip(plan.tokens, plan.regions) if r.side == cfg.cell_side]
    assert text_tokens == fig1_words[: plan.words_placed]
    assert ownership_violations(plan.commands, cfg.image_px, command_regions(plan)) == 0
    assert all(r.inside_image(cfg.image_px) for r in plan.regions)


@settings(max_examples=100)
@given(words=st.lists(words_st, max_size=50), scheme=st.sampled_from(SCHEMES),
       margin=st.integers(0, 20), image_px=st.integers(120, 300))
def test_region_containment_all_schemes(words, scheme, margin, image_px):
    cfg = default_config(scheme, image_px=image_px, margin_px=margin, chars_per_row=24 if "raw" in scheme else None)
    assume(not ("linewrap" in scheme and any(len(w) > 24 for w in words)))
    plan = plan_scheme(scheme, words, cfg, profile_tokens=["36", "IND"])
    assert plan.words_placed + plan.words_truncated == len(words)
    assert all(r.inside_image(image_px) and r.x >= margin and r.y >= margin for r in plan.regions)
    assert ownership_violations(plan.commands, image_px, command_regions(plan)) == 0
