"""Squared-word glyph rendering of English text for image classifiers."""

__version__ = "0.1.0"

from .corpus import (
    ColumnMap,
    CorpusSample,
    CorpusStats,
    load_corpus,
    split_train_test,
    tokenize,
    truncation_report,
    word_count_stats,
)
from .dataset import DatasetManifest, batch_render, config_fingerprint
from .evalkit import LinearModel, downsample, evaluate, train_linear
from .glyphfont import BASE_RESOLUTION, GlyphBitmap, glyph_bitmap, rasterize_scaled
from .layout import (
    SCHEMES,
    BlueprintGrid,
    DrawCommand,
    LayoutPlan,
    RenderConfig,
    SquareRegion,
    attention_blueprint,
    compose_profile_plan,
    default_config,
    plan_scheme,
    raw_sc_plan,
    sew_attention_plan,
    sew_grid_plan,
    word_square_plan,
)
from .profile import ProfileRecord, encode_profile
from .render import ImageBuffer, encode_pgm, encode_png, render
