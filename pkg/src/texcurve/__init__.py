"""texcurve: dataset curation and pairwise evaluation for 3D texturing.

The package covers the full loop around a texture-generation pipeline:
scoring rendered objects by color entropy and texture complexity
(:mod:`.quality_metrics`), filtering a corpus down to its richest
subset (:mod:`.dataset_curation`), planning deterministic render jobs
(:mod:`.render_plan`), judging competing methods pairwise with a
vision-language model, a mock, or people (:mod:`.pairwise_eval`), and
turning the comparison records into shuffle-averaged Elo ratings
(:mod:`.elo_engine`).
"""

from .elo_engine import EloConfig, RatingTable, pair_expected_score, run_single_pass, run_tournament
from .errors import TexcurveError
from .image_core import (
    ChannelHistogram,
    GradientField,
    GrayImage,
    RgbaImage,
    decode_image,
    load_image,
)
from .quality_metrics import (
    DEFAULT_COLOR_WEIGHT,
    QualityScore,
    channel_entropy,
    color_entropy,
    score_image,
    texture_complexity,
    total_score,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelHistogram",
    "DEFAULT_COLOR_WEIGHT",
    "EloConfig",
    "GradientField",
    "GrayImage",
    "QualityScore",
    "RatingTable",
    "RgbaImage",
    "TexcurveError",
    "channel_entropy",
    "color_entropy",
    "decode_image",
    "load_image",
    "pair_expected_score",
    "run_single_pass",
    "run_tournament",
    "score_image",
    "texture_complexity",
    "total_score",
    "__version__",
]
