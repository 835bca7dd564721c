"""Complexity scoring for multi-object tracking sequences.

Three sub-scores capture what makes a sequence hard to track: how occluded
the objects are (OCOM), how erratically they move (MCOM), and how easily
they are confused visually (VCOM).  A weighted mean fuses them into a single
MOTCOM value, and the ranking helpers measure how well any such metric
orders sequences against observed tracker performance.
"""

from .combine import MeanKind, MotcomScore, Weights, combine
from .embed import (
    BlurSpec,
    EmbeddingBackend,
    FeatureVector,
    blur_except_box,
    blur_image,
    embed_object,
    onnx_backend,
    test_backend,
)
from .errors import (
    BackendError,
    MissingFrameError,
    MotcomError,
    ParseError,
    ValidationError,
)
from .ingest import (
    ObjectState,
    SeqInfo,
    SequenceGT,
    TargetFilter,
    frame_image_path,
    load_sequence,
    parse_gt_file,
    parse_seqinfo,
    write_gt_file,
)
from .motion import (
    DEFAULT_ALPHA_SET,
    MotionConfig,
    MotionReport,
    compute_mcom,
    displacement,
    log_sigmoid_weight,
    predict_position,
    prediction_error,
    transformed_size,
)
from .occlusion import (
    OcclusionMode,
    OcclusionReport,
    compute_ocom,
    intersection_over_area,
    occlusion_level,
)
from .ranking import (
    RankComparison,
    ScoredSequences,
    compare_rankings,
    footrule_distance,
    footrule_max,
    load_tracker_scores,
    normalized_fd,
    rank,
    spearman_rho,
)
from .report import (
    RunConfig,
    SequenceReport,
    cmd_compute,
    cmd_plot,
    cmd_rank,
    compute_sequence_report,
    discover_sequences,
)
from .visual import (
    DEFAULT_RATIO_SET,
    EmbeddingCache,
    VisualConfig,
    VisualReport,
    compute_vcom,
    fdr_for_target,
    radius,
)

__version__ = "0.1.0"
