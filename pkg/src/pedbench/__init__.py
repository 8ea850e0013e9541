"""Pedestrian-detection evaluation toolkit.

Extended miss-rate evaluation (MR over the classic and the extended FPPI
range), greedy matching with ignore regions, oracle error decomposition,
annotation sanitization (pruning, detector-guided alignment, diffing) and
a journaled review service for human annotation work.
"""

__version__ = "0.1.0"

from .geometry import (BBox, HeadFeetLine, DEFAULT_ASPECT_RATIO, iou,
                       line_to_bbox, bbox_to_line, normalize_aspect,
                       occlusion_fraction, overlap_over_detection)
from .dataio import (Annotation, Dataset, Detection, Keyframe, SceneParams,
                     SyntheticScene, generate_synthetic_scene,
                     interpolate_keyframes, read_annotations, read_detections,
                     write_annotations, write_detections)
from .evaluation import (Curve, CurvePoint, EvalSummary, FrameMatch, SubsetSpec,
                         apply_subset, compute_curve, evaluate, fppi_at_recall,
                         log_average_miss_rate, match_frame, match_dataset,
                         median_tp_iou, mr_vs_iou_sweep)
from .analysis import (FPClass, OracleReport, PatchMeasures, blur_score,
                       classify_false_positives, contrast_score, delta_mr,
                       export_correlates, oracle_evaluate)
from .sanitize import (AlignConfig, DiffReport, ReviewItem, align,
                       consolidate_flags, diff, prune)
from .errors import EvalError, ParseError, PedbenchError

__all__ = [
    "__version__",
    "BBox", "HeadFeetLine", "DEFAULT_ASPECT_RATIO", "iou", "line_to_bbox",
    "bbox_to_line", "normalize_aspect", "occlusion_fraction",
    "overlap_over_detection",
    "Annotation", "Dataset", "Detection", "Keyframe", "SceneParams",
    "SyntheticScene", "generate_synthetic_scene", "interpolate_keyframes",
    "read_annotations", "read_detections", "write_annotations",
    "write_detections",
    "Curve", "CurvePoint", "EvalSummary", "FrameMatch", "SubsetSpec",
    "apply_subset", "compute_curve", "evaluate", "fppi_at_recall",
    "log_average_miss_rate", "match_frame", "match_dataset", "median_tp_iou",
    "mr_vs_iou_sweep",
    "FPClass", "OracleReport", "PatchMeasures", "blur_score",
    "classify_false_positives", "contrast_score", "delta_mr",
    "export_correlates", "oracle_evaluate",
    "AlignConfig", "DiffReport", "ReviewItem", "align", "consolidate_flags",
    "diff", "prune",
    "EvalError", "ParseError", "PedbenchError",
]
