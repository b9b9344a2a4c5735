"""View-mode decision pipeline for multi-viewer 360-degree video.

Pipeline stages: label ingestion -> per-frame convergence scoring ->
per-second stabilization into a binary schedule -> per-viewer mode
state machine -> trace-driven strategy evaluation.
"""

from .cvvp import (FrameCvvp, ImportanceParams, frame_cvvp,
                   importance_for_viewer, overall_importance,
                   video_cvvp_series)
from .decision import (DecisionConfig, EventKind, SessionTrace, ViewerEvent,
                       ViewerSessionState, ViewMode, mode_from_cvvp,
                       run_session, step)
from .geometry import (CubemapFaces, EquirectFrame, ViewingDirection,
                       direction_to_unit_vector, equirect_to_cubemap,
                       extract_viewport, great_circle_distance,
                       unit_vector_to_direction)
from .simulate import (EvaluationConfig, EvaluationReport, StrategyConfig,
                       StrategyKind, VideoInputs, cvvp_error, evaluate,
                       inference_accuracy, simulate_strategy)
from .stabilize import (ModeSchedule, NormalizedSeries, SecondSeries,
                        StabilizeParams, candidate_count, normalize,
                        per_second_average, stabilize_bruteforce,
                        stabilize_dp, stabilize_video)
from .traces import (CvvpPredictionFile, LabelTraceSet, TraceFormatError,
                     Trajectory, load_labels, load_predictions,
                     load_schedule, load_trajectory, save_labels,
                     save_predictions, save_schedule, save_trajectory)

__version__ = "0.1.0"
