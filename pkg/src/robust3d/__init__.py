"""robust3d: sensor-corruption synthesis and stratified AP evaluation for
3D person detection."""

__version__ = "0.1.0"

from .core import (
    ARRAY_DTYPE,
    Box3D,
    Calibration,
    CameraImage,
    CorruptionKind,
    CorruptionSpec,
    Detection,
    FrameSample,
    GroundTruth,
    Occlusion,
    Point3,
    PointCloud,
    SeedPolicy,
    Severity,
    derive_frame_seed,
    derive_stream_seed,
    make_rng,
    normalize_yaw,
    round_half_away,
    validate_frame,
)
from .lidar import (
    DEFAULT_LIDAR_PARAMS,
    LidarCorruptionParams,
    crosstalk,
    cutout,
    cutout_partition,
    density_decrease,
    fov_loss,
    lidar_gaussian,
)
from .camera import (
    DEFAULT_CAMERA_PARAMS,
    CameraCorruptionParams,
    camera_gaussian,
    fog,
    sunlight,
)
from .misalign import (
    DEFAULT_MISALIGN_PARAMS,
    MisalignParams,
    spatial_misalign,
    temporal_misalign_camera,
    temporal_misalign_lidar,
)
from .geometry import (
    ConvexPolygon2,
    bev_polygon,
    box_corners,
    iou_3d,
    iou_bev,
    points_in_box,
    points_in_box_mask,
    polygon_intersection,
)
from .evaluation import (
    DEFAULT_EVAL_CONFIG,
    APResult,
    EvalConfig,
    EvalReport,
    FrameMatch,
    PRCurve,
    ReportRow,
    StratumResult,
    average_precision,
    distance_bin,
    filter_ground_truth,
    match_detections,
    occlusion_bin,
    rows_from_results,
    stratify,
)
from .pipeline import corrupt_frame, corrupt_sequence
from .synth import (
    EXPERIMENT_DETECTOR_PARAMS,
    Occluder,
    PseudoDetectorParams,
    SceneParams,
    generate_dataset,
    generate_scene,
    generate_sequence,
    pseudo_detect,
    run_degradation_experiment,
)
