"""Random-dot anaglyph stereoacuity toolkit.

Generates red/cyan random-dot stimuli with pixel-quantized binocular
disparity for arbitrary displays and viewing distances, measures stereo
thresholds with an adaptive staircase, verifies rendered stimuli with an
image-domain disparity decoder, and analyzes measurement datasets with
ordinal agreement statistics.
"""

from .errors import (
    DatasetError,
    DegenerateMarginals,
    InvalidGeometry,
    InvalidProfile,
    LowConfidence,
    NoEffectivePairs,
    NoFigure,
    NotIntegerMultiple,
    ProtocolViolation,
    SessionFinished,
    StereoacuityError,
    StimulusTooLarge,
    UnmappableValue,
)
from .geometry import (
    DISPLAY_PRESETS,
    DisparityLevel,
    DisplayProfile,
    HdMeasurement,
    LevelTable,
    ViewingGeometry,
    build_level_table,
    disparity_arcsec,
    distance_scale_k,
    dot_size_px,
    hd_arcsec,
    hd_protocol,
    pixel_pitch,
    shift_for_arcsec,
    stimulus_size_px,
)
from .ol import OL, OutsideLimits, is_ol
from .renderer import (
    AnaglyphImage,
    Eye,
    FigureMask,
    Orientation,
    StereogramSpec,
    channel,
    gapped_disk_mask,
    ground_truth_mask,
    render,
)
from .decoder import (
    DisparityMap,
    OrientationDetection,
    detect_orientation,
    dominant_figure_shift,
    estimate_disparity,
    infer_figure,
)
from .staircase import (
    DeterministicObserver,
    PsychometricObserver,
    SessionRecord,
    StaircaseSession,
    TrialRecord,
    new_session,
    replay_outcome,
    simulate,
    step,
)
from .stats import (
    AnalysisReport,
    KappaResult,
    MeasurementRecord,
    Test,
    WilcoxonResult,
    analyze,
    confusion_counts,
    landis_koch,
    median_iqr,
    recode_far,
    recode_near,
    weighted_kappa,
    wilcoxon,
)

__version__ = "0.1.0"
