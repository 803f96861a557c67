"""tonelens: measure, model, and compare F0 trajectories of tonal speech.

The pipeline runs load -> resample -> gate -> track -> normalize per token,
aggregates fixed-length trajectories, fits a penalized-spline regression
with a categorical fixed effect, and correlates trajectory sets. Estimator
classes (ToneGam, PitchTracker, AmplitudeGate, TrajectoryNormalizer) expose
the algorithms with sklearn get_params/fit/transform conventions; the
functions underneath are importable directly.
"""

from .audio import PIPELINE_RATE, AudioClip, load_wav, resample, save_wav
from .errors import (
    AudioFormatError,
    EmptyAudioError,
    EmptyInputError,
    EmptyPairingError,
    FilenamePatternError,
    InsufficientDataError,
    ManifestError,
    ParameterError,
    SchemaError,
    SingularModelError,
    ToneLensError,
    TooShortError,
    UndefinedCorrelationError,
    UnsupportedCodecError,
    ZeroSuccessError,
)
from .gam import (
    Design,
    GamFit,
    GamSpec,
    TermTest,
    ToneGam,
    build_design,
    fit_gam,
    fit_penalized,
    select_lambda,
    term_significance,
)
from .gate import AmplitudeGate, GateConfig, amplitude_gate
from .metadata import TokenMeta, format_corpus_filename, parse_corpus_filename, scan_manifest
from .pipeline import AnalysisRun, AnalyzeConfig, analyze_token, run_analyze
from .pitch import PitchFrame, PitchTrack, PitchTracker, track_pitch
from .report import REFERENCE_BENCHMARKS, run_report
from .splines import bspline_basis, bspline_design, difference_penalty, make_knots
from .stats import CorrelationResult, pearson, trajectory_correlation
from .trajectory import (
    MeanTrajectory,
    NormalizedTrajectory,
    TrajectoryNormalizer,
    TrajectoryRecord,
    mean_trajectory,
    normalize_trajectory,
    read_trajectory_csv,
    trim_onset,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "PIPELINE_RATE",
    "load_wav",
    "save_wav",
    "resample",
    "TokenMeta",
    "scan_manifest",
    "parse_corpus_filename",
    "format_corpus_filename",
    "GateConfig",
    "amplitude_gate",
    "AmplitudeGate",
    "PitchFrame",
    "PitchTrack",
    "track_pitch",
    "PitchTracker",
    "NormalizedTrajectory",
    "MeanTrajectory",
    "TrajectoryRecord",
    "normalize_trajectory",
    "trim_onset",
    "mean_trajectory",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "TrajectoryNormalizer",
    "make_knots",
    "bspline_basis",
    "bspline_design",
    "difference_penalty",
    "GamSpec",
    "GamFit",
    "Design",
    "TermTest",
    "build_design",
    "fit_penalized",
    "select_lambda",
    "term_significance",
    "fit_gam",
    "ToneGam",
    "CorrelationResult",
    "pearson",
    "trajectory_correlation",
    "AnalyzeConfig",
    "AnalysisRun",
    "analyze_token",
    "run_analyze",
    "run_report",
    "REFERENCE_BENCHMARKS",
    "ToneLensError",
    "AudioFormatError",
    "UnsupportedCodecError",
    "EmptyAudioError",
    "TooShortError",
    "FilenamePatternError",
    "ManifestError",
    "ParameterError",
    "SingularModelError",
    "UndefinedCorrelationError",
    "InsufficientDataError",
    "EmptyPairingError",
    "EmptyInputError",
    "SchemaError",
    "ZeroSuccessError",
]
