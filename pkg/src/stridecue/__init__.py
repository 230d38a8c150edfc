"""Colored-noise gait cues: generation, spectral checks, retiming and a walking companion."""
from .analysis import SeriesStats, Spectrum, dfa_alpha, periodogram, psd_slope, summary_stats
from .companion import CompanionConfig, CompanionState, Mode, Pose, UserKinematics, spawn, update
from .exceptions import (
    AnalysisError,
    CalibrationError,
    DataError,
    DomainError,
    GenerationError,
    ParameterError,
    StrideCueError,
    UndefinedSpectrumError,
)
from .noise import (
    CalibrationTrial,
    NoiseKind,
    NoiseParams,
    StrideSeries,
    box_muller_pair,
    calibrate,
    generate,
    generate_iso,
    generate_pink,
    generate_white,
)
from .perf import MetricsRecord, MetricsSink, aggregate, time_block
from .retime import AnimationClock, BaselineCycle, PlaybackSchedule, build_schedule, schedule_total
from .sync_sim import FollowerModel, simulate_follow

__version__ = "0.1.0"
