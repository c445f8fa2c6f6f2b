"""Cyclostationary spectral correlation analysis of speech."""

__version__ = "0.1.0"

from ._accel import backend_name
from .dsp import (
    AnalysisConfig,
    AudioSignal,
    dft,
    frame_signal,
    idft,
    load_wav,
    trim_silence,
    window_coefficients,
    write_wav,
)
from .features import FeatureMatrix, extract_features, read_feature_file, write_feature_file
from .metrics import ScoreSet, compute_eer, compute_min_dcf
from .scd import (
    ScdMap,
    TemporalScdMap,
    cyclic_autocorrelation,
    marginal_profiles,
    scd_a,
    scd_all,
    scd_b,
    scd_direct_oracle,
    scd_map,
    spectral_correlation_frame,
)
from .synthgen import TestSignalSpec, gen_test_signal, gen_white_noise
from .vocoders import resynthesize_utterance, scd_difference_map

__all__ = [
    "AnalysisConfig",
    "AudioSignal",
    "FeatureMatrix",
    "ScdMap",
    "ScoreSet",
    "TemporalScdMap",
    "TestSignalSpec",
    "backend_name",
    "compute_eer",
    "compute_min_dcf",
    "cyclic_autocorrelation",
    "dft",
    "extract_features",
    "frame_signal",
    "gen_test_signal",
    "gen_white_noise",
    "idft",
    "load_wav",
    "marginal_profiles",
    "read_feature_file",
    "resynthesize_utterance",
    "scd_a",
    "scd_all",
    "scd_b",
    "scd_difference_map",
    "scd_direct_oracle",
    "scd_map",
    "spectral_correlation_frame",
    "trim_silence",
    "window_coefficients",
    "write_feature_file",
    "write_wav",
]
