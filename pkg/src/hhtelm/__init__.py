"""Slow-wave EEG trial classification.

Empirical-mode-decomposition features plus deep extreme learning machines
whose autoencoder layers are solved by swappable kernels (SVD pseudoinverse,
Hessenberg factorization, LU), evaluated with stratified cross-validation.
"""

from . import errors
from .dataio import (
    CLASS_NAMES,
    FilterSpec,
    SynthConfig,
    TrialRecord,
    TrialSet,
    load_features_csv,
    load_report,
    load_trials_csv,
    lowpass_filter,
    save_features_csv,
    save_report,
    save_trials_csv,
    segment_phases,
    synth_scp,
)
from .elm import (
    AutoencoderLayer,
    DeepElmModel,
    ElmLayer,
    TrainConfig,
    deep_elm_predict,
    deep_elm_train,
    elm_ae_train,
    elm_train,
    load_model,
    one_hot,
    save_model,
)
from .evaluation import (
    ContingencyTable,
    CvReport,
    MetricsReport,
    balance_train_set,
    contingency,
    cross_validate,
    metrics,
    stratified_kfold,
)
from .hht import (
    AnalyticSeries,
    EmdConfig,
    FeatureConfig,
    FeatureVector,
    ImfSet,
    Signal,
    analytic_series,
    analytic_signal,
    emd,
    feature_layout,
    find_extrema,
    instantaneous_frequency,
    spline_envelope,
    stat_features,
    trial_feature_vector,
)
from .solvers import (
    HessenbergFactorization,
    SolverKind,
    hessenberg_reduce,
    lu_factor_solve,
    random_orthogonal,
    solve_output_weights,
    svd_pseudoinverse,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticSeries",
    "AutoencoderLayer",
    "CLASS_NAMES",
    "ContingencyTable",
    "CvReport",
    "DeepElmModel",
    "ElmLayer",
    "EmdConfig",
    "FeatureConfig",
    "FeatureVector",
    "FilterSpec",
    "HessenbergFactorization",
    "ImfSet",
    "MetricsReport",
    "Signal",
    "SolverKind",
    "SynthConfig",
    "TrainConfig",
    "TrialRecord",
    "TrialSet",
    "analytic_series",
    "analytic_signal",
    "balance_train_set",
    "contingency",
    "cross_validate",
    "deep_elm_predict",
    "deep_elm_train",
    "elm_ae_train",
    "elm_train",
    "emd",
    "errors",
    "feature_layout",
    "find_extrema",
    "hessenberg_reduce",
    "instantaneous_frequency",
    "load_features_csv",
    "load_model",
    "load_report",
    "load_trials_csv",
    "lowpass_filter",
    "lu_factor_solve",
    "metrics",
    "one_hot",
    "random_orthogonal",
    "save_features_csv",
    "save_model",
    "save_report",
    "save_trials_csv",
    "segment_phases",
    "solve_output_weights",
    "spline_envelope",
    "stat_features",
    "stratified_kfold",
    "svd_pseudoinverse",
    "synth_scp",
    "trial_feature_vector",
]
