"""Tsallis q-exponential fits of citation distributions and effective-temperature ranking."""

__version__ = "0.1.0"

from .config import FitConfig, load_config
from .errors import ConvergenceError, DomainError, HistogramFormatError, InsufficientDataError, QCiteError
from .fitter import FitResult, fit, linearize, model_eval, refit_T_fixed_q, select_q
from .histogram import CitationHistogram, SummaryStats, aggregate, fit_view, load_histogram, summarize
from .qmath import entropy_composition, q_exp, q_log, tsallis_entropy
from .ranking import RankingTable, quantity_vs_impact, rank_by_temperature
from .synth import SyntheticSpec, generate_deterministic, generate_sampled, sample_citation

__all__ = [
    "CitationHistogram",
    "ConvergenceError",
    "DomainError",
    "FitConfig",
    "FitResult",
    "HistogramFormatError",
    "InsufficientDataError",
    "QCiteError",
    "RankingTable",
    "SummaryStats",
    "SyntheticSpec",
    "aggregate",
    "entropy_composition",
    "fit",
    "fit_view",
    "generate_deterministic",
    "generate_sampled",
    "linearize",
    "load_config",
    "load_histogram",
    "model_eval",
    "q_exp",
    "q_log",
    "quantity_vs_impact",
    "rank_by_temperature",
    "refit_T_fixed_q",
    "sample_citation",
    "select_q",
    "summarize",
    "tsallis_entropy",
]
