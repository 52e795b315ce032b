"""Offline VoIP QoS analysis toolkit.

Decodes RTP, RTCP-XR, and SIP traffic from packet captures, computes
per-call quality metrics (jitter, moving deviation, bandwidth, loss,
round-trip time, R-Factor, signalling delays), and statistically
characterizes jitter and RTT with extreme-value models selected by the
Schwarz criterion.
"""

__version__ = "0.1.0"

from . import errors, ingest, metrics, stats
from .errors import (
    BadK,
    BadMagic,
    BadRecord,
    BadSpec,
    BadVersion,
    DegenerateData,
    DomainError,
    EmptyData,
    LengthMismatch,
    MissingHeader,
    NotConverged,
    NotSip,
    TooFewPackets,
    TooFewPoints,
    TooShort,
    Truncated,
    VoipQosError,
    ZeroVariance,
)
from .metrics import (
    DEFAULT_OVERHEAD_BYTES,
    LossSummary,
    MetricSeries,
    SipDelays,
    bandwidth_series,
    jitter_series,
    loss_summary,
    moving_std,
    r_factor,
    rtt_series,
    sip_delays,
    unroll,
    xr_metric_series,
)
from .stats import (
    BivariateHist,
    BoxplotStats,
    EmpiricalCdf,
    PcaResult,
    bivariate_hist,
    boxplot_stats,
    empirical_cdf,
    pca,
)
from .evt import (
    CandidateFamily,
    FamilyFit,
    FitRegime,
    GevFit,
    GevParams,
    TailClass,
    TailKind,
    classify,
    default_candidates,
    fit_gev_mle,
    gev_cdf,
    gev_logpdf,
    gev_loglik,
    gev_pdf,
    gev_quantile,
    gev_sample,
    ks_distance,
    select_model,
)

__all__ = [
    "__version__",
    "errors",
    "ingest",
    "metrics",
    "stats",
    "VoipQosError",
    "BadK",
    "BadMagic",
    "BadRecord",
    "BadSpec",
    "BadVersion",
    "DegenerateData",
    "DomainError",
    "EmptyData",
    "LengthMismatch",
    "MissingHeader",
    "NotConverged",
    "NotSip",
    "TooFewPackets",
    "TooFewPoints",
    "TooShort",
    "Truncated",
    "ZeroVariance",
    "CandidateFamily",
    "FamilyFit",
    "FitRegime",
    "GevFit",
    "GevParams",
    "TailClass",
    "TailKind",
    "classify",
    "default_candidates",
    "fit_gev_mle",
    "gev_cdf",
    "gev_logpdf",
    "gev_loglik",
    "gev_pdf",
    "gev_quantile",
    "gev_sample",
    "ks_distance",
    "select_model",
    "DEFAULT_OVERHEAD_BYTES",
    "LossSummary",
    "MetricSeries",
    "SipDelays",
    "bandwidth_series",
    "jitter_series",
    "loss_summary",
    "moving_std",
    "r_factor",
    "rtt_series",
    "sip_delays",
    "unroll",
    "xr_metric_series",
    "BivariateHist",
    "BoxplotStats",
    "EmpiricalCdf",
    "PcaResult",
    "bivariate_hist",
    "boxplot_stats",
    "empirical_cdf",
    "pca",
]
