"""Morlet wavelet coherence with AR(1) Monte Carlo significance."""

__version__ = "0.1.0"

from .coherence import (  # noqa: E402
    CoherenceField,
    CrossMatrix,
    SmoothingParams,
    lead_time,
    phase_difference,
    smooth,
    wct,
    xwt,
)
from .cwt import (  # noqa: E402
    CwtMatrix,
    MorletParams,
    ScaleGrid,
    coi,
    cwt,
    default_grid,
    energy,
    morlet_freq,
    morlet_time,
    reconstruct,
)
from .errors import ConfigError, InputError, WavecohError  # noqa: E402
from .series import (  # noqa: E402
    RawSeries,
    TimeSeries,
    align_weekly,
    load_csv,
    log_returns,
    normalized_log_price,
    standardize,
)
from .significance import (  # noqa: E402
    Ar1Params,
    SignificanceField,
    fit_ar1,
    mc_significance,
    significance_contours,
    simulate_ar1,
)
