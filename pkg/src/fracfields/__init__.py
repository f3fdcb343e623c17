"""Time-changed Poisson random fields: special functions, samplers, closed forms and Monte Carlo checks."""

from .specfun import (GammaPoleError, NonConvergenceError, SeriesControl, SeriesDivergenceError,
                      SeriesError, SeriesResult, WrightParams, generalized_wright, mittag_leffler, wright)
from .samplers import (BivariatePairSpec, TimeChangeSpec, make_rng, sample_composition,
                       sample_inverse_stable, sample_stable)
from .fields import FieldModel, Rectangle, double_fractional_pmf, prf_pmf, stable_inverse_pmf, tc_prf_pmf
from .levy import LevyProcessSpec
from .verify import ComparisonReport, MCConfig, run_campaign

__version__ = "0.1.0"

__all__ = [
    "GammaPoleError", "NonConvergenceError", "SeriesControl", "SeriesDivergenceError", "SeriesError",
    "SeriesResult", "WrightParams", "generalized_wright", "mittag_leffler", "wright",
    "BivariatePairSpec", "TimeChangeSpec", "make_rng", "sample_composition", "sample_inverse_stable",
    "sample_stable", "FieldModel", "Rectangle", "double_fractional_pmf", "prf_pmf", "stable_inverse_pmf",
    "tc_prf_pmf", "LevyProcessSpec", "ComparisonReport", "MCConfig", "run_campaign",
]
