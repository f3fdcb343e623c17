"""Monte Carlo estimators, comparators and the reproducible check campaign.

Samples for a check are produced in fixed blocks of ``BLOCK`` draws; block
``b`` of check ``i`` uses the generator keyed by mix_seed(seed, i, b).
Chunks are contiguous runs of blocks and only decide what runs in
parallel, so a report never depends on the chunk count or thread timing.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .samplers import make_rng, mix_seed

BLOCK = 8192
KS_C_1PCT = 1.628


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 100_000
    seed: int = 0
    n_chunks: int = 1
    tolerance_sigmas: float = 4.0
    workers: int | None = None

    def __post_init__(self):
        if self.n_samples < 1 or self.n_chunks < 1 or not self.tolerance_sigmas > 0:
            raise ValueError("MCConfig needs n_samples >= 1, n_chunks >= 1, tolerance_sigmas > 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class ComparisonReport:
    name: str
    analytic: float
    empirical: float
    std_error: float
    statistic: float
    threshold: float
    passed: bool
    seed: int
    n_samples: int

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def make_report(name, analytic, empirical, std_error, statistic, threshold, seed, n) -> ComparisonReport:
    passed = bool(abs(statistic) <= threshold)
    return ComparisonReport(name, float(analytic), float(empirical), float(std_error),
                            float(statistic), float(threshold), passed, int(seed), int(n))


# -- estimators --------------------------------------------------------------

def _nonempty(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    return x


def mean_and_se(values) -> tuple[float, float]:
    v = _nonempty(values)
    se = v.std(ddof=1) / math.sqrt(v.size) if v.size > 1 else 0.0
    return float(v.mean()), float(se)


def empirical_laplace(samples, eta: float) -> tuple[float, float]:
    """Mean of exp(-eta X) and its standard error."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    return mean_and_se(np.exp(-eta * _nonempty(samples)))


def empirical_pmf(samples, n_max: int) -> list[tuple[float, float]]:
    """Frequencies of 0..n_max with binomial standard errors.

    One extra entry at the end holds the mass above n_max.
    """
    x = _nonempty(samples)
    n = x.size
    counts = np.bincount(np.clip(x, 0, n_max + 1).astype(np.int64), minlength=n_max + 2)
    p = counts / n
    return [(float(q), float(math.sqrt(q * (1 - q) / n))) for q in p]


def variance_and_se(samples) -> tuple[float, float]:
    x = _nonempty(samples)
    d2 = (x - x.mean()) ** 2
    return float(x.var(ddof=1)), float(d2.std(ddof=1) / math.sqrt(x.size))


def covariance_and_se(x, y) -> tuple[float, float]:
    x, y = _nonempty(x), _nonempty(y)
    p = (x - x.mean()) * (y - y.mean())
    n = x.size
    return float(p.sum() / (n - 1)), float(p.std(ddof=1) / math.sqrt(n))


def ks_two_sample(a, b) -> tuple[float, float]:
    """Two-sample KS distance and its asymptotic 1% critical value."""
    a, b = _nonempty(a), _nonempty(b)
    d = stats.ks_2samp(a, b).statistic
    m, n = a.size, b.size
    return float(d), KS_C_1PCT * math.sqrt((m + n) / (m * n))


def ks_one_sample(x, cdf: Callable) -> tuple[float, float]:
    """One-sample KS distance and its 1% critical value."""
    x = _nonempty(x)
    d = stats.kstest(x, cdf).statistic
    return float(d), float(stats.kstwo.ppf(0.99, x.size))


# -- block sampling -----------------------------------------------------------

def draw_blocks(sampler: Callable, n: int, seed: int, check_index: int, n_chunks: int = 1,
                workers: int | None = None):
    """Run sampler(rng, size) over fixed blocks and concatenate in block order.

    The sampler returns an array or a tuple of arrays with leading size axis.
    """
    n_blocks = -(-n // BLOCK)
    sizes = [min(BLOCK, n - b * BLOCK) for b in range(n_blocks)]

    def run_chunk(blocks):
        return [sampler(make_rng(mix_seed(seed, check_index, b)), sizes[b]) for b in blocks]

    bounds = np.linspace(0, n_blocks, min(n_chunks, n_blocks) + 1).astype(int)
    chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
    if len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers or min(len(chunks), 8)) as ex:
            parts = list(ex.map(run_chunk, chunks))
    else:
        parts = [run_chunk(c) for c in chunks]
    out = [blk for part in parts for blk in part]
    if isinstance(out[0], tuple):
        return tuple(np.concatenate([o[k] for o in out]) for k in range(len(out[0])))
    return np.concatenate(out)


# -- campaign -----------------------------------------------------------------

def run_campaign(manifest: Sequence[dict], cfg: MCConfig) -> list[ComparisonReport]:
    """Run each {name, check_type, params} descriptor; reports come back in manifest order."""
    from .checks import CHECKS

    reports = []
    for i, desc in enumerate(manifest):
        try:
            name, kind = desc["name"], desc["check_type"]
            params = dict(desc.get("params", {}))
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed check descriptor at index {i}: {desc!r}") from e
        if kind not in CHECKS:
            raise ValueError(f"unknown check_type {kind!r} in check {name!r}")
        reports.append(CHECKS[kind](name, params, cfg, i))
    return reports


def load_manifest(path) -> list[dict]:
    """Read a manifest; a bare 'default.json' that is not on disk means the bundled one."""
    import os
    from importlib import resources

    if not os.path.exists(path) and os.path.basename(str(path)) == str(path) == "default.json":
        text = resources.files("fracfields").joinpath("data", "default.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("checks", [])
    if not isinstance(data, list):
        raise ValueError("manifest must be a JSON list of checks")
    return data


def fmt17(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def reports_to_json(reports: Sequence[ComparisonReport]) -> str:
    rows = []
    for r in reports:
        d = r.as_dict()
        for k in ("analytic", "empirical", "std_error", "statistic", "threshold"):
            d[k] = _json_float(d[k])
        rows.append(d)
    return json.dumps(rows, indent=2) + "\n"


def _json_float(x: float):
    # 17 significant digits round-trip; non-finite values as strings
    if not math.isfinite(x):
        return str(x)
    return float(format(x, ".17g"))


REPORT_COLUMNS = ("name", "analytic", "empirical", "std_error", "statistic", "threshold", "pass")


def reports_to_csv(reports: Sequence[ComparisonReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow([r.name, fmt17(r.analytic), fmt17(r.empirical), fmt17(r.std_error),
                    fmt17(r.statistic), fmt17(r.threshold), fmt17(r.passed)])
    return buf.getvalue()
