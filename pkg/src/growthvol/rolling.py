"""Sliding-window re-estimation of the scale relation across a century.

A window of length L starting at year t covers growth years t .. t+L-1; the
window's fit sees only those rows (growth into the first window year, which
the parent panel computed from t-1, is part of the window).  Windows whose
panels yield too few consecutive-year pairs are recorded as gaps rather than
silently skipped, so a series always has one entry per window position.

Each window's estimate is exactly ``fit_alad`` applied to the stratified
sub-panel with a seed derived from (series seed, window start); the driver
adds no estimation logic, and a window can be reproduced in isolation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from scipy.stats import norm

from growthvol.panel import GrowthPanel, stratify
from growthvol.scaling import ScalingFit, _seed_entropy, fit_alad


@dataclass
class RollingEntry:
    """One window position: its span, pair count, and fit (None for a gap)."""

    start_year: int
    end_year: int
    n_pairs: int
    fit: ScalingFit | None


@dataclass
class RollingSeries:
    window_length: int
    step: int
    entries: list[RollingEntry] = field(default_factory=list)

    def window_starts(self) -> list[int]:
        return [e.start_year for e in self.entries]


def roll(
    panel: GrowthPanel,
    window_length: int = 10,
    step: int = 1,
    *,
    min_pairs: int = 24,
    bootstrap: int = 200,
    seed=0,
    jobs: int = 1,
    tail_weights: tuple[float, float] = (1.0, 1.0),
) -> RollingSeries:
    """Estimate the ALAD model on every window of growth years.

    Parameters
    ----------
    panel : GrowthPanel
    window_length, step : int
        Window size in growth years and the distance between window starts.
    min_pairs : int
        Windows with fewer consecutive-year pairs become recorded gaps
        (default 24: eight observations per estimated parameter).
    bootstrap, tail_weights :
        Passed through to ``fit_alad``.
    seed : int or sequence of ints
        Window w uses the derived seed (seed, w), so any window can be
        recomputed independently of the others.
    jobs : int
        Concurrent window fits; results are ordered by window start
        regardless of scheduling.
    """
    if window_length < 2:
        raise ValueError(f"window_length must be at least 2, got {window_length}")
    if step < 1:
        raise ValueError(f"step must be positive, got {step}")
    first, last = panel.growth_years()
    n_years = last - first + 1
    if window_length > n_years:
        raise ValueError(
            f"window of {window_length} years exceeds the panel's "
            f"{n_years} growth years ({first}..{last})"
        )
    starts = list(range(first, last - window_length + 2, step))
    entropy = _seed_entropy(seed)

    def fit_window(start: int) -> RollingEntry:
        end = start + window_length - 1
        sub = stratify(panel, year_range=(start, end))
        n_pairs = int(sub.ar1_pairs()[0].size)
        if n_pairs < min_pairs:
            return RollingEntry(start, end, n_pairs, None)
        fit = fit_alad(
            sub, bootstrap=bootstrap, seed=entropy + [start],
            tail_weights=tail_weights,
        )
        return RollingEntry(start, end, n_pairs, fit)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(fit_window, starts))
    else:
        entries = [fit_window(s) for s in starts]
    return RollingSeries(window_length=window_length, step=step, entries=entries)


def significance_segments(
    series: RollingSeries, level: float = 0.05
) -> list[tuple[int, int, bool]]:
    """Maximal runs of windows sharing beta's significance status.

    Returns (first window's start year, last window's end year, significant)
    per run — the plot data behind regime shading.  Windows without a
    usable fit (gaps, or fits without standard errors) break runs and
    belong to none.
    """
    if not series.entries:
        raise ValueError("empty rolling series")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    critical = float(norm.ppf(1.0 - level / 2.0))

    def status(entry: RollingEntry):
        if entry.fit is None or entry.fit.se_beta is None:
            return None
        if entry.fit.se_beta == 0.0:
            return True
        return bool(abs(entry.fit.beta) / entry.fit.se_beta > critical)

    segments = []
    run_start = None
    run_end = None
    run_status = None
    for entry in series.entries:
        s = status(entry)
        if s is None or s != run_status or run_start is None:
            if run_start is not None and run_status is not None:
                segments.append((run_start, run_end, run_status))
            run_start, run_end, run_status = entry.start_year, entry.end_year, s
            if s is None:
                run_start = None
                run_status = None
        else:
            run_end = entry.end_year
    if run_start is not None and run_status is not None:
        segments.append((run_start, run_end, run_status))
    return segments


def rolling_csv(series: RollingSeries) -> str:
    """One row per window: both span labels, estimates, errors, and flags.

    Gap windows keep their identifying columns and pair count; estimate
    fields are left empty.
    """
    lines = ["window_start,window_end,beta,se_beta,phi1,se_phi1,alpha,n,significant"]

    def fmt(value):
        return "" if value is None else format(value, ".17g")

    for e in series.entries:
        if e.fit is None:
            lines.append(f"{e.start_year},{e.end_year},,,,,,{e.n_pairs},")
        else:
            f = e.fit
            significant = "" if f.significant_5pct is None else str(f.significant_5pct).lower()
            lines.append(
                f"{e.start_year},{e.end_year},{fmt(f.beta)},{fmt(f.se_beta)},"
                f"{fmt(f.phi1)},{fmt(f.se_phi1)},{fmt(f.gamma_or_alpha)},"
                f"{f.n_obs},{significant}"
            )
    return "\n".join(lines) + "\n"
