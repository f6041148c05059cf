"""Country-year growth panels.

A panel holds GDP per capita levels for a set of countries over a span of
years, together with two derived columns:

* growth rate: r(i, t) = ln gdppc(i, t) - ln gdppc(i, t-1), defined only
  when the country has an observation in the immediately preceding year
  (gaps in a series produce missing growth rates, never multi-year ratios);
* size: s(i, t) = ln gdppc(i, t) minus the cross-sectional mean of
  ln gdppc(., t) over the countries observed in year t, so that size
  measures relative position and is invariant to common growth of all
  countries.

Panels can be stratified by region, by development status (above or below
the median of country mean log GDP per capita), to the balanced subset, or
to a year range.  Stratification keeps derived columns from the parent by
default: a sub-panel's growth rates and sizes still refer to the full panel
that produced them, which is what rolling-window estimation needs.  Sizes
can optionally be recomputed relative to the sub-panel's own cross sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

REGIONS = (
    "EuropeNorthAmerica",
    "EastEuropeCentralAsia",
    "EastSouthAsiaPacific",
    "LatinAmericaCaribbean",
    "SubSaharanAfrica",
    "MiddleEastNorthAfrica",
)


@dataclass(frozen=True)
class PanelObservation:
    """One raw data point: a country's GDP per capita level in one year."""

    country_id: str
    year: int
    gdppc: float


@dataclass(frozen=True)
class GrowthObservation:
    """One derived data point: a growth rate with the size it is paired to."""

    country_id: str
    year: int
    growth_rate: float
    size: float


@dataclass(frozen=True)
class CountryMeta:
    country_id: str
    name: str = ""
    region: str | None = None
    balanced_member: bool = False


@dataclass
class GrowthPanel:
    """Level observations plus derived growth and size columns.

    Rows are sorted by (country_id, year).  ``growth`` is NaN in a country's
    first observed year and after any gap.  ``size`` is defined for every
    row.  ``meta`` carries one entry per country.
    """

    country: np.ndarray
    year: np.ndarray
    gdppc: np.ndarray
    size: np.ndarray
    growth: np.ndarray
    meta: dict[str, CountryMeta] = field(default_factory=dict)

    @property
    def span(self) -> tuple[int, int]:
        return int(self.year.min()), int(self.year.max())

    @property
    def countries(self) -> list[str]:
        return sorted(set(self.country.tolist()))

    @property
    def n_countries(self) -> int:
        return len(set(self.country.tolist()))

    def __eq__(self, other):
        if not isinstance(other, GrowthPanel):
            return NotImplemented
        return (
            np.array_equal(self.country, other.country)
            and np.array_equal(self.year, other.year)
            and np.array_equal(self.gdppc, other.gdppc)
            and np.array_equal(self.size, other.size)
            and np.array_equal(self.growth, other.growth, equal_nan=True)
            and self.meta == other.meta
        )

    def growth_arrays(self):
        """(country, year, growth, size) over rows where growth is defined."""
        mask = ~np.isnan(self.growth)
        return (
            self.country[mask],
            self.year[mask],
            self.growth[mask],
            self.size[mask],
        )

    def growth_observations(self) -> list[GrowthObservation]:
        country, year, growth, size = self.growth_arrays()
        return [
            GrowthObservation(str(c), int(t), float(r), float(s))
            for c, t, r, s in zip(country, year, growth, size)
        ]

    def growth_years(self) -> tuple[int, int]:
        """(first, last) year in which any growth rate is defined."""
        years = self.year[~np.isnan(self.growth)]
        if years.size == 0:
            raise ValueError("panel has no growth observations")
        return int(years.min()), int(years.max())

    def ar1_pairs(self):
        """Consecutive growth pairs for autoregression.

        Returns (r_t, r_lag, s_lag, country, year) over all (i, t) where
        both r(i, t) and r(i, t-1) exist; s_lag is the size s(i, t-1) and
        year is t.
        """
        has_growth = ~np.isnan(self.growth)
        same_country = self.country[1:] == self.country[:-1]
        consecutive = self.year[1:] == self.year[:-1] + 1
        pair = same_country & consecutive & has_growth[1:] & has_growth[:-1]
        idx = np.flatnonzero(pair) + 1
        return (
            self.growth[idx],
            self.growth[idx - 1],
            self.size[idx - 1],
            self.country[idx],
            self.year[idx],
        )


def _demean_by_year(year: np.ndarray, log_gdppc: np.ndarray) -> np.ndarray:
    """Subtract each year's cross-sectional mean of log GDP per capita."""
    unique_years, inverse = np.unique(year, return_inverse=True)
    sums = np.bincount(inverse, weights=log_gdppc)
    counts = np.bincount(inverse)
    return log_gdppc - sums[inverse] / counts[inverse]


def compute_sizes(observations, scope=None) -> dict:
    """Size of every observation: log level demeaned within its year.

    Parameters
    ----------
    observations : iterable of PanelObservation
    scope : iterable of country ids, optional
        Countries whose observations define each year's cross-sectional
        mean.  Default: every country present.  Sizes are still returned
        for all observations; only the mean is restricted, which is how a
        sub-panel keeps sizes measured against a wider reference.

    Returns
    -------
    dict mapping (country_id, year) -> size
    """
    obs = list(observations)
    if not obs:
        raise ValueError("no observations")
    in_scope = (lambda c: True) if scope is None else frozenset(scope).__contains__
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for o in obs:
        if in_scope(o.country_id):
            sums[o.year] = sums.get(o.year, 0.0) + float(np.log(o.gdppc))
            counts[o.year] = counts.get(o.year, 0) + 1
    sizes = {}
    for o in obs:
        if o.year not in counts:
            raise ValueError(
                f"no in-scope countries observed in year {o.year}; "
                "cannot demean that cross-section"
            )
        mean = sums[o.year] / counts[o.year]
        sizes[(o.country_id, o.year)] = float(np.log(o.gdppc)) - mean
    return sizes


def compute_growth_rates(observations, scope=None) -> list[GrowthObservation]:
    """One-year log differences paired with sizes.

    A growth observation exists only where the same country is observed in
    the immediately preceding year; gaps never produce multi-year ratios.
    """
    obs = sorted(observations, key=lambda o: (o.country_id, o.year))
    for o in obs:
        if not np.isfinite(o.gdppc) or o.gdppc <= 0.0:
            raise ValueError(
                f"gdppc must be positive and finite: {o.country_id} {o.year} has {o.gdppc!r}"
            )
    sizes = compute_sizes(obs, scope=scope)
    out = []
    for prev, cur in zip(obs, obs[1:]):
        if prev.country_id == cur.country_id and cur.year == prev.year + 1:
            rate = float(np.log(cur.gdppc) - np.log(prev.gdppc))
            out.append(
                GrowthObservation(cur.country_id, cur.year, rate,
                                  sizes[(cur.country_id, cur.year)])
            )
    return out


def build_growth_panel(
    observations,
    meta: dict[str, CountryMeta] | None = None,
) -> GrowthPanel:
    """Assemble a panel from raw level observations.

    Parameters
    ----------
    observations : iterable of PanelObservation
        Levels must be positive; (country, year) must be unique.
    meta : dict, optional
        Per-country metadata; countries without an entry get a default one.

    Returns
    -------
    GrowthPanel with growth rates over consecutive years and sizes demeaned
    within each year's observed cross section.
    """
    obs = sorted(observations, key=lambda o: (o.country_id, o.year))
    if not obs:
        raise ValueError("no observations")
    for o in obs:
        if not np.isfinite(o.gdppc) or o.gdppc <= 0.0:
            raise ValueError(
                f"gdppc must be positive and finite: {o.country_id} {o.year} has {o.gdppc!r}"
            )
    for prev, cur in zip(obs, obs[1:]):
        if prev.country_id == cur.country_id and prev.year == cur.year:
            raise ValueError(f"duplicate observation for {cur.country_id} in {cur.year}")

    country = np.array([o.country_id for o in obs])
    year = np.array([o.year for o in obs], dtype=int)
    gdppc = np.array([o.gdppc for o in obs], dtype=float)
    log_gdppc = np.log(gdppc)
    size = _demean_by_year(year, log_gdppc)

    growth = np.full(len(obs), np.nan)
    consecutive = (country[1:] == country[:-1]) & (year[1:] == year[:-1] + 1)
    idx = np.flatnonzero(consecutive) + 1
    growth[idx] = log_gdppc[idx] - log_gdppc[idx - 1]

    full_meta = {c: CountryMeta(country_id=c) for c in set(country.tolist())}
    if meta:
        for key, value in meta.items():
            if key in full_meta:
                full_meta[key] = value
    return GrowthPanel(country=country, year=year, gdppc=gdppc, size=size,
                       growth=growth, meta=full_meta)


def development_split(panel: GrowthPanel) -> tuple[frozenset, frozenset]:
    """(developed, developing) country sets by median mean log GDP per capita.

    Countries at or above the median of per-country mean log levels are
    "developed"; the rest "developing".
    """
    means = {}
    log_gdppc = np.log(panel.gdppc)
    for c in panel.countries:
        means[c] = float(np.mean(log_gdppc[panel.country == c]))
    cutoff = float(np.median(list(means.values())))
    developed = frozenset(c for c, v in means.items() if v >= cutoff)
    developing = frozenset(c for c, v in means.items() if v < cutoff)
    return developed, developing


def stratify(
    panel: GrowthPanel,
    *,
    region: str | None = None,
    development: str | None = None,
    balanced_only: bool = False,
    year_range: tuple[int, int] | None = None,
    recompute_sizes: bool = False,
    developed_countries=None,
) -> GrowthPanel:
    """Restrict a panel to a stratum.

    Parameters
    ----------
    region : str, optional
        Keep countries whose metadata region matches (see REGIONS).
    development : {"developed", "developing"}, optional
        Keep the upper or lower half of countries by mean log GDP per
        capita (median split), or by membership in ``developed_countries``
        when that override is given.
    balanced_only : bool
        Keep only countries flagged as balanced-panel members.
    year_range : (int, int), optional
        Keep rows with year in the closed range.  Growth rates computed by
        the parent panel are retained, so the first kept year keeps the
        growth rate into it; row filtering never recomputes growth.
    recompute_sizes : bool
        Re-demean sizes within the restricted panel's own year cross
        sections.  Default False: sizes keep their parent-panel meaning.
    developed_countries : iterable of str, optional
        Explicit override for the developed set used by ``development``.

    Region and year-range filters are row selections, so they commute with
    each other.  The development median split depends on the rows it sees,
    so its order relative to other filters matters; apply it last or pass
    ``developed_countries`` for full control.
    """
    keep = np.ones(panel.country.shape, dtype=bool)
    if region is not None:
        if region not in REGIONS:
            raise ValueError(f"unknown region {region!r}; expected one of {REGIONS}")
        members = {c for c, m in panel.meta.items() if m.region == region}
        keep &= np.isin(panel.country, sorted(members))
    if balanced_only:
        members = {c for c, m in panel.meta.items() if m.balanced_member}
        keep &= np.isin(panel.country, sorted(members))
    if development is not None:
        if development not in ("developed", "developing"):
            raise ValueError(
                f"development must be 'developed' or 'developing', got {development!r}"
            )
        if developed_countries is not None:
            developed = frozenset(developed_countries)
            developing = frozenset(panel.countries) - developed
        else:
            developed, developing = development_split(panel)
        chosen = developed if development == "developed" else developing
        keep &= np.isin(panel.country, sorted(chosen))
    if year_range is not None:
        first, last = year_range
        if first > last:
            raise ValueError(f"empty year range {year_range!r}")
        keep &= (panel.year >= first) & (panel.year <= last)

    if not np.any(keep):
        raise ValueError("stratification selects no observations")

    country = panel.country[keep]
    year = panel.year[keep]
    gdppc = panel.gdppc[keep]
    growth = panel.growth[keep]
    if recompute_sizes:
        size = _demean_by_year(year, np.log(gdppc))
    else:
        size = panel.size[keep]
    meta = {c: panel.meta[c] for c in set(country.tolist())}
    return GrowthPanel(country=country, year=year, gdppc=gdppc, size=size,
                       growth=growth, meta=meta)
