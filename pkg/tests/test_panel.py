"""Panel construction, derived columns, and stratification."""

import numpy as np
import pytest

from growthvol.panel import (
    REGIONS,
    CountryMeta,
    GrowthPanel,
    PanelObservation,
    build_growth_panel,
    compute_growth_rates,
    compute_sizes,
    development_split,
    stratify,
)


def make_obs(rows):
    return [PanelObservation(c, y, v) for c, y, v in rows]


def test_sizes_are_demeaned_logs():
    e = float(np.e)
    panel = build_growth_panel(make_obs([
        ("A", 2000, e), ("B", 2000, e), ("C", 2000, e ** 4),
    ]))
    np.testing.assert_allclose(sorted(panel.size), [-1.0, -1.0, 2.0], atol=1e-12)


def test_compute_sizes_examples():
    e = float(np.e)
    two = compute_sizes(make_obs([("A", 2000, e**2), ("B", 2000, e**4)]))
    assert two[("A", 2000)] == pytest.approx(-1.0)
    assert two[("B", 2000)] == pytest.approx(1.0)
    single = compute_sizes(make_obs([("A", 2000, 123.0)]))
    assert single[("A", 2000)] == pytest.approx(0.0)
    three = compute_sizes(make_obs([("A", 2000, e), ("B", 2000, e), ("C", 2000, e**4)]))
    assert [three[k] for k in sorted(three)] == pytest.approx([-1.0, -1.0, 2.0])


def test_compute_sizes_scope():
    e = float(np.e)
    obs = make_obs([("A", 2000, e**2), ("B", 2000, e**4)])
    sizes = compute_sizes(obs, scope=["B"])  # mean over B only = 4
    assert sizes[("A", 2000)] == pytest.approx(-2.0)
    assert sizes[("B", 2000)] == pytest.approx(0.0)
    with pytest.raises(ValueError, match="2000"):
        compute_sizes(obs, scope=["Z"])


def test_compute_growth_rates_records():
    records = compute_growth_rates(make_obs([
        ("A", 1900, 100.0), ("A", 1902, 110.0),  # gap: no growth emitted
        ("B", 1900, 100.0), ("B", 1901, 100.0 * np.e),
    ]))
    assert [(g.country_id, g.year) for g in records] == [("B", 1901)]
    assert records[0].growth_rate == pytest.approx(1.0)


def test_growth_is_log_difference():
    panel = build_growth_panel(make_obs([
        ("A", 2000, 100.0), ("A", 2001, 110.0), ("B", 2000, 50.0), ("B", 2001, 45.0),
    ]))
    by_key = {(c, y): g for c, y, g in zip(panel.country, panel.year, panel.growth)}
    assert np.isnan(by_key[("A", 2000)])
    assert by_key[("A", 2001)] == pytest.approx(np.log(1.1))
    assert by_key[("B", 2001)] == pytest.approx(np.log(0.9))


def test_growth_missing_after_gap():
    panel = build_growth_panel(make_obs([
        ("A", 1950, 10.0), ("A", 1951, 11.0), ("A", 1953, 12.0),
    ]))
    by_year = dict(zip(panel.year, panel.growth))
    assert np.isnan(by_year[1950])
    assert by_year[1951] == pytest.approx(np.log(1.1))
    assert np.isnan(by_year[1953])  # 1952 missing: no one-year ratio exists


def test_sizes_invariant_to_common_rescaling():
    rows = [("A", 2000, 100.0), ("A", 2001, 105.0), ("B", 2000, 55.0), ("B", 2001, 60.0)]
    base = build_growth_panel(make_obs(rows))
    scaled = build_growth_panel(make_obs([(c, y, 3.7 * v) for c, y, v in rows]))
    np.testing.assert_allclose(scaled.size, base.size, atol=1e-12)
    np.testing.assert_allclose(
        scaled.growth[~np.isnan(scaled.growth)],
        base.growth[~np.isnan(base.growth)],
        atol=1e-12,
    )


def test_single_year_rescaling_moves_growth_not_size():
    rows = [("A", 2000, 100.0), ("A", 2001, 105.0), ("B", 2000, 55.0), ("B", 2001, 60.0)]
    base = build_growth_panel(make_obs(rows))
    bumped = build_growth_panel(make_obs(
        [(c, y, (2.0 if y == 2001 else 1.0) * v) for c, y, v in rows]
    ))
    np.testing.assert_allclose(bumped.size, base.size, atol=1e-12)
    mask = bumped.year == 2001
    np.testing.assert_allclose(
        bumped.growth[mask], base.growth[mask] + np.log(2.0), atol=1e-12
    )


def test_duplicate_observation_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        build_growth_panel(make_obs([("A", 2000, 1.0), ("A", 2000, 2.0)]))


def test_nonpositive_level_rejected():
    with pytest.raises(ValueError, match="positive"):
        build_growth_panel(make_obs([("A", 2000, -1.0)]))
    with pytest.raises(ValueError, match="positive"):
        build_growth_panel(make_obs([("A", 2000, 0.0)]))


def test_ar1_pairs():
    panel = build_growth_panel(make_obs([
        ("A", 2000, 100.0), ("A", 2001, 110.0), ("A", 2002, 121.0),
        ("B", 2000, 50.0), ("B", 2001, 55.0),  # only one growth year: no pair
    ]))
    r_t, r_lag, s_lag, country, year = panel.ar1_pairs()
    assert list(country) == ["A"]
    assert list(year) == [2002]
    assert r_t[0] == pytest.approx(np.log(1.1))
    assert r_lag[0] == pytest.approx(np.log(1.1))
    # s_lag is A's size in 2001
    idx = (panel.country == "A") & (panel.year == 2001)
    assert s_lag[0] == panel.size[idx][0]


def test_pairs_do_not_cross_gaps():
    panel = build_growth_panel(make_obs([
        ("A", 2000, 1.0), ("A", 2001, 1.1), ("A", 2003, 1.2), ("A", 2004, 1.3),
    ]))
    r_t = panel.ar1_pairs()[0]
    assert r_t.size == 0  # growth exists in 2001 and 2004, never adjacent


def balanced_panel(n_countries=4, years=range(1990, 2000)):
    rng = np.random.default_rng(7)
    rows = []
    for i in range(n_countries):
        level = 100.0 * (i + 1)
        for y in years:
            level *= float(np.exp(rng.normal(0.02, 0.05)))
            rows.append((f"C{i}", y, level))
    meta = {
        "C0": CountryMeta("C0", region=REGIONS[0], balanced_member=True),
        "C1": CountryMeta("C1", region=REGIONS[0], balanced_member=False),
        "C2": CountryMeta("C2", region=REGIONS[3], balanced_member=True),
        "C3": CountryMeta("C3", region=REGIONS[3], balanced_member=True),
    }
    return build_growth_panel(make_obs(rows), meta=meta)


def test_stratify_by_region():
    panel = balanced_panel()
    sub = stratify(panel, region=REGIONS[3])
    assert sub.countries == ["C2", "C3"]
    # sizes keep their whole-panel meaning by default
    mask = np.isin(panel.country, ["C2", "C3"])
    np.testing.assert_array_equal(sub.size, panel.size[mask])


def test_stratify_unknown_region_rejected():
    with pytest.raises(ValueError, match="unknown region"):
        stratify(balanced_panel(), region="Atlantis")


def test_stratify_balanced_only():
    sub = stratify(balanced_panel(), balanced_only=True)
    assert sub.countries == ["C0", "C2", "C3"]


def test_stratify_year_range_keeps_boundary_growth():
    panel = balanced_panel()
    sub = stratify(panel, year_range=(1995, 1999))
    assert sub.span == (1995, 1999)
    # growth into 1995 was computed from 1994 by the parent and is retained
    boundary = sub.growth[sub.year == 1995]
    parent = panel.growth[panel.year == 1995]
    np.testing.assert_array_equal(boundary, parent)
    assert not np.any(np.isnan(boundary))


def test_stratify_region_and_years_commute():
    panel = balanced_panel()
    one = stratify(stratify(panel, region=REGIONS[0]), year_range=(1993, 1997))
    two = stratify(stratify(panel, year_range=(1993, 1997)), region=REGIONS[0])
    assert one == two


def test_stratify_recompute_sizes():
    panel = balanced_panel()
    sub = stratify(panel, region=REGIONS[3], recompute_sizes=True)
    # per-year sizes sum to zero within the sub-panel
    for y in set(sub.year.tolist()):
        assert np.sum(sub.size[sub.year == y]) == pytest.approx(0.0, abs=1e-10)
    # growth is untouched by size recomputation
    mask = np.isin(panel.country, ["C2", "C3"])
    np.testing.assert_array_equal(sub.growth, panel.growth[mask])


def test_stratify_empty_selection_rejected():
    panel = balanced_panel()
    with pytest.raises(ValueError, match="no observations"):
        stratify(panel, year_range=(1800, 1801))
    with pytest.raises(ValueError, match="empty year range"):
        stratify(panel, year_range=(2000, 1990))


def test_development_split_partitions_countries():
    panel = balanced_panel()
    developed, developing = development_split(panel)
    assert developed | developing == set(panel.countries)
    assert not developed & developing
    sub = stratify(panel, development="developed")
    assert set(sub.countries) == developed
    override = stratify(panel, development="developing", developed_countries=["C3"])
    assert set(override.countries) == {"C0", "C1", "C2"}


def test_growth_arrays_align():
    panel = balanced_panel()
    country, year, growth, size = panel.growth_arrays()
    assert not np.any(np.isnan(growth))
    assert country.shape == year.shape == growth.shape == size.shape
    # first year of each country carries no growth rate
    assert growth.size == panel.growth.size - panel.n_countries


def test_growth_years_span():
    panel = balanced_panel()
    assert panel.growth_years() == (1991, 1999)
