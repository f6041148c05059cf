"""Volatility-size scaling: binned OLS and the heteroskedastic AR(1) fit.

Two estimators of the scale relation ln(sigma) ~ beta * s:

* binned_beta: sort growth observations by size into equal-occupancy bins,
  regress each bin's log standard deviation on its mean size by OLS.
  Transparent, but needs many observations and ignores the autoregressive
  structure of growth rates.

* fit_alad: asymmetric least absolute deviation estimation of

      r(i, t) = alpha + phi1 * r(i, t-1) + exp(beta * s(i, t-1)) * eps(i, t)

  by minimizing the Laplace-kernel negative log pseudo-likelihood

      sum over pairs of [ beta * s + |r - alpha - phi1 * r_lag| * exp(-beta * s) ]

  whose location part is a weighted median regression (so residuals have
  zero weighted median by construction) and whose linear term identifies
  beta through the scale Jacobian.  Optimization alternates an iteratively
  reweighted LAD step for (alpha, phi1) with a one-dimensional search on
  the smooth, convex beta profile, then polishes all three parameters with
  a simplex and finishes with an exact weighted-quantile step for alpha.
  Every accepted step must improve the objective, so the recorded trace is
  non-increasing by construction.

Standard errors: classical OLS errors for the binned method (t-test with
n_bins - 2 degrees of freedom); nonparametric bootstrap over whole countries
for ALAD (within-country serial dependence survives resampling), normal
approximation for the 5% flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.stats import t as student_t

from growthvol.panel import GrowthPanel

_BETA_BOUNDS = (-5.0, 5.0)


@dataclass(frozen=True)
class BinStat:
    """One size bin: its index, mean size, growth-rate dispersion, and count."""

    bin_index: int
    mean_size: float
    sigma: float
    count: int


@dataclass
class ScalingFit:
    """Estimated scale relation from either method.

    ``gamma_or_alpha`` is the binned regression's intercept gamma or the
    ALAD constant alpha.  ``phi1`` and its error are None for the binned
    method.  ``trace`` records the ALAD objective after each accepted
    optimization stage.
    """

    method: str
    beta: float
    gamma_or_alpha: float
    se_beta: float | None
    se_gamma_or_alpha: float | None
    n_obs: int
    significant_5pct: bool | None
    phi1: float | None = None
    se_phi1: float | None = None
    trace: list[float] = field(default_factory=list, repr=False)

    def to_json_dict(self, bins: list[BinStat] | None = None) -> dict:
        return {
            "method": self.method,
            "beta": self.beta,
            "se_beta": self.se_beta,
            "alpha_or_gamma": self.gamma_or_alpha,
            "phi1": self.phi1,
            "n": self.n_obs,
            "significant_5pct": self.significant_5pct,
            "bins": None if bins is None else [
                {"bin": b.bin_index, "mean_size": b.mean_size,
                 "sigma": b.sigma, "count": b.count}
                for b in bins
            ],
        }


def bin_stats_csv(bins: list[BinStat]) -> str:
    lines = ["bin,mean_size,sigma,count"]
    for b in bins:
        lines.append(f"{b.bin_index},{b.mean_size:.17g},{b.sigma:.17g},{b.count}")
    return "\n".join(lines) + "\n"


def binned_beta_xy(
    sizes, values, n_bins: int = 15, min_occupancy: int = 30
) -> tuple[ScalingFit, list[BinStat]]:
    """Binned OLS of log dispersion on mean size, for raw arrays.

    Observations are sorted by size and split into ``n_bins`` groups of as
    equal occupancy as possible; each group contributes (mean size, standard
    deviation of values); ln sigma is regressed on mean size by OLS with
    classical standard errors.
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if sizes.shape != values.shape or sizes.ndim != 1:
        raise ValueError("sizes and values must be one-dimensional and aligned")
    if n_bins < 3:
        raise ValueError(f"need at least 3 bins for a slope and its error, got {n_bins}")
    smallest = sizes.size // n_bins
    if smallest < min_occupancy:
        max_bins = sizes.size // min_occupancy
        raise ValueError(
            f"{sizes.size} observations cannot fill {n_bins} bins at minimum "
            f"occupancy {min_occupancy}; use at most {max_bins} bins"
        )
    order = np.argsort(sizes, kind="stable")
    bins = []
    for index, chunk in enumerate(np.array_split(order, n_bins)):
        sigma = float(np.std(values[chunk], ddof=1))
        if sigma <= 0.0:
            raise ValueError(f"bin {index} has zero dispersion; cannot take its log")
        bins.append(BinStat(bin_index=index, mean_size=float(np.mean(sizes[chunk])),
                            sigma=sigma, count=int(chunk.size)))

    x = np.array([b.mean_size for b in bins])
    y = np.log([b.sigma for b in bins])
    k = len(bins)
    x_centered = x - x.mean()
    sxx = float(np.sum(x_centered**2))
    if sxx <= 0.0:
        raise ValueError("all bins share one mean size; beta is unidentified")
    beta = float(np.sum(x_centered * y) / sxx)
    gamma = float(y.mean() - beta * x.mean())
    residuals = y - gamma - beta * x
    dof = k - 2
    s2 = float(np.sum(residuals**2) / dof)
    se_beta = float(np.sqrt(s2 / sxx))
    se_gamma = float(np.sqrt(s2 * (1.0 / k + x.mean() ** 2 / sxx)))
    if se_beta > 0.0:
        p_value = 2.0 * float(student_t.sf(abs(beta) / se_beta, dof))
    else:
        p_value = 0.0
    fit = ScalingFit(
        method="binned",
        beta=beta,
        gamma_or_alpha=gamma,
        se_beta=se_beta,
        se_gamma_or_alpha=se_gamma,
        n_obs=int(sizes.size),
        significant_5pct=bool(p_value < 0.05),
    )
    return fit, bins


def binned_beta(
    panel: GrowthPanel, n_bins: int = 15, min_occupancy: int = 30
) -> tuple[ScalingFit, list[BinStat]]:
    """Binned OLS on a panel's (size, growth rate) observations."""
    _, _, growth, size = panel.growth_arrays()
    return binned_beta_xy(size, growth, n_bins=n_bins, min_occupancy=min_occupancy)


def rescale_residuals(panel: GrowthPanel, beta: float, center: str = "year"):
    """Rescaled growth rates eps = (r - rbar) / exp(beta * s).

    ``center`` picks the central tendency rbar: "year" (cross-sectional
    mean of growth rates in the observation's year, removing common shocks)
    or "country" (the country's own mean growth).
    """
    if not np.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    country, year, growth, size = panel.growth_arrays()
    if center == "year":
        _, inverse = np.unique(year, return_inverse=True)
        sums = np.bincount(inverse, weights=growth)
        counts = np.bincount(inverse)
        rbar = sums[inverse] / counts[inverse]
    elif center == "country":
        _, inverse = np.unique(country, return_inverse=True)
        sums = np.bincount(inverse, weights=growth)
        counts = np.bincount(inverse)
        rbar = sums[inverse] / counts[inverse]
    else:
        raise ValueError(f"center must be 'year' or 'country', got {center!r}")
    return (growth - rbar) / np.exp(beta * size)


def _rho(residuals, tail_weights):
    """Piecewise-linear loss: left/right tail weights times |residual|."""
    w_left, w_right = tail_weights
    return np.where(residuals >= 0.0, w_right, w_left) * np.abs(residuals)


def alad_objective(panel: GrowthPanel, alpha, phi1, beta,
                   tail_weights=(1.0, 1.0)) -> float:
    """The ALAD loss at given parameters, for diagnostics and tests."""
    r_t, r_lag, s_lag, _, _ = panel.ar1_pairs()
    residuals = r_t - alpha - phi1 * r_lag
    return float(np.sum(beta * s_lag + _rho(residuals, tail_weights) * np.exp(-beta * s_lag)))


def _weighted_quantile(values, weights, fraction):
    """Smallest value v with (weight below or at v) >= fraction of total."""
    order = np.argsort(values, kind="stable")
    cumulative = np.cumsum(weights[order])
    target = fraction * cumulative[-1]
    index = int(np.searchsorted(cumulative, target, side="left"))
    return float(values[order][min(index, values.size - 1)])


def _irls_location(y, x, weights, tail_weights, start, iterations=60, tol=1e-12):
    """(intercept, slope) minimizing sum of weights * rho(y - a - b x).

    Iteratively reweighted least squares with the standard absolute-value
    majorization; the caller re-checks the true objective, so occasional
    non-monotone steps from the epsilon guard are harmless.
    """
    a, b = start
    w_left, w_right = tail_weights
    floor = 1e-10 * (np.std(y) + 1e-12)
    for _ in range(iterations):
        e = y - a - b * x
        u = weights * np.where(e >= 0.0, w_right, w_left) / np.maximum(np.abs(e), floor)
        sw = u.sum()
        swx = float(u @ x)
        swxx = float(u @ (x * x))
        swy = float(u @ y)
        swxy = float(u @ (x * y))
        det = sw * swxx - swx * swx
        if not np.isfinite(det) or det <= 1e-14 * max(sw * swxx, 1e-300):
            break  # lag regressor is (nearly) constant; keep current point
        a_new = (swxx * swy - swx * swxy) / det
        b_new = (sw * swxy - swx * swy) / det
        shift = max(abs(a_new - a), abs(b_new - b))
        a, b = a_new, b_new
        if shift < tol:
            break
    return a, b


def fit_alad(
    panel: GrowthPanel,
    *,
    bootstrap: int = 200,
    seed=0,
    tol: float = 1e-8,
    max_alternations: int = 200,
    tail_weights: tuple[float, float] = (1.0, 1.0),
    polish: bool = True,
) -> ScalingFit:
    """Fit the heteroskedastic AR(1) by asymmetric least absolute deviation.

    Parameters
    ----------
    panel : GrowthPanel
        Pairs (r_t, r_{t-1}, s_{t-1}) come from consecutive years only.
    bootstrap : int
        Country-level bootstrap replicates for standard errors; 0 disables
        them (point estimates only, significance then unknown).
    seed : int or sequence of ints
        Root of the deterministic per-replicate RNG streams.
    tol : float
        Relative objective-improvement threshold ending the alternation.
    max_alternations : int
        Upper bound on coordinate alternations.
    tail_weights : (float, float)
        Loss weights for negative/positive residuals.  (1, 1) is the
        symmetric least-absolute-deviation kernel; unequal weights fit an
        asymmetric kernel (residual quantile other than the median).
    polish : bool
        Run the final simplex refinement (kept on except in tight loops).

    Returns
    -------
    ScalingFit with method "alad"; ``trace`` holds the accepted objective
    values, non-increasing by construction.
    """
    r_t, r_lag, s_lag, country, year = panel.ar1_pairs()
    n = r_t.size
    if n < 6:
        raise ValueError(f"need at least 6 consecutive-year pairs, got {n}")
    if float(np.std(s_lag)) < 1e-12:
        raise ValueError("all sizes are equal; beta is unidentified")
    estimate = _fit_alad_arrays(
        r_t, r_lag, s_lag, tol=tol, max_alternations=max_alternations,
        tail_weights=tail_weights, polish=polish,
    )
    alpha, phi1, beta, trace = estimate

    se_alpha = se_phi1 = se_beta = None
    significant = None
    if bootstrap > 0:
        draws = _bootstrap_alad(
            r_t, r_lag, s_lag, country, year, bootstrap, seed,
            tail_weights=tail_weights,
        )
        if draws is not None:
            spread = np.std(draws, axis=0, ddof=1)
            se_alpha, se_phi1, se_beta = (float(v) for v in spread)
            significant = bool(abs(beta) / se_beta > 1.959963984540054) if se_beta > 0 else True

    return ScalingFit(
        method="alad",
        beta=float(beta),
        gamma_or_alpha=float(alpha),
        se_beta=se_beta,
        se_gamma_or_alpha=se_alpha,
        n_obs=int(n),
        significant_5pct=significant,
        phi1=float(phi1),
        se_phi1=se_phi1,
        trace=trace,
    )


def _fit_alad_arrays(r_t, r_lag, s_lag, *, tol, max_alternations, tail_weights,
                     polish, start=None):
    """Core ALAD optimizer on raw arrays; returns (alpha, phi1, beta, trace)."""
    w_left, w_right = tail_weights
    if w_left <= 0.0 or w_right <= 0.0:
        raise ValueError(f"tail weights must be positive, got {tail_weights!r}")
    below_fraction = w_right / (w_left + w_right)

    def objective(alpha, phi1, beta):
        scale_inv = np.exp(-beta * s_lag)
        residuals = r_t - alpha - phi1 * r_lag
        return float(np.sum(beta * s_lag + _rho(residuals, tail_weights) * scale_inv))

    if start is None:
        alpha, phi1 = _irls_location(
            r_t, r_lag, np.ones_like(r_t), tail_weights, (float(np.median(r_t)), 0.0)
        )
        beta = 0.0
    else:
        alpha, phi1, beta = start
    best = objective(alpha, phi1, beta)
    trace = [best]

    for _ in range(max_alternations):
        previous = best
        weights = np.exp(-beta * s_lag)
        a_new, p_new = _irls_location(r_t, r_lag, weights, tail_weights, (alpha, phi1))
        candidate = objective(a_new, p_new, beta)
        if candidate < best:
            alpha, phi1, best = a_new, p_new, candidate

        residual_loss = _rho(r_t - alpha - phi1 * r_lag, tail_weights)

        def beta_profile(b):
            return float(np.sum(b * s_lag + residual_loss * np.exp(-b * s_lag)))

        result = minimize_scalar(beta_profile, bounds=_BETA_BOUNDS, method="bounded",
                                 options={"xatol": 1e-10})
        candidate = objective(alpha, phi1, float(result.x))
        if candidate < best:
            beta, best = float(result.x), candidate

        trace.append(best)
        if previous - best < tol * (1.0 + abs(best)):
            break

    if polish:
        simplex = minimize(
            lambda v: objective(*v), np.array([alpha, phi1, beta]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000, "maxfev": 4000},
        )
        candidate = float(simplex.fun)
        if candidate < best:
            alpha, phi1, beta = (float(v) for v in simplex.x)
            best = candidate
            trace.append(best)

    # Exact location step: the weighted quantile minimizes the loss in alpha
    # outright, guaranteeing first-order optimality of the median fit.
    alpha_exact = _weighted_quantile(
        r_t - phi1 * r_lag, np.exp(-beta * s_lag), below_fraction
    )
    candidate = objective(alpha_exact, phi1, beta)
    if candidate <= best:
        alpha, best = alpha_exact, candidate
        trace.append(best)

    return float(alpha), float(phi1), float(beta), trace


def _seed_entropy(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        return [int(seed)]
    return [int(s) for s in seed]


def _demean_within_years(values, years):
    """Subtract each year's mean; the size normalization of a pseudo-panel."""
    _, inverse = np.unique(years, return_inverse=True)
    sums = np.bincount(inverse, weights=values)
    counts = np.bincount(inverse)
    return values - sums[inverse] / counts[inverse]


def _bootstrap_alad(r_t, r_lag, s_lag, country, year, n_replicates, seed, *,
                    tail_weights):
    """Country-resampled replicate estimates; None if too few succeed.

    Sizes are reconstructed within each pseudo-panel: resampling countries
    changes every year's cross-sectional mean log level, and sizes are
    defined against that mean, so each replicate re-demeans the drawn sizes
    per year (with multiplicity).  Without this, replicate size sums drift
    away from zero and the scale term's leverage on beta is distorted.
    """
    unique = np.unique(country)
    rows_of = {c: np.flatnonzero(country == c) for c in unique}
    entropy = _seed_entropy(seed)
    draws = []
    for rep in range(n_replicates):
        rng = np.random.default_rng(np.random.SeedSequence(entropy + [rep]))
        chosen = rng.choice(unique, size=unique.size, replace=True)
        idx = np.concatenate([rows_of[c] for c in chosen])
        if float(np.std(s_lag[idx])) < 1e-12:
            continue  # no size variation drawn; beta unidentified this round
        sizes = _demean_within_years(s_lag[idx], year[idx])
        alpha, phi1, beta, _ = _fit_alad_arrays(
            r_t[idx], r_lag[idx], sizes,
            tol=1e-7, max_alternations=60, tail_weights=tail_weights, polish=True,
        )
        draws.append((alpha, phi1, beta))
    if len(draws) < max(10, n_replicates // 2):
        return None
    return np.asarray(draws)
