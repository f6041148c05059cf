"""
The asymmetric exponential power family
=======================================

One density covers everything from heavy cusp-peaked distributions to the
Gaussian, with separate tail behavior on each side of the mode:

    f(x) = (1/A) * exp( -(1/b_s) * |(x - m) / a_s|^b_s )

where the side s is "l" for x < m and "r" for x >= m, b_s is that side's
shape (1 = exponential/Laplace tail, 2 = Gaussian, below 1 = heavier than
exponential), a_s its scale, and A the joint normalization.  This script
walks the family's special cases, checks the normalization numerically, and
demonstrates the exact sampler.
"""

import numpy as np
import scipy.integrate
import scipy.stats

from growthvol.aep import AepParams, density, left_mass, log_density, sample

# ----------------------------------------------------------------------------
# Special cases.  With both shapes at 2 the density is a Gaussian whose
# standard deviation equals the common scale; with both shapes at 1 it is a
# Laplace whose scale is the mean absolute deviation.

grid = np.linspace(-4.0, 4.0, 9)

gaussian = AepParams.gaussian(a=1.0, m=0.0)
gap = np.max(np.abs(log_density(grid, gaussian) - scipy.stats.norm().logpdf(grid)))
print(f"shapes (2, 2) vs scipy.stats.norm:    max log-density gap {gap:.2e}")

laplace = AepParams.laplace(a=1.0, m=0.0)
gap = np.max(np.abs(log_density(grid, laplace) - scipy.stats.laplace().logpdf(grid)))
print(f"shapes (1, 1) vs scipy.stats.laplace: max log-density gap {gap:.2e}")

# ----------------------------------------------------------------------------
# Asymmetry.  Growth-rate distributions in the package lean left: recessions
# (left side) are heavier-tailed than booms.  A typical fitted shape pair is
# (0.75, 1.0) -- sub-exponential crash tail, exponential boom tail.

skewed = AepParams(b_l=0.75, b_r=1.0, a_l=0.045, a_r=0.050, m=0.01)
total, _ = scipy.integrate.quad(density, -np.inf, np.inf, args=(skewed,), limit=200)
print(f"\nleaning-left density integrates to {total:.12f}")
print(f"mass left of the mode: {left_mass(skewed):.4f}")

for x in (-0.20, -0.10, 0.01, 0.10, 0.20):
    print(f"  f({x:+.2f}) = {density(x, skewed):10.4f}")

# ----------------------------------------------------------------------------
# Exact sampling.  Each side draws |x - m| = a * (b * G)^(1/b) with G a
# Gamma(1/b) variate, and the side itself is Bernoulli with the analytic
# left-of-mode mass -- no accept/reject step, no truncation error.

rng = np.random.default_rng(42)
draws = sample(skewed, 200_000, rng=rng)

empirical_left = np.mean(draws < skewed.m)
print(f"\n200k draws: share left of mode {empirical_left:.4f} "
      f"(analytic {left_mass(skewed):.4f})")

moment = np.mean(draws)
analytic, _ = scipy.integrate.quad(lambda x: x * density(x, skewed),
                                   -np.inf, np.inf, limit=200)
print(f"sample mean {moment:+.5f} (analytic {analytic:+.5f})")

# Tail weight shows up far from the mode: the sub-exponential left side keeps
# producing large deviations at distances where an exponential tail is empty.
for k in (4, 6, 8):
    lo = skewed.m - k * skewed.a_l
    hi = skewed.m + k * skewed.a_r
    left_tail = np.mean(draws < lo)
    right_tail = np.mean(draws > hi)
    print(f"  beyond {k} scales: left {left_tail:.5f}   right {right_tail:.5f}")
