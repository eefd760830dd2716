"""Moments of calibrated sample statistics and corrected probability regions.

The mean and variance of the calibrated sample mean are closed form
(beta0 + beta1 mu_z and kappa2 sigma_z^2/n + sigma0^2 + sigma1^2 mu_z^2);
skewness and kurtosis come from quadrature of the mean-mixture density, with
the closed-form variance doubling as an internal accuracy check.  The sample
variance S_Y^2 has expectation kappa2 sigma_z^2, short of the true
measurement variance by sigma0^2 + sigma1^2 mu_z^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AccuracyError
from .mixtures import MeanMixture, mean_mixture
from .model import MixtureParams, derive_params
from .quadrature import QuadSpec, refine_panels


@dataclass(frozen=True)
class MomentSummary:
    """Mean, variance and moment ratios (skewness gamma, non-excess kurtosis kappa)."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")
        if self.kurtosis < 1.0 + self.skewness ** 2 - 1e-9:
            raise ValueError("kurtosis must satisfy kappa >= 1 + gamma^2")


@dataclass(frozen=True)
class ProbRegion:
    """An equal-tail probability region with its quadrature-verified coverage."""

    lower: float
    upper: float
    coverage: float
    achieved: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("region bounds out of order")


def mean_moments(p: MixtureParams, quad: QuadSpec = QuadSpec()) -> MomentSummary:
    """Moment summary of the calibrated sample mean.

    Mean and variance are closed form; gamma and kappa integrate the mixture
    density over a window wide enough for fourth moments.  Disagreement
    between the closed-form and quadrature variance beyond tolerance raises
    AccuracyError.
    """
    d = derive_params(p)
    mm = mean_mixture(p, quad)
    m1, m2, m3, m4 = _central_moments(mm, d.mu_y, quad)
    var_tol = 200.0 * (quad.abs_tol + quad.rel_tol * d.var_ybar) + 1e-10
    if abs(m2 - d.var_ybar) > var_tol or abs(m1) > var_tol:
        raise AccuracyError(
            "mean-mixture quadrature variance %.12g disagrees with closed form "
            "%.12g beyond %.3g" % (m2, d.var_ybar, var_tol))
    return MomentSummary(
        mean=d.mu_y,
        variance=d.var_ybar,
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / m2 ** 2,
    )


def _central_moments(mm: MeanMixture, center: float, quad: QuadSpec):
    """First four central moments of a mean-mixture law by panel quadrature."""
    p = mm.params
    k = quad.mixing_range_sigmas
    ts = (p.beta1 - k * p.sigma1, 0.0, p.beta1 + k * p.sigma1)
    sd = lambda t: math.sqrt(t * t * p.sigma_z ** 2 / p.n + p.sigma0 ** 2)
    lo = min(p.beta0 + t * p.mu_z - 9.5 * sd(t) for t in ts)
    hi = max(p.beta0 + t * p.mu_z + 9.5 * sd(t) for t in ts)

    def probe(rule):
        f = mm.pdf(rule.nodes)
        d = rule.nodes - center
        return np.array([rule.integrate(f * d ** r) for r in (1, 2, 3, 4)])

    rule = refine_panels(mm.pdf, lo, hi, quad, initial_panels=32, probe=probe)
    f = mm.pdf(rule.nodes)
    d = rule.nodes - center
    return tuple(rule.integrate(f * d ** r) for r in (1, 2, 3, 4))


class SampleVarianceMoments(NamedTuple):
    expected: float
    bias: float


def expected_sample_variance(p: MixtureParams) -> SampleVarianceMoments:
    """E(S_Y^2) = kappa2 sigma_z^2 and its bias against Var(Y).

    The bias -(sigma0^2 + sigma1^2 mu_z^2) vanishes only in the ideal
    known-coefficients case.
    """
    expected = p.kappa2 * p.sigma_z ** 2
    return SampleVarianceMoments(expected=expected, bias=expected - p.var_y)


def probability_region(dist, coverage: float, mode: str = "equal-tail",
                       *, tol: float = 1e-6) -> ProbRegion:
    """Equal-tail probability region [Q(a/2), Q(1-a/2)] of a mixture evaluator,
    re-verified through the CDF; a coverage mismatch beyond tol raises
    AccuracyError."""
    if not 0.0 < coverage < 1.0:
        raise ValueError("coverage must be in (0, 1)")
    if mode != "equal-tail":
        raise ValueError("only equal-tail regions are supported")
    alpha = 1.0 - coverage
    lower = dist.ppf(alpha / 2.0)
    upper = dist.ppf(1.0 - alpha / 2.0)
    achieved = float(dist.cdf(upper) - dist.cdf(lower))
    if abs(achieved - coverage) > max(tol, 1e-7 + 2e-8 / max(min(
            alpha, coverage), 1e-12)):
        raise AccuracyError(
            "region achieved coverage %.10f misses target %.10f" % (achieved, coverage))
    return ProbRegion(lower=lower, upper=upper, coverage=coverage, achieved=achieved)


def interval_coverage(dist, lower: float, upper: float) -> float:
    """CDF(upper) - CDF(lower) of a mixture evaluator."""
    if not lower < upper:
        raise ValueError("interval bounds out of order")
    return float(np.clip(dist.interval_prob(lower, upper), 0.0, 1.0))


_ROW_HEADER = ("n", "beta0", "sigma0", "mu_z", "sigma_z", "beta1", "sigma1",
               "E", "Var", "gamma", "kappa")


def mean_moment_rows(params_list, quad: QuadSpec = QuadSpec()):
    """Moment-table rows (one per parameter bundle) with the columns
    n, beta0, sigma0, mu_z, sigma_z, beta1, sigma1, E, Var, gamma, kappa."""
    rows = []
    for p in params_list:
        s = mean_moments(p, quad)
        rows.append({
            "n": p.n, "beta0": p.beta0, "sigma0": p.sigma0, "mu_z": p.mu_z,
            "sigma_z": p.sigma_z, "beta1": p.beta1, "sigma1": p.sigma1,
            "E": s.mean, "Var": s.variance, "gamma": s.skewness,
            "kappa": s.kurtosis,
        })
    return rows


def moment_rows_header():
    return _ROW_HEADER
