"""The four mixture laws of calibrated summary statistics.

* MeanMixture: law of the calibrated sample mean; a translation-scale mixture
  of N(beta0 + t mu_z, t^2 sigma_z^2/n + sigma0^2) over t ~ N(beta1, sigma1^2).
* VarianceMixture: law of u = nu S_Y^2/(sigma1^2 sigma_z^2); a scale mixture
  of gamma(nu/2, scale 2w) over w ~ chi2_1(lambda).
* TsqMixture: law of t0^2; noncentral t^2(nu, delta/w) mixed over
  w ~ chi2_1(lambda).
* SignedTMixture: law of t0; noncentral t(nu, delta0/s) mixed over
  s = sqrt(w) ~ |N(lambda0, 1)|.

Mixing integrals run on cached Gauss-Legendre panels over analytically
bounded windows (the Gaussian mixing variable over beta1 +/- k sigma1, the
chi-squared one over [0, quantile(1 - 1e-12)], substituted w = s^2 so the
w^{-1/2} weight is smooth).  CDFs mix the conditional CDFs over the same
cached panels, which equals integrating the mixture pdf from the support
edge (Tonelli) but stays smooth where near-degenerate mixing components
make the pointwise pdf too spiky to quadrate; the signed-t law, whose
components never narrow, integrates its own pdf outward from 0 on cached
panels.  Series kernels honor the fixed minimum term counts, then escalate
until a computable tail bound drops below abs_tol; exceeding the hard cap
raises AccuracyError, never truncating silently.

With delta > 0 the t^2 / signed-t laws have genuinely heavy far tails (slope
draws near zero inflate the conditional noncentrality, and
P[t0^2 > T] decays only like 1/sqrt(T)).  Mixing nodes with noncentralities
beyond the series budget therefore evaluate their conditional kernels in
exact integral form: the signed-t law through the chi-squared integral of
the conditional density, the t^2 law through the Gaussian-root identity
u = nu (g + sqrt(phi))^2 / W on log-graded panels, both smooth at any
parameter point where the series would need j ~ noncentrality terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import AccuracyError, ParamError
from .model import MixtureParams
from .quadrature import QuadSpec, bisect_cdf, gauss_legendre_nodes, refine_panels
from . import special as ser

_Z_SUPPORT = 8.5       # Gaussian component half-width; Phi(-8.5) ~ 1e-17
_MAX_J_TERMS = 120_000
_NCT_SERIES_PHI_MAX = 20.0   # beyond this the chi2-integral kernel takes over


class _CdfCache:
    """Cumulative integrals of a vectorized integrand on panels grown outward
    from an origin; panel sets are cached and reused across calls."""

    def __init__(self, integrand, origin, quad, first_width, direction=+1):
        self._f = integrand
        self._origin = float(origin)
        self._quad = quad
        self._dir = 1 if direction >= 0 else -1
        self._width = float(first_width)
        self._edges = [0.0]        # outward distance from origin
        self._cums = [0.0]

    def _seg_f(self, x_out):
        return self._f(self._origin + self._dir * np.asarray(x_out, dtype=float))

    def _extend_to(self, span):
        while self._edges[-1] < span:
            a = self._edges[-1]
            b = a + self._width
            self._width *= 2.0
            rule = refine_panels(self._seg_f, a, b, self._quad, initial_panels=8)
            base = self._cums[-1]
            parts = np.cumsum(rule.panel_integrals(self._seg_f(rule.nodes)))
            for edge, part in zip(rule.edges[1:], parts):
                self._edges.append(float(edge))
                self._cums.append(base + float(part))

    def cum(self, x):
        """Integral of the integrand from the origin out to x (vectorized)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        span = np.maximum(self._dir * (x - self._origin), 0.0)
        if span.size and float(np.max(span)) > self._edges[-1]:
            self._extend_to(float(np.max(span)))
        edges = np.asarray(self._edges)
        cums = np.asarray(self._cums)
        idx = np.clip(np.searchsorted(edges, span, side="right") - 1,
                      0, len(edges) - 2)
        out = cums[idx].copy()
        frac = span - edges[idx]
        active = frac > 0
        if np.any(active):
            gx, gw = np.polynomial.legendre.leggauss(12)
            a = edges[idx[active]]
            half = 0.5 * frac[active]
            nodes = a[:, None] + half[:, None] * (gx[None, :] + 1.0)
            vals = self._seg_f(nodes.ravel()).reshape(nodes.shape)
            out[active] += half * (vals * gw[None, :]).sum(axis=1)
        return out

    def grid(self):
        """(abscissae, cumulative) at all cached panel edges, in real coords."""
        e = np.asarray(self._edges)
        return self._origin + self._dir * e, np.asarray(self._cums)


def _as_batch(u):
    u = np.asarray(u, dtype=float)
    return (u.ndim == 0), np.atleast_1d(u).astype(float)


# ----------------------------------------------------------------------
# mean mixture
# ----------------------------------------------------------------------

class MeanMixture:
    """Density/CDF evaluator of the calibrated sample mean (an exact
    translation-scale Gaussian mixture over the slope draw).

    With sigma0 = 0 and a mixing window containing t = 0, the conditional
    scale collapses at t = 0: the window is split there so nodes avoid the
    degenerate point.  The mixture pdf then carries an integrable spike at
    u = beta0 + t mu_z |_{t=0}; CDFs and moments remain finite.
    """

    def __init__(self, params: MixtureParams, quad: QuadSpec = QuadSpec()):
        if params.ideal:
            raise ParamError("ideal-mode parameters make the mean law degenerate")
        self.params = params
        self.quad = quad
        p = params
        k = quad.mixing_range_sigmas
        lo, hi = p.beta1 - k * p.sigma1, p.beta1 + k * p.sigma1
        sd_edge = lambda t: math.sqrt(t * t * p.sigma_z ** 2 / p.n + p.sigma0 ** 2)
        probe_lo = min(p.beta0 + t * p.mu_z - 3 * sd_edge(t) for t in (lo, 0.0, hi))
        probe_hi = max(p.beta0 + t * p.mu_z + 3 * sd_edge(t) for t in (lo, 0.0, hi))
        self._probe_u = np.linspace(probe_lo, probe_hi, 9)
        split = (0.0,) if lo < 0.0 < hi else ()
        rule = refine_panels(self._mixing_pdf, lo, hi, quad,
                             initial_panels=32, split_at=split,
                             probe=self._probe)
        self._t = rule.nodes
        self._w = rule.weights * self._mixing_pdf(self._t)
        self._cond_mean = p.beta0 + self._t * p.mu_z
        self._cond_sd = np.sqrt(self._t ** 2 * p.sigma_z ** 2 / p.n + p.sigma0 ** 2)

    def _mixing_pdf(self, t):
        p = self.params
        z = (np.asarray(t, dtype=float) - p.beta1) / p.sigma1
        return np.exp(-0.5 * z * z) / (p.sigma1 * math.sqrt(2.0 * math.pi))

    def _probe(self, rule):
        p = self.params
        t = rule.nodes
        w = rule.weights * self._mixing_pdf(t)
        mean = p.beta0 + t * p.mu_z
        sd = np.sqrt(t ** 2 * p.sigma_z ** 2 / p.n + p.sigma0 ** 2)
        z = (self._probe_u[None, :] - mean[:, None]) / sd[:, None]
        dens = np.exp(-0.5 * z * z) / (sd[:, None] * math.sqrt(2.0 * math.pi))
        return w @ dens

    def support(self):
        lo = float(np.min(self._cond_mean - _Z_SUPPORT * self._cond_sd))
        hi = float(np.max(self._cond_mean + _Z_SUPPORT * self._cond_sd))
        return lo, hi

    def pdf(self, u):
        scalar, u = _as_batch(u)
        z = (u[None, :] - self._cond_mean[:, None]) / self._cond_sd[:, None]
        dens = np.exp(-0.5 * z * z) / (self._cond_sd[:, None] * math.sqrt(2.0 * math.pi))
        out = self._w @ dens
        return float(out[0]) if scalar else out

    def cdf(self, u):
        scalar, u = _as_batch(u)
        z = (u[None, :] - self._cond_mean[:, None]) / self._cond_sd[:, None]
        out = np.clip(self._w @ sp.ndtr(z), 0.0, 1.0)
        return float(out[0]) if scalar else out

    def interval_prob(self, lo, hi):
        if hi < lo:
            raise ValueError("interval bounds out of order")
        return float(self.cdf(hi) - self.cdf(lo))

    def ppf(self, prob):
        if not 0.0 < prob < 1.0:
            raise ValueError("probability must be in (0, 1)")
        lo, hi = self.support()
        return bisect_cdf(lambda x: float(self.cdf(x)), prob, lo, hi,
                          xtol=1e-8, expand="both")


def mean_mixture(p: MixtureParams, quad: QuadSpec = QuadSpec()) -> MeanMixture:
    """Evaluator of the unconditional law of the calibrated sample mean."""
    return MeanMixture(p, quad)


# ----------------------------------------------------------------------
# sqrt-chi2 mixing rule shared by the nonnegative-support laws
# ----------------------------------------------------------------------

def _mixing_density(lam: float, quad: QuadSpec):
    """Density of s = sqrt(w), w ~ chi2_1(lam): 2 s p_chi2(s^2)."""
    def mixdens(s):
        s = np.asarray(s, dtype=float)
        return 2.0 * s * ser.nc_chisq1_pdf(s * s, lam, abs_tol=quad.abs_tol * 1e-3,
                                           min_terms=quad.series_terms_inner)
    return mixdens


def _sqrt_mixing_rule(lam: float, quad: QuadSpec, probe_fn, *, s_lo: float = 0.0):
    """Panel rule over s = sqrt(w) on [s_lo, upper window]; returns
    (nodes, weights) with weights already multiplied by the mixing density."""
    lam0 = math.sqrt(lam)
    s_hi = ser.sqrt_mixing_upper(lam0)
    mixdens = _mixing_density(lam, quad)
    rule = refine_panels(mixdens, s_lo, s_hi, quad, initial_panels=32,
                         split_at=(lam0,) if lam0 > s_lo else (),
                         probe=probe_fn)
    return rule.nodes, rule.weights * mixdens(rule.nodes)


def _log_graded_rule(lam: float, quad: QuadSpec, s_hi: float, *,
                     decades: float = 6.0, panels_per_decade: int = 6):
    """Log-graded panel rule on (0, s_hi] for the near-zero slope region;
    the conditional-law transitions span ~2 decades in log(s), so modest
    log-uniform panels resolve them at any target point."""
    edges = s_hi * np.logspace(-decades, 0.0, int(decades * panels_per_decade) + 1)
    nodes, weights = gauss_legendre_nodes(edges, 12)
    mixdens = _mixing_density(lam, quad)
    return nodes, weights * mixdens(nodes)


_CHI2_RULES: dict = {}


def _chi2_rule(nu: float, quad: QuadSpec):
    """Cached panel rule with weights for the chi-squared(nu) density."""
    key = (nu, quad)
    if key not in _CHI2_RULES:
        w_lo = 2.0 * float(sp.gammaincinv(nu / 2.0, 1e-15))
        w_hi = 2.0 * float(sp.gammaincinv(nu / 2.0, 1.0 - 1e-15))

        def chi2_pdf(w):
            w = np.asarray(w, dtype=float)
            return np.exp((nu / 2.0 - 1.0) * np.log(w) - 0.5 * w
                          - (nu / 2.0) * math.log(2.0) - sp.gammaln(nu / 2.0))

        rule = refine_panels(chi2_pdf, w_lo, w_hi, quad, initial_panels=32)
        _CHI2_RULES[key] = (rule.nodes, rule.weights * chi2_pdf(rule.nodes))
    return _CHI2_RULES[key]


_GAUSS_RULE: dict = {}


def _std_gaussian_rule(half_width: float = 8.6, panels: int = 16,
                       order: int = 10):
    """Cached panel rule with standard-normal weights on [-hw, hw]."""
    key = (half_width, panels, order)
    if key not in _GAUSS_RULE:
        nodes, weights = gauss_legendre_nodes(
            np.linspace(-half_width, half_width, panels + 1), order)
        dens = np.exp(-0.5 * nodes * nodes) / math.sqrt(2.0 * math.pi)
        _GAUSS_RULE[key] = (nodes, weights * dens)
    return _GAUSS_RULE[key]


class VarianceMixture:
    """Evaluator of u = nu S_Y^2 / (sigma1^2 sigma_z^2): a gamma(nu/2, 2w)
    scale mixture over w ~ chi2_1(lambda).  Mean is nu (1 + lambda)."""

    def __init__(self, nu: int, lam: float, quad: QuadSpec = QuadSpec()):
        if nu < 1:
            raise ParamError("nu must be >= 1")
        if lam < 0:
            raise ParamError("lambda must be nonnegative")
        self.nu = float(nu)
        self.lam = float(lam)
        self.quad = quad
        probe_u = np.linspace(0.5, max(4.0, 2.0 * self.nu * (1.0 + lam)), 9)

        def probe(rule):
            w = rule.weights * 2.0 * rule.nodes * ser.nc_chisq1_pdf(
                rule.nodes ** 2, lam, abs_tol=quad.abs_tol * 1e-3,
                min_terms=quad.series_terms_inner)
            return w @ self._kernel(rule.nodes, probe_u)

        self._s, self._w = _sqrt_mixing_rule(self.lam, quad, probe)

    def _kernel(self, s, u):
        """gamma(nu/2, scale 2 s^2) densities, shape (len(s), len(u))."""
        nu = self.nu
        scale = 2.0 * np.asarray(s, dtype=float)[:, None] ** 2
        u = np.asarray(u, dtype=float)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = ((nu / 2.0 - 1.0) * np.log(u) - u / scale
                      - (nu / 2.0) * np.log(scale) - sp.gammaln(nu / 2.0))
        return np.where(u > 0, np.exp(logpdf), 0.0)

    def support(self):
        w_hi = float(np.max(self._s)) ** 2
        u_hi = 2.0 * w_hi * float(sp.gammaincinv(self.nu / 2.0, 1.0 - 1e-14))
        return 0.0, u_hi

    def pdf(self, u):
        scalar, u = _as_batch(u)
        out = self._w @ self._kernel(self._s, u)
        return float(out[0]) if scalar else out

    def cdf(self, u):
        scalar, u = _as_batch(u)
        # conditional-CDF mixture: sum_s w_s P[gamma(nu/2, 2 s^2) <= u]
        pos = np.clip(u, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = pos[None, :] / (2.0 * self._s[:, None] ** 2)
        out = self._w @ sp.gammainc(self.nu / 2.0, arg)
        out = np.clip(np.where(u <= 0, 0.0, out), 0.0, 1.0)
        return float(out[0]) if scalar else out

    def interval_prob(self, lo, hi):
        if hi < lo:
            raise ValueError("interval bounds out of order")
        return float(self.cdf(hi) - self.cdf(lo))

    def ppf(self, prob):
        if not 0.0 < prob < 1.0:
            raise ValueError("probability must be in (0, 1)")
        hi = self.nu * (1.0 + self.lam)
        return bisect_cdf(lambda x: float(self.cdf(x)), prob, 0.0, hi,
                          xtol=1e-8, expand="up")


def variance_mixture(nu: int, lam: float, quad: QuadSpec = QuadSpec()) -> VarianceMixture:
    """Evaluator of the scaled sample-variance mixture law."""
    return VarianceMixture(nu, lam, quad)


# ----------------------------------------------------------------------
# t^2 mixture
# ----------------------------------------------------------------------

_TSQ_SERIES_PHI_MAX = 4000.0  # larger conditional noncentralities use the
                              # exact Gaussian-root integral kernel


class TsqMixture:
    """Evaluator of the t0^2 mixture: noncentral t^2(nu, delta/w) over
    w ~ chi2_1(lambda).

    For mixing nodes of moderate conditional noncentrality the double series
    collapses to sum_j m_j f_j(u) (pdf) and sum_j m_j I_x(j+1/2, nu/2) (CDF)
    with m_j = E_w[pois(j; delta/(2w))] cached once per evaluator; the
    remaining Poisson mass bounds the truncation tail.  Slope draws near
    zero (noncentrality beyond the series budget) carry the law's heavy far
    tail and are evaluated exactly through the Gaussian-root integral form
    of the conditional kernel on log-graded panels.  At delta = 0 only m_0
    survives and the law is exactly central F(1, nu) for every lambda.
    """

    def __init__(self, nu: int, delta: float, lam: float,
                 quad: QuadSpec = QuadSpec()):
        if nu < 1:
            raise ParamError("nu must be >= 1")
        if delta < 0 or lam < 0:
            raise ParamError("delta and lambda must be nonnegative")
        self.nu = float(nu)
        self.delta = float(delta)
        self.lam = float(lam)
        self.quad = quad

        def probe(rule):
            w = rule.weights * 2.0 * rule.nodes * ser.nc_chisq1_pdf(
                rule.nodes ** 2, lam, abs_tol=quad.abs_tol * 1e-3,
                min_terms=quad.series_terms_inner)
            if self.delta == 0.0:
                return np.atleast_1d(w.sum())
            means = self.delta / (2.0 * rule.nodes ** 2)
            return np.exp(ser.poisson_log_pmf(np.arange(6), means)) @ w

        s_hi = ser.sqrt_mixing_upper(math.sqrt(lam))
        s_split = (min(math.sqrt(self.delta / _TSQ_SERIES_PHI_MAX), s_hi / 2.0)
                   if self.delta > 0 else 0.0)
        self._s_ser, self._w_ser = _sqrt_mixing_rule(self.lam, quad, probe,
                                                     s_lo=s_split)
        if s_split > 0.0:
            s_ext, self._w_ext = _log_graded_rule(self.lam, quad, s_split)
            self._sqrtphi_ext = math.sqrt(self.delta) / s_ext
        else:
            self._w_ext = np.zeros(0)
            self._sqrtphi_ext = np.zeros(0)
        self._mass_ser = float(np.sum(self._w_ser))
        self._mj = np.zeros(0)

    # -- Poisson-mixture coefficients over the series nodes ----------------
    def _extend_mj(self, j_hi):
        j_have = self._mj.size
        if j_hi <= j_have:
            return
        j_new = np.arange(j_have, j_hi)
        if self.delta == 0.0:
            block = np.zeros(j_new.size)
            if j_have == 0:
                block[0] = self._mass_ser
        else:
            means = self.delta / (2.0 * self._s_ser ** 2)
            block = np.exp(ser.poisson_log_pmf(j_new, means)) @ self._w_ser
        self._mj = np.concatenate([self._mj, block])

    # -- exact kernel for extreme nodes -------------------------------------
    # u = nu X / W with X = (g + sqrt(phi))^2, g ~ N(0,1), W ~ chi2_nu, so
    #   F_cond(u) = E_g[ Q_nu( nu X / (2u) ) ],  Q_nu = regularized upper gamma
    #   f_cond(u) = E_g[ y^{nu/2} e^{-y} ] / (u Gamma(nu/2)),  y = nu X/(2u);
    # the g-integrand is smooth at every (u, phi), unlike the W-form whose
    # transition sharpens like sqrt(u).
    def _extreme_parts(self, u, want_pdf):
        """Contribution of nodes beyond the series budget, banded per node to
        the u-range where the conditional law transitions."""
        out = np.zeros_like(u)
        if self._w_ext.size == 0:
            return out
        order = np.argsort(u)
        us = u[order]
        res = np.zeros_like(us)
        nu = self.nu
        g, gw = _std_gaussian_rule()
        snap = 1e-13
        y_lo = float(sp.gammainccinv(nu / 2.0, 1.0 - snap))   # Q >= 1 - snap
        y_hi = float(sp.gammainccinv(nu / 2.0, snap))          # Q <= snap
        lg = float(sp.gammaln(nu / 2.0))
        for w_i, sq_i in zip(self._w_ext, self._sqrtphi_ext):
            v = g + sq_i
            x_lo = max(sq_i - 8.6, 0.0) ** 2
            x_hi = (sq_i + 8.6) ** 2
            lo_u = nu * x_lo / (2.0 * y_hi)
            hi_u = nu * x_hi / (2.0 * y_lo)
            a = np.searchsorted(us, lo_u, side="left")
            b = np.searchsorted(us, hi_u, side="right")
            if a < b:
                y = (0.5 * nu) * (v * v)[:, None] / us[None, a:b]   # (G, band)
                if want_pdf:
                    kern = np.exp(0.5 * nu * np.log(y) - y - lg) / us[None, a:b]
                    res[a:b] += w_i * (gw @ kern)
                else:
                    res[a:b] += w_i * (gw @ sp.gammaincc(nu / 2.0, y))
            if not want_pdf:
                res[b:] += w_i  # conditional CDF within snap of 1 above band
        out[order] = res
        return out

    def pdf(self, u):
        scalar, u = _as_batch(u)
        out = np.zeros_like(u)
        pos = u > 0
        if np.any(pos):
            out[pos] = self._pdf_pos(u[pos])
        return float(out[0]) if scalar else out

    def _pdf_pos(self, u):
        tol = self.quad.abs_tol
        j_hi = max(self.quad.series_terms_outer, 16)
        total = self._extreme_parts(u, want_pdf=True)
        j_done = 0
        mode = ser.tsq_fj_mode(u, self.nu)
        # the largest central-component value at each u bounds the mass route
        f_mode = np.exp(ser.tsq_log_fj_aligned(np.ceil(mode), u, self.nu))
        while True:
            self._extend_mj(j_hi)
            j = np.arange(j_done, j_hi)
            fj = np.exp(ser.tsq_log_fj(j, u, self.nu))
            total += self._mj[j_done:j_hi] @ fj
            decay_bound = ser.tsq_fj_tail_bound(j_hi, u, self.nu)
            remaining = max(self._mass_ser - float(self._mj[:j_hi].sum()), 0.0)
            mass_bound = remaining * f_mode
            if np.all(np.minimum(decay_bound, mass_bound) < tol):
                return total
            j_done = j_hi
            j_hi = min(2 * j_hi, j_hi + 4096)
            if j_hi > _MAX_J_TERMS:
                raise AccuracyError(
                    "t^2 mixture series exceeded %d terms without certifying "
                    "abs_tol=%g (u up to %g)"
                    % (_MAX_J_TERMS, tol, float(np.max(u))))

    def cdf(self, u):
        scalar, u = _as_batch(u)
        out = np.zeros_like(u)
        pos = u > 0
        if np.any(pos):
            out[pos] = self._cdf_pos(u[pos])
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if scalar else out

    def _cdf_pos(self, u):
        """Conditional-CDF mixture over the series nodes,
        F_ser(u) = sum_j m_j I_x(j+1/2, nu/2) with x = u/(u+nu), plus the
        banded chi-squared integral contribution of the extreme nodes.  The
        incomplete-beta factor is decreasing in j and the series nodes'
        Poisson mass is exhausted by bounded j, which closes the tail bound."""
        tol = self.quad.abs_tol
        x = u / (u + self.nu)
        out = self._extreme_parts(u, want_pdf=False)
        active = np.ones(u.size, dtype=bool)
        j_done = 0
        j_hi = max(self.quad.series_terms_outer, 16)
        while True:
            self._extend_mj(j_hi)
            j = np.arange(j_done, j_hi)
            ib = sp.betainc(j[:, None] + 0.5, self.nu / 2.0, x[None, active])
            out[active] += self._mj[j_done:j_hi] @ ib
            remaining = max(self._mass_ser - float(self._mj[:j_hi].sum()), 0.0)
            bound = sp.betainc(j_hi + 1.5, self.nu / 2.0, x[active]) * remaining
            idx = np.where(active)[0]
            active[idx[bound <= tol]] = False
            if not np.any(active):
                return out
            j_done = j_hi
            j_hi = min(2 * j_hi, j_hi + 4096)
            if j_hi > _MAX_J_TERMS:
                raise AccuracyError(
                    "t^2 mixture CDF series exceeded %d terms without "
                    "certifying abs_tol=%g" % (_MAX_J_TERMS, tol))

    def interval_prob(self, lo, hi):
        if hi < lo:
            raise ValueError("interval bounds out of order")
        return float(self.cdf(hi) - self.cdf(lo))

    def ppf(self, prob):
        if not 0.0 < prob < 1.0:
            raise ValueError("probability must be in (0, 1)")
        hi = 3.0 * self.nu + self.delta * (1.0 + self.lam)
        return bisect_cdf(lambda x: float(self.cdf(x)), prob, 0.0, hi,
                          xtol=1e-8, expand="up")


def tsq_mixture(nu: int, delta: float, lam: float,
                quad: QuadSpec = QuadSpec()) -> TsqMixture:
    """Evaluator of the unconditional t0^2 mixture law."""
    return TsqMixture(nu, delta, lam, quad)


# ----------------------------------------------------------------------
# signed-t mixture
# ----------------------------------------------------------------------

class SignedTMixture:
    """Evaluator of the t0 mixture: noncentral t(nu, delta0/s) mixed over the
    shifted half-normal law of s.

    Mixing nodes with delta0/s below the series budget use the signed series
    (minimum 20 terms, escalated under a geometric tail bound); more extreme
    noncentralities are evaluated through the exact chi-squared integral form
    of the same conditional density.  Negative delta0 mirrors the law.
    """

    def __init__(self, nu: int, delta0: float, lambda0: float,
                 quad: QuadSpec = QuadSpec()):
        if nu < 1:
            raise ParamError("nu must be >= 1")
        if lambda0 < 0:
            raise ParamError("lambda0 must be nonnegative")
        self.nu = float(nu)
        self.delta0 = float(delta0)
        self.lambda0 = float(lambda0)
        self.quad = quad
        self._mirror = self.delta0 < 0
        self._d0 = abs(self.delta0)
        s_hi = ser.sqrt_mixing_upper(lambda0)

        def mixdens(s):
            return ser.sqrt_ncchisq1_pdf(s, lambda0)

        rule = refine_panels(mixdens, 0.0, s_hi, quad, initial_panels=32,
                             split_at=(lambda0,) if lambda0 > 0 else ())
        self._s = rule.nodes
        self._w = rule.weights * mixdens(self._s)
        if self._d0 > 0.0:
            self._series_sel = (self._d0 / self._s) <= _NCT_SERIES_PHI_MAX
        else:
            self._series_sel = np.ones_like(self._s, dtype=bool)
        self._cdf_right = None
        self._cdf_left = None
        self._left_mass = None
        self._min_terms = max(20, quad.series_terms_outer)

    # -- conditional-density kernels ---------------------------------------
    def _series_matrix(self, phi, u):
        """Conditional noncentral-t densities by the signed series; returns
        the (len(phi), len(u)) matrix.  All phi must be <= the series budget."""
        nu = self.nu
        tol = self.quad.abs_tol
        g = u / np.sqrt(nu + u * u)
        amax = float(np.max(np.abs(g))) if u.size else 0.0
        pmax = float(np.max(phi)) if phi.size else 0.0
        qmax = math.sqrt(2.0) * pmax * amax
        acc = np.zeros((phi.size, u.size))
        j_done, j_hi = 0, max(self._min_terms, 16)
        while True:
            j = np.arange(j_done, j_hi, dtype=float)
            if pmax > 0:
                log_node = (-0.5 * phi[None, :] ** 2
                            + j[:, None] * np.log(math.sqrt(2.0) * phi)[None, :]
                            + ser.nct_log_cj(j, nu)[:, None])
                node = np.exp(log_node)                    # (B, M)
            else:
                node = np.zeros((j.size, phi.size))
                if j_done == 0:
                    node[0, :] = 1.0
            sign = np.where((j[:, None] % 2.0) == 0.0, 1.0, np.sign(g)[None, :])
            gpow = sign * np.abs(g[None, :]) ** j[:, None]  # (B, K)
            acc += node.T @ gpow
            if pmax == 0.0 or amax == 0.0:
                break
            r = qmax * math.sqrt((nu + j_hi + 2.0) / 2.0) / (j_hi + 1.0)
            if r < 0.9 and j_hi > 0.5 * qmax * qmax + 2.0 * qmax + nu:
                block_max = float(np.max(node[-1])) * amax ** (j_hi - 1.0)
                if block_max * r / (1.0 - r) < tol:
                    break
            j_done, j_hi = j_hi, min(2 * j_hi, j_hi + 4096)
            if j_hi > _MAX_J_TERMS:
                raise AccuracyError(
                    "signed-t series exceeded %d terms without certifying "
                    "abs_tol=%g" % (_MAX_J_TERMS, tol))
        return acc * np.exp(ser.nct_log_prefactor(u, nu))[None, :]

    def _chi2_matrix(self, phi, u):
        """Exact conditional noncentral-t densities via
        f(u) = E_W[ sqrt(W/nu) phi_N(u sqrt(W/nu) - phi) ], W ~ chi2_nu."""
        wn, ww = _chi2_rule(self.nu, self.quad)
        root = np.sqrt(wn / self.nu)
        c = 1.0 / math.sqrt(2.0 * math.pi)
        out = np.empty((phi.size, u.size))
        for i, ph in enumerate(phi):
            z = root[:, None] * u[None, :] - ph
            out[i] = (ww * root) @ (c * np.exp(-0.5 * z * z))
        return out

    def _pdf_base(self, u):
        """pdf of the law with noncentrality |delta0| (pre-mirror)."""
        if self._d0 == 0.0:
            cond = self._series_matrix(np.zeros(1), u)
            return float(np.sum(self._w)) * cond[0]
        phi = self._d0 / self._s
        sel = self._series_sel
        out = np.zeros_like(u)
        if np.any(sel):
            out += self._w[sel] @ self._series_matrix(phi[sel], u)
        if np.any(~sel):
            out += self._w[~sel] @ self._chi2_matrix(phi[~sel], u)
        return out

    def pdf(self, u):
        scalar, u = _as_batch(u)
        out = self._pdf_base(-u if self._mirror else u)
        return float(out[0]) if scalar else out

    def support(self):
        # the left (non-spike) edge is bounded by the central-t tail; the
        # right side carries the heavy mixing-spike tail and is handled by
        # callers through interval probabilities or bracket expansion
        half = math.sqrt(self.nu) * (1e14) ** (1.0 / self.nu)
        lo, hi = -half, half + self._d0 * ser.sqrt_mixing_upper(0.0)
        return (-hi, -lo) if self._mirror else (lo, hi)

    def _ensure_caches(self):
        if self._cdf_right is None:
            w0 = math.sqrt(self.nu)
            self._cdf_right = _CdfCache(self._pdf_base, 0.0, self.quad,
                                        first_width=w0)
            self._cdf_left = _CdfCache(self._pdf_base, 0.0, self.quad,
                                       first_width=w0, direction=-1)
            half = math.sqrt(self.nu) * (1e14) ** (1.0 / self.nu)
            self._left_mass = float(self._cdf_left.cum(-half)[0])

    def _cdf_base(self, u):
        self._ensure_caches()
        return np.clip(np.where(
            u >= 0,
            self._left_mass + self._cdf_right.cum(np.maximum(u, 0.0)),
            self._left_mass - self._cdf_left.cum(np.minimum(u, 0.0)),
        ), 0.0, 1.0)

    def cdf(self, u):
        scalar, u = _as_batch(u)
        if self._mirror:
            out = 1.0 - self._cdf_base(-u)
        else:
            out = self._cdf_base(u)
        return float(out[0]) if scalar else out

    def interval_prob(self, lo, hi):
        """P[lo <= t0 <= hi] by direct integration (no absolute-tail terms)."""
        if hi < lo:
            raise ValueError("interval bounds out of order")
        if self._mirror:
            lo, hi = -hi, -lo
        self._ensure_caches()

        def signed_cum(x):
            if x >= 0:
                return float(self._cdf_right.cum(x)[0])
            return -float(self._cdf_left.cum(x)[0])

        return signed_cum(hi) - signed_cum(lo)

    def ppf(self, prob):
        if not 0.0 < prob < 1.0:
            raise ValueError("probability must be in (0, 1)")
        half = math.sqrt(self.nu) + self._d0
        return bisect_cdf(lambda x: float(self.cdf(x)), prob, -half, half,
                          xtol=1e-8, expand="both")


def signed_t_mixture(nu: int, delta0: float, lambda0: float,
                     quad: QuadSpec = QuadSpec()) -> SignedTMixture:
    """Evaluator of the signed t0 mixture law."""
    return SignedTMixture(nu, delta0, lambda0, quad)


# ----------------------------------------------------------------------
# dispatch record
# ----------------------------------------------------------------------

_KINDS = ("mean", "variance", "tsq", "signed_t")


@dataclass(frozen=True)
class DistSpec:
    """One of the four mixture laws plus its parameters.

    kind "mean" takes params=MixtureParams; "variance" (nu, lam);
    "tsq" (nu, delta, lam); "signed_t" (nu, delta0, lambda0).
    """

    kind: str
    params: object = None
    nu: int | None = None
    lam: float | None = None
    delta: float | None = None
    delta0: float | None = None
    lambda0: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParamError("unknown mixture kind %r (expected one of %r)"
                             % (self.kind, _KINDS))

    def build(self, quad: QuadSpec = QuadSpec()):
        if self.kind == "mean":
            if not isinstance(self.params, MixtureParams):
                raise ParamError("mean mixture needs MixtureParams")
            return mean_mixture(self.params, quad)
        if self.kind == "variance":
            return variance_mixture(self.nu, self.lam, quad)
        if self.kind == "tsq":
            return tsq_mixture(self.nu, self.delta, self.lam, quad)
        return signed_t_mixture(self.nu, self.delta0, self.lambda0, quad)
