"""Adaptive Gauss-Legendre panel quadrature used by the mixture evaluators.

All mixture integrals in this package are reduced to smooth integrands on
finite windows (mixing tails are analytically bounded, edge singularities are
removed by change of variables), so fixed-order Legendre panels with
panel-doubling refinement converge spectrally.  Panel node sets are cached by
the evaluators and reused across vectorized pdf/CDF calls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError

_GL_ORDER = 16
_MAX_PANELS = 8192


@dataclass(frozen=True)
class QuadSpec:
    """Accuracy knobs for mixture quadrature and series truncation.

    ``series_terms_outer``/``series_terms_inner`` are the minimum term counts
    for the noncentral-t^2 (respectively noncentral-chi^2_1) series; the
    signed-t series uses max(20, series_terms_outer).  Every series still
    escalates beyond its minimum until its tail bound drops below ``abs_tol``.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    mixing_range_sigmas: float = 10.0
    series_terms_outer: int = 15
    series_terms_inner: int = 30

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.mixing_range_sigmas <= 0:
            raise ValueError("mixing_range_sigmas must be positive")
        if self.series_terms_outer < 1 or self.series_terms_inner < 1:
            raise ValueError("series term minimums must be >= 1")


def gauss_legendre_nodes(edges: np.ndarray, order: int = _GL_ORDER):
    """Nodes and weights of an `order`-point Gauss-Legendre rule on each panel.

    ``edges`` is an increasing array of panel boundaries; returns flat arrays
    of len(edges-1)*order nodes/weights.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    lo = edges[:-1]
    half = 0.5 * (edges[1:] - lo)
    mid = lo + half
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


class PanelRule:
    """A cached panel rule: nodes, weights and per-panel slices."""

    def __init__(self, edges: np.ndarray, order: int = _GL_ORDER):
        self.edges = np.asarray(edges, dtype=float)
        self.order = order
        self.nodes, self.weights = gauss_legendre_nodes(self.edges, order)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def panel_integrals(self, values: np.ndarray) -> np.ndarray:
        prods = self.weights * values
        return prods.reshape(-1, self.order).sum(axis=1)


def refine_panels(f, lo: float, hi: float, quad: QuadSpec, *,
                  initial_panels: int = 16, split_at: tuple = (),
                  probe=None) -> PanelRule:
    """Build a panel rule on [lo, hi], doubling panels until quadrature of
    ``f`` (and optional probe functionals of the rule) stabilizes.

    ``split_at`` lists interior points that must coincide with panel edges.
    ``probe`` maps a PanelRule to a vector of derived quantities; refinement
    stops only once those also stabilize.
    """
    if not hi > lo:
        raise ValueError("empty quadrature window")
    interior = sorted(p for p in split_at if lo < p < hi)
    anchors = np.array([lo] + interior + [hi])

    def make_edges(n_per_segment):
        parts = [np.linspace(anchors[i], anchors[i + 1], n_per_segment + 1)
                 for i in range(len(anchors) - 1)]
        return np.unique(np.concatenate(parts))

    n = max(2, initial_panels // max(1, len(anchors) - 1))
    rule = PanelRule(make_edges(n))
    prev = _probe_vector(rule, f, probe)
    while True:
        n *= 2
        if n * (len(anchors) - 1) > _MAX_PANELS:
            raise AccuracyError(
                "panel refinement exceeded %d panels without reaching "
                "abs_tol=%g" % (_MAX_PANELS, quad.abs_tol))
        rule = PanelRule(make_edges(n))
        cur = _probe_vector(rule, f, probe)
        err = np.max(np.abs(cur - prev))
        scale = np.max(np.abs(cur)) if cur.size else 0.0
        if err <= 0.25 * (quad.abs_tol + quad.rel_tol * scale):
            return rule
        prev = cur


def _probe_vector(rule, f, probe):
    vals = [rule.integrate(f(rule.nodes))]
    if probe is not None:
        vals.extend(np.atleast_1d(probe(rule)))
    return np.asarray(vals, dtype=float)


def bisect_cdf(cdf, target: float, lo: float, hi: float, *,
               xtol: float = 1e-8, expand: str | None = None,
               max_expand: int = 200) -> float:
    """Invert a monotone CDF by bisection to ``xtol`` on the abscissa.

    ``expand`` ("up", "down" or "both") grows the bracket geometrically when
    the target is not initially bracketed; a non-bracketing failure raises
    AccuracyError.
    """
    flo, fhi = cdf(lo) - target, cdf(hi) - target
    tries = 0
    while flo * fhi > 0:
        tries += 1
        if tries > max_expand or expand is None:
            raise AccuracyError(
                "CDF inversion failed to bracket target %g on [%g, %g]"
                % (target, lo, hi))
        span = max(hi - lo, 1.0)
        if expand in ("up", "both") and fhi < 0:
            hi += span
            fhi = cdf(hi) - target
        elif expand in ("down", "both") and flo > 0:
            lo -= span
            flo = cdf(lo) - target
        else:
            raise AccuracyError(
                "CDF inversion cannot bracket target %g (wrong direction)"
                % target)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if (cdf(mid) - target) * flo <= 0:
            hi = mid
        else:
            lo = mid
            flo = cdf(lo) - target
    return 0.5 * (lo + hi)
