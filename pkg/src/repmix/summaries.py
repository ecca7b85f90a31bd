"""
Summaries of two-component normal mixture posteriors.

Quantiles come from bracketed root finding on the exact mixture CDF. HPD
regions are found by lowering a horizontal cut through the density until the
region above it holds the requested mass; the region boundaries are roots of
``log f(x) - log c`` on the monotone pieces between the density's critical
points, so a bimodal density can give two disjoint intervals.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import logsumexp

from .mixture import (
    UNIT_INFORMATION,
    TwoComponentNormalMixture,
    VagueComponent,
    build_prior,
    update_fixed,
)
from .numerics import NumericError, SPAN_SDS, find_root
from .studies import StudySummary

__all__ = [
    "HpdiSet",
    "DensityGrid",
    "TippingPoint",
    "TraceRow",
    "mixture_cdf",
    "posterior_quantile",
    "critical_points",
    "mode_count",
    "hpdi",
    "tipping_point",
    "hpdi_trace",
    "density_grid",
    "ALWAYS_EXCLUDES",
    "NEVER_EXCLUDES",
    "CROSSING",
]

ALWAYS_EXCLUDES = "always_excludes"
NEVER_EXCLUDES = "never_excludes"
CROSSING = "crossing"

_GRID = 2049


def mixture_cdf(m: TwoComponentNormalMixture, x):
    return m.cdf(x)


def _bracket_out(f, start, step, target_sign, max_doublings=60):
    """Walk from ``start`` in steps growing geometrically until ``sign(f) == target_sign``."""
    x = start
    for _ in range(max_doublings):
        x = x + step
        if np.sign(f(x)) == target_sign:
            return x
        step *= 2.0
    raise NumericError("could not bracket root")


def posterior_quantile(m: TwoComponentNormalMixture, p: float) -> float:
    """Value ``x`` with ``mixture_cdf(m, x) == p``.

    Examples
    --------
    >>> mix = TwoComponentNormalMixture(0.5, -1.0, 1.0, 1.0, 1.0)
    >>> abs(posterior_quantile(mix, 0.5)) < 1e-12
    True
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p!r}")
    lo, hi = m.span(1.0)
    sd = math.sqrt(max(v for _, _, v in m.components()))
    g = lambda x: m.cdf(x) - p  # noqa: E731
    if g(lo) > 0:
        lo = _bracket_out(g, lo, -sd, -1.0)
    if g(hi) < 0:
        hi = _bracket_out(g, hi, sd, 1.0)
    return find_root(g, lo, hi, tol=1e-15)


def _dlogpdf(m: TwoComponentNormalMixture, x):
    """Derivative of the log density, computed stably in log space."""
    x = np.asarray(x, dtype=float)
    comps = m.components()
    logs, slopes = [], []
    for w, mu, v in comps:
        logs.append(math.log(w) - 0.5 * math.log(v) - 0.5 * (x - mu) ** 2 / v)
        slopes.append((mu - x) / v)
    logs = np.stack(np.broadcast_arrays(*logs))
    resp = np.exp(logs - logsumexp(logs, axis=0))
    out = np.sum(resp * np.stack(np.broadcast_arrays(*slopes)), axis=0)
    return out[()] if out.ndim == 0 else out


def critical_points(m: TwoComponentNormalMixture):
    """Sorted ``(x, is_mode)`` pairs for the stationary points of the density.

    All stationary points lie between the component means. They are
    bracketed on a grid refined around each component and then polished by
    root finding on the derivative of the log density.
    """
    comps = m.components()
    means = sorted({mu for _, mu, _ in comps})
    sd_min = math.sqrt(min(v for _, _, v in comps))
    if len(means) == 1 or means[1] - means[0] <= 1e-12 * sd_min:
        # (numerically) shared mean: unimodal at the heavier-weighted mean
        return [(max(comps)[1], True)]
    a, b = means
    pieces = [np.linspace(a, b, _GRID)]
    for _, mu, v in comps:
        sd = math.sqrt(v)
        pieces.append(mu + sd * np.linspace(-8.0, 8.0, 513))
    grid = np.unique(np.concatenate(pieces))
    grid = grid[(grid >= a) & (grid <= b)]
    d = _dlogpdf(m, grid)
    crit = []
    for i in range(len(grid) - 1):
        if d[i] == 0.0:
            crit.append(float(grid[i]))
        elif d[i] * d[i + 1] < 0:
            crit.append(find_root(lambda x: _dlogpdf(m, x), grid[i], grid[i + 1], tol=1e-15))
    if d[-1] == 0.0:
        crit.append(float(grid[-1]))
    crit = sorted(set(crit))
    if not crit:
        crit = [float(grid[int(np.argmax(m.logpdf(grid)))])]
    # classify by the sign of the slope on either side
    out = []
    bounds = [a - 1.0] + crit + [b + 1.0]
    for k, x in enumerate(crit):
        left = _dlogpdf(m, 0.5 * (bounds[k] + x))
        right = _dlogpdf(m, 0.5 * (x + bounds[k + 2]))
        out.append((x, bool(left > 0 and right < 0)))
    return out


def mode_count(m: TwoComponentNormalMixture) -> int:
    """Number of strict local maxima of the mixture density (1 or 2)."""
    return sum(1 for _, is_mode in critical_points(m) if is_mode)


@dataclass(frozen=True)
class HpdiSet:
    """Highest posterior density region: sorted disjoint intervals."""

    level: float
    intervals: tuple
    attained_mass: float
    density_cut: float

    @property
    def lower(self) -> float:
        return self.intervals[0][0]

    @property
    def upper(self) -> float:
        return self.intervals[-1][1]

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def hull(self) -> "HpdiSet":
        """Single interval spanning the whole region (loses the HPD property)."""
        return HpdiSet(self.level, ((self.lower, self.upper),), self.attained_mass, self.density_cut)

    def as_row(self):
        """``[level, lo_1, hi_1, (lo_2, hi_2)]``."""
        row = [self.level]
        for lo, hi in self.intervals:
            row.extend([lo, hi])
        return row

    def to_dict(self):
        return {
            "level": self.level,
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "attained_mass": self.attained_mass,
            "density_cut": self.density_cut,
        }


def _scalar_logpdf(m):
    """Pure-Python log density for scalar arguments (root finding hot path)."""
    terms = [(math.log(w) - 0.5 * math.log(2.0 * math.pi * v), mu, v)
             for w, mu, v in m.components()]

    def f(x):
        logs = [c - 0.5 * (x - mu) ** 2 / v for c, mu, v in terms]
        top = max(logs)
        return top + math.log(math.fsum(math.exp(t - top) for t in logs))

    return f


def _level_set(m, log_cut, crit, sd, logpdf=None):
    """Intervals where ``log f >= log_cut`` given the critical points."""
    logpdf = logpdf or _scalar_logpdf(m)
    g = lambda x: logpdf(x) - log_cut  # noqa: E731
    xs = [x for x, _ in crit]
    gs = [g(x) for x in xs]
    crossings = []
    if gs[0] > 0:
        lo = _bracket_out(g, xs[0], -sd, -1.0)
        crossings.append(find_root(g, lo, xs[0], tol=1e-15))
    for x0, x1, g0, g1 in zip(xs[:-1], xs[1:], gs[:-1], gs[1:]):
        if g0 * g1 < 0:
            crossings.append(find_root(g, x0, x1, tol=1e-15))
    if gs[-1] > 0:
        hi = _bracket_out(g, xs[-1], sd, -1.0)
        crossings.append(find_root(g, xs[-1], hi, tol=1e-15))
    return [(crossings[i], crossings[i + 1]) for i in range(0, len(crossings) - 1, 2)]


def _mass(m, intervals):
    total = 0.0
    for lo, hi in intervals:
        # difference of upper tails is more accurate to the right of the bulk
        total += float(m.sf(lo) - m.sf(hi)) if lo > m.mean() else float(m.cdf(hi) - m.cdf(lo))
    return total


def hpdi(m: TwoComponentNormalMixture, level: float = 0.95) -> HpdiSet:
    """Highest posterior density region of a two-component normal mixture.

    Parameters
    ----------
    m : TwoComponentNormalMixture
    level : float
        Required posterior mass, in (0, 1).

    Returns
    -------
    HpdiSet
        One interval, or two disjoint ones when the density is bimodal and
        the cut falls below the antimode.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    crit = critical_points(m)
    sd = math.sqrt(max(v for _, _, v in m.components()))
    logpdf = _scalar_logpdf(m)
    log_max = max(logpdf(x) for x, is_mode in crit if is_mode)

    def excess(log_cut):
        return _mass(m, _level_set(m, log_cut, crit, sd, logpdf)) - level

    # at log_max - 60 the region covers all but ~1e-26 of the mass
    log_cut = find_root(excess, log_max - 60.0, log_max, tol=1e-14)
    intervals = _level_set(m, log_cut, crit, sd, logpdf)
    if not intervals:
        raise NumericError("empty HPD region")
    return HpdiSet(level, tuple(intervals), _mass(m, intervals), math.exp(log_cut))


@dataclass(frozen=True)
class TippingPoint:
    """Smallest weight at which the HPD region excludes the threshold.

    ``crossings`` lists every weight at which the exclusion indicator
    changes along the scanned grid; ``monotone`` is False when there is
    more than one.
    """

    omega_star: Optional[float]
    regime: str
    crossings: tuple = ()
    monotone: bool = True


@lru_cache(maxsize=8192)
def _posterior_summary(original, rep, vague, omega, level):
    # shared by tipping_point and hpdi_trace, which scan the same weight grid
    post = update_fixed(build_prior(original, vague, omega), rep)
    return post, hpdi(post, level)


def _excludes(original, rep, vague, omega, level, threshold):
    return not _posterior_summary(original, rep, vague, float(omega), level)[1].contains(threshold)


def tipping_point(
    original: StudySummary,
    rep: StudySummary,
    vague: VagueComponent = UNIT_INFORMATION,
    level: float = 0.95,
    threshold: float = 0.0,
    step: float = 0.01,
    tol: float = 1e-4,
) -> TippingPoint:
    """Reverse-Bayes sensitivity of the HPD region to the mixture weight.

    The exclusion of ``threshold`` is scanned on a weight grid with spacing
    ``step``; each change of the indicator is refined by bisection to
    ``tol``. Pass a pooled summary as ``rep`` to analyse several
    replications together.
    """
    n = int(round(1.0 / step)) + 1
    grid = np.linspace(0.0, 1.0, n)
    flags = [_excludes(original, rep, vague, w, level, threshold) for w in grid]
    crossings = []
    for i in range(n - 1):
        if flags[i] != flags[i + 1]:
            lo, hi = grid[i], grid[i + 1]
            lo_flag = flags[i]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _excludes(original, rep, vague, mid, level, threshold) == lo_flag:
                    lo = mid
                else:
                    hi = mid
            # report the end of the bracket where the new state holds
            crossings.append(float(hi))
    monotone = len(crossings) <= 1
    if all(flags):
        return TippingPoint(0.0, ALWAYS_EXCLUDES, (), True)
    if not any(flags):
        return TippingPoint(None, NEVER_EXCLUDES, tuple(crossings), monotone)
    if flags[0]:
        return TippingPoint(0.0, CROSSING, tuple(crossings), monotone)
    return TippingPoint(crossings[0], CROSSING, tuple(crossings), monotone)


@dataclass(frozen=True)
class TraceRow:
    omega: float
    posterior: TwoComponentNormalMixture
    median: float
    hpdi: HpdiSet


def hpdi_trace(original, rep, vague=UNIT_INFORMATION, level=0.95, omegas=None):
    """Posterior median and HPD region across a grid of fixed weights."""
    if omegas is None:
        omegas = np.linspace(0.0, 1.0, 101)
    rows = []
    for w in omegas:
        post, region = _posterior_summary(original, rep, vague, float(w), level)
        rows.append(TraceRow(float(w), post, posterior_quantile(post, 0.5), region))
    return rows


@dataclass(frozen=True)
class DensityGrid:
    theta: np.ndarray
    density: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def points(self):
        return list(zip(self.theta.tolist(), self.density.tolist()))

    def trapezoid(self) -> float:
        return float(trapezoid(self.density, self.theta))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "density"])
        for t, d in self.points:
            w.writerow([repr(t), repr(d)])
        return buf.getvalue()

    def to_dict(self):
        return {
            "metadata": dict(self.metadata),
            "theta": self.theta.tolist(),
            "density": self.density.tolist(),
        }


def density_grid(m: TwoComponentNormalMixture, lo=None, hi=None, n=201, metadata=None) -> DensityGrid:
    """Density on ``n`` equally spaced points; range defaults to ``m.span()``."""
    if n < 2:
        raise ValueError("grid needs at least two points")
    if lo is None or hi is None:
        a, b = m.span(SPAN_SDS)
        lo = a if lo is None else lo
        hi = b if hi is None else hi
    if not lo < hi:
        raise ValueError("grid bounds must satisfy lo < hi")
    theta = np.linspace(lo, hi, n)
    meta = {
        "weight_informative": m.weight_informative,
        "mean_informative": m.mean_informative,
        "var_informative": m.var_informative,
        "mean_vague": m.mean_vague,
        "var_vague": m.var_vague,
    }
    meta.update(metadata or {})
    return DensityGrid(theta, m.pdf(theta), meta)
