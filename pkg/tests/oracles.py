"""Independent reference computations for the test-suite.

High-precision mpmath versions of the densities and brute-force quadrature
of the unnormalized posteriors. Nothing here imports from ``repmix``.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special

mp.mp.dps = 30


def npdf(x, mean, var):
    x, mean, var = mp.mpf(x), mp.mpf(mean), mp.mpf(var)
    return mp.exp(-(x - mean) ** 2 / (2 * var)) / mp.sqrt(2 * mp.pi * var)


def beta_pdf(w, a, b):
    w, a, b = mp.mpf(w), mp.mpf(a), mp.mpf(b)
    return w ** (a - 1) * (1 - w) ** (b - 1) / mp.beta(a, b)


def _breaks(*centres, lo=-mp.inf, hi=mp.inf):
    pts = sorted({mp.mpf(c) for c in centres})
    return [lo] + pts + [hi]


def prior_pdf(theta, x_o, s_o, omega, mu, tau2):
    return omega * npdf(theta, x_o, s_o**2) + (1 - omega) * npdf(theta, mu, tau2)


def unnormalized_posterior(theta, x_o, s_o, x_r, s_r, omega, mu, tau2):
    return npdf(x_r, theta, s_r**2) * prior_pdf(theta, x_o, s_o, omega, mu, tau2)


def _posterior_breaks(x_o, s_o, x_r, s_r, mu, tau2):
    # conjugate means of both components, plus data and prior centres
    v1 = 1 / (1 / mp.mpf(s_o) ** 2 + 1 / mp.mpf(s_r) ** 2)
    m1 = (x_o / mp.mpf(s_o) ** 2 + x_r / mp.mpf(s_r) ** 2) * v1
    v2 = 1 / (1 / mp.mpf(tau2) + 1 / mp.mpf(s_r) ** 2)
    m2 = (mu / mp.mpf(tau2) + x_r / mp.mpf(s_r) ** 2) * v2
    sd = max(mp.sqrt(v1), mp.sqrt(v2))
    centres = [m1, m2, x_r, x_o]
    centres += [m1 - 8 * mp.sqrt(v1), m1 + 8 * mp.sqrt(v1), m2 - 8 * mp.sqrt(v2), m2 + 8 * mp.sqrt(v2)]
    return _breaks(*centres), (m1, v1, m2, v2, sd)


def marginal_fixed(x_o, s_o, x_r, s_r, omega, mu, tau2):
    """Quadrature of likelihood times mixture prior over theta."""
    pts, _ = _posterior_breaks(x_o, s_o, x_r, s_r, mu, tau2)
    return mp.quad(lambda t: unnormalized_posterior(t, x_o, s_o, x_r, s_r, omega, mu, tau2), pts)


def informative_posterior_mass(x_o, s_o, x_r, s_r, omega, mu, tau2):
    """Posterior probability of the original-study component, by quadrature."""
    pts, _ = _posterior_breaks(x_o, s_o, x_r, s_r, mu, tau2)
    part = mp.quad(lambda t: npdf(x_r, t, s_r**2) * omega * npdf(t, x_o, s_o**2), pts)
    return part / marginal_fixed(x_o, s_o, x_r, s_r, omega, mu, tau2)


def posterior_cdf(x, x_o, s_o, x_r, s_r, omega, mu, tau2):
    pts, _ = _posterior_breaks(x_o, s_o, x_r, s_r, mu, tau2)
    pts = [p for p in pts if p < x] + [mp.mpf(x)]
    num = mp.quad(lambda t: unnormalized_posterior(t, x_o, s_o, x_r, s_r, omega, mu, tau2), pts)
    return num / marginal_fixed(x_o, s_o, x_r, s_r, omega, mu, tau2)


def posterior_median(x_o, s_o, x_r, s_r, omega, mu, tau2, start):
    return mp.findroot(lambda x: posterior_cdf(x, x_o, s_o, x_r, s_r, omega, mu, tau2) - 0.5, start)


def marginal_random(x_o, s_o, x_r, s_r, eta, nu, mu, tau2):
    """Two-dimensional quadrature over (theta, w) of likelihood x joint prior."""
    pts, _ = _posterior_breaks(x_o, s_o, x_r, s_r, mu, tau2)

    def inner(t):
        lik = npdf(x_r, t, s_r**2)
        a, b = npdf(t, x_o, s_o**2), npdf(t, mu, tau2)
        return lik * mp.quad(lambda w: beta_pdf(w, eta, nu) * (w * a + (1 - w) * b), [0, 1])

    return mp.quad(inner, pts)


def density_ratio(x1, m1, v1, x2, m2, v2):
    return npdf(x1, m1, v1) / npdf(x2, m2, v2)


# ---------------------------------------------------------------------------
# double-precision brute force, fast enough for randomized sweeps
# ---------------------------------------------------------------------------

def fnpdf(x, mean, var):
    return np.exp(-((x - mean) ** 2) / (2.0 * var)) / np.sqrt(2.0 * math.pi * var)


def _fbreaks(x_o, s_o, x_r, s_r, mu, tau2):
    v1 = 1.0 / (1.0 / s_o**2 + 1.0 / s_r**2)
    m1 = (x_o / s_o**2 + x_r / s_r**2) * v1
    v2 = 1.0 / (1.0 / tau2 + 1.0 / s_r**2)
    m2 = (mu / tau2 + x_r / s_r**2) * v2
    pts = []
    for m, v in ((m1, v1), (m2, v2)):
        sd = math.sqrt(v)
        pts.extend(m + sd * np.array([-12.0, -6.0, -3.0, 0.0, 3.0, 6.0, 12.0]))
    lo, hi = min(pts) - 1.0, max(pts) + 1.0
    return lo, hi, sorted(pts)


def quad_marginal_fixed(x_o, s_o, x_r, s_r, omega, mu, tau2):
    lo, hi, pts = _fbreaks(x_o, s_o, x_r, s_r, mu, tau2)

    def f(t):
        prior = omega * fnpdf(t, x_o, s_o**2) + (1.0 - omega) * fnpdf(t, mu, tau2)
        return fnpdf(x_r, t, s_r**2) * prior

    return _piecewise_quad(f, [lo] + pts + [hi])


def _piecewise_quad(f, edges):
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += _integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return total


def quad_marginal_random(x_o, s_o, x_r, s_r, eta, nu, mu, tau2, n_jacobi=24):
    """Adaptive quadrature in theta, Gauss-Jacobi in w (exact for the Beta weight)."""
    # Gauss-Jacobi on [-1, 1] with weight (1 - x)^(nu - 1) (1 + x)^(eta - 1)
    x, wts = _special.roots_jacobi(n_jacobi, nu - 1.0, eta - 1.0)
    w_nodes = 0.5 * (x + 1.0)
    # map to [0, 1]: w^(eta-1) (1-w)^(nu-1) dw = 2^(1-eta-nu) (1+x)^(eta-1) (1-x)^(nu-1) dx
    w_weights = wts * 2.0 ** (1.0 - eta - nu) / _special.beta(eta, nu)
    lo, hi, pts = _fbreaks(x_o, s_o, x_r, s_r, mu, tau2)

    def f(t):
        a, b = fnpdf(t, x_o, s_o**2), fnpdf(t, mu, tau2)
        inner = np.dot(w_weights, w_nodes * a + (1.0 - w_nodes) * b)
        return fnpdf(x_r, t, s_r**2) * inner

    return _piecewise_quad(f, [lo] + pts + [hi])


def pointwise_posterior(theta, x_o, s_o, x_r, s_r, omega, mu, tau2):
    """Bayes' theorem on a grid: likelihood x prior / quadrature normalizer."""
    z = quad_marginal_fixed(x_o, s_o, x_r, s_r, omega, mu, tau2)
    theta = np.asarray(theta, dtype=float)
    prior = omega * fnpdf(theta, x_o, s_o**2) + (1.0 - omega) * fnpdf(theta, mu, tau2)
    return fnpdf(x_r, theta, s_r**2) * prior / z


def quad_mass(pdf, intervals):
    return sum(_integrate.quad(pdf, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
               for a, b in intervals)
