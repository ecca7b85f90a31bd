"""
Numerical kernel shared by the analysis modules.

Log-space normal and Beta densities, the normal CDF, bracketed root finding
and adaptive quadrature. Everything here is deterministic; nothing samples.
"""

import math
import warnings

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _special

__all__ = [
    "NumericError",
    "normal_log_density",
    "normal_density",
    "beta_log_density",
    "normal_cdf",
    "find_root",
    "integrate",
    "DEFAULT_ABS_TOL",
    "SPAN_SDS",
]

_LOG_2PI = math.log(2.0 * math.pi)

DEFAULT_ABS_TOL = 1e-10
# integration / search span for effect-size densities, in component sds
SPAN_SDS = 8.0


class NumericError(ArithmeticError):
    """Raised when an iterative routine fails to meet its tolerance.

    The best estimate reached so far is kept on ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def _check_variance(variance):
    v = np.asarray(variance, dtype=float)
    if np.any(~(v > 0)) or np.any(~np.isfinite(v)):
        raise ValueError(f"variance must be positive and finite, got {variance!r}")


def normal_log_density(x, mean, variance):
    """Natural log of the normal density N(x | mean, variance).

    Works elementwise on arrays. Evaluated directly in log space, so points
    far in the tails give large negative numbers instead of ``-inf``.

    Parameters
    ----------
    x, mean : float or array_like
    variance : float or array_like
        Strictly positive.

    Returns
    -------
    float or ndarray
    """
    _check_variance(variance)
    x = np.asarray(x, dtype=float)
    z2 = (x - mean) ** 2 / variance
    out = -0.5 * (_LOG_2PI + np.log(variance) + z2)
    return out[()] if out.ndim == 0 else out


def normal_density(x, mean, variance):
    return np.exp(normal_log_density(x, mean, variance))


def beta_log_density(w, eta, nu):
    """Log of the Beta(eta, nu) density at ``w`` (elementwise).

    Points outside [0, 1] get ``-inf``. At the endpoints the density may be
    0, finite or infinite depending on the shapes.
    """
    if not (eta > 0 and nu > 0) or not (math.isfinite(eta) and math.isfinite(nu)):
        raise ValueError(f"Beta shapes must be positive, got ({eta!r}, {nu!r})")
    w = np.asarray(w, dtype=float)
    log_norm = _special.betaln(eta, nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            _special.xlogy(eta - 1.0, w)
            + _special.xlog1py(nu - 1.0, -w)
            - log_norm
        )
    out = np.where((w < 0) | (w > 1), -np.inf, out)
    return out[()] if out.ndim == 0 else out


def normal_cdf(x, mean, variance):
    """Normal CDF, elementwise."""
    _check_variance(variance)
    z = (np.asarray(x, dtype=float) - mean) / np.sqrt(variance)
    out = _special.ndtr(z)
    return out[()] if np.ndim(out) == 0 else out


def find_root(f, lo, hi, tol=1e-12, maxiter=200):
    """Locate a sign change of ``f`` inside ``[lo, hi]``.

    Brent's method: inverse quadratic interpolation safeguarded by
    bisection, so convergence is guaranteed once the bracket is valid.

    Raises
    ------
    ValueError
        If ``f(lo)`` and ``f(hi)`` have the same strict sign.
    NumericError
        If ``maxiter`` iterations do not shrink the bracket to ``tol``.
    """
    if not lo <= hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(
            f"interval [{lo}, {hi}] does not bracket a root "
            f"(f(lo)={flo:.3g}, f(hi)={fhi:.3g})"
        )
    try:
        root, info = _optimize.brentq(
            f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
            maxiter=maxiter, full_output=True, disp=False,
        )
    except RuntimeError as exc:  # pragma: no cover - brentq with disp=False
        raise NumericError(str(exc)) from exc
    if not info.converged:
        raise NumericError(f"root finding did not converge: {info.flag}", root)
    return float(root)


def integrate(f, lo, hi, abs_tol=DEFAULT_ABS_TOL, points=None, limit=500):
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    ``points`` are optional interior breakpoints (e.g. component means of a
    narrow density) that help the subdivision find the mass.

    Raises
    ------
    NumericError
        When the error estimate exceeds ``abs_tol`` after ``limit``
        subintervals; ``err.estimate`` holds the value reached.
    """
    if points is not None:
        points = sorted(p for p in points if lo < p < hi) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        value, err = _integrate.quad(
            f, lo, hi, epsabs=abs_tol, epsrel=0.0, limit=limit, points=points,
        )
    if not err <= abs_tol:
        raise NumericError(
            f"quadrature error estimate {err:.3g} exceeds tolerance {abs_tol:.3g}",
            value,
        )
    return float(value)
