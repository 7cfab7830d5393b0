"""Quadrature helpers.

Two tools are used throughout the package:

* :func:`integrate` -- adaptive Gauss-Kronrod (QUADPACK through scipy) on a
  possibly infinite interval, split at caller-supplied breakpoints, with a hard
  failure when the error estimate stays above tolerance.
* :func:`gauss_panels` / :func:`time_integral` -- fixed-order composite
  Gauss-Legendre rules for smooth integrands in calendar time, vectorised over
  the integrand's trailing axes and refined by panel doubling.
"""
import math
import warnings

import numpy as np
from scipy import integrate as _si

from .errors import QuadratureError

EPSABS = 1e-10
EPSREL = 1e-8
# QUADPACK's error estimate is conservative; only declare failure when it is
# well above the requested tolerance.
_SLACK = 100.0


def _segments(a, b, points):
    cuts = [a]
    for p in sorted(set(points or ())):
        if a < p < b and math.isfinite(p):
            cuts.append(float(p))
    cuts.append(b)
    return list(zip(cuts[:-1], cuts[1:]))


def integrate(func, a, b, points=None, epsabs=EPSABS, epsrel=EPSREL, limit=400,
              complex_func=False, what="integral"):
    """Integrate ``func`` over ``[a, b]`` (``a``/``b`` may be infinite).

    :param func: scalar function of one real variable (real or complex valued)
    :param points: interior breakpoints; the interval is split there and each
        piece is integrated separately, infinite end pieces included
    :param complex_func: integrate real and imaginary parts separately
    :return: the integral; raises :class:`QuadratureError` when the summed error
        estimate exceeds ``_SLACK * max(epsabs, epsrel * |value|)``
    """
    if a == b:
        return 0j if complex_func else 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    total = 0j if complex_func else 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _si.IntegrationWarning)
        for lo, hi in _segments(a, b, points):
            if complex_func:
                val, e, _ = _si.quad(func, lo, hi, epsabs=epsabs, epsrel=epsrel,
                                     limit=limit, complex_func=True, full_output=1)
                # abserr comes back packed as real + 1j * imag
                e = math.hypot(e.real, e.imag)
            else:
                val, e = _si.quad(func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit)[:2]
            total += val
            err += e
    tol = max(epsabs, epsrel * abs(total))
    if not np.isfinite(total) or err > _SLACK * tol:
        raise QuadratureError(what, total, err, tol)
    return sign * total


_GL_CACHE = {}


def _gl(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def panel_breaks(a, b, panels=4):
    """Panel boundaries on ``[a, b]``, geometrically graded toward ``a`` when the
    interval touches (or spans decades above) the origin."""
    if b <= a:
        raise ValueError("need a < b")
    if a <= 0.0:
        # geometric panels down to 2**-48 * b, plus one panel reaching 0
        base = np.concatenate(([a], b * 0.5 ** np.arange(48, -1, -1, dtype=float)))
    elif b / a > 4.0:
        n = int(math.ceil(math.log2(b / a)))
        base = a * (b / a) ** (np.arange(n + 1) / n)
    else:
        return np.linspace(a, b, panels + 1)
    m = max(1, panels // 4)
    if m == 1:
        return base
    frac = np.arange(m) / m
    fine = (base[:-1, None] + (base[1:] - base[:-1])[:, None] * frac[None, :]).ravel()
    return np.append(fine, base[-1])


def gauss_panels(a, b, order=16, panels=4):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[a, b]``."""
    x, w = _gl(order)
    br = panel_breaks(a, b, panels)
    lo, hi = br[:-1, None], br[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def time_integral(func, a, b, tol=1e-8, order=16, panels=4, max_panels=1024,
                  what="time integral"):
    """Integrate a vectorised smooth ``func(s_nodes)`` over ``[a, b]``.

    ``func`` receives a 1-D array of nodes and returns an array whose first axis
    matches the nodes; trailing axes are integrated independently.  The panel
    count is doubled until two successive estimates agree to
    ``tol * (1 + |I|)`` componentwise.
    """
    if b == a:
        return np.asarray(func(np.array([a])))[0] * 0.0
    prev = None
    p = panels
    while True:
        nodes, weights = gauss_panels(a, b, order, p)
        vals = np.asarray(func(nodes))
        est = np.tensordot(weights, vals, axes=(0, 0))
        if prev is not None:
            diff = np.max(np.abs(est - prev) / (1.0 + np.abs(est)))
            if diff <= tol:
                return est
        if p >= max_panels:
            err = float(np.max(np.abs(est - prev))) if prev is not None else float("inf")
            raise QuadratureError(what, est, err, tol)
        prev = est
        p *= 2
