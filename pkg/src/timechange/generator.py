"""Numerical check of the space-time generator of ``(s, x) -> (s + t, x + Y)``.

For a smooth test function ``f(s, x)`` the generator of the time-changed pair is::

    L'f(s, x) = df/ds(s, x) + beta(s) L f_s(x) + int_0^oo [P_r f_s(x) - f(s, x)] g(s, r) dr

with ``L`` and ``P_r`` the generator and semigroup of the base process.  It is
compared with Monte Carlo difference quotients ``(E f(s+t, x+X_{dZ}) - f(s, x)) / t``
as ``t`` decreases.
"""
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _quad
from .errors import DomainError
from .streams import BLOCK, block_rngs, blocks
from .subordinator import DEFAULT_EPS

_SMALL_R = 1e-6


@dataclass(frozen=True)
class TestFunction:
    """Test function with analytic partial derivatives, vectorised in ``x``.

    ``radius`` certifies decay: ``|f| <= 1e-6`` outside the disc of that radius
    in the ``(s >= 0, x)`` half-plane.
    """

    __test__ = False  # keep pytest from collecting this class

    f: Callable
    df_ds: Callable
    df_dx: Callable
    d2f_dx2: Callable
    radius: float = 14.0
    name: str = ""

    def check_decay(self, n=721, tol=1e-6):
        """Evaluate ``f`` and the listed partials on half-circles beyond ``radius``."""
        theta = np.linspace(-0.5 * np.pi, 0.5 * np.pi, n)
        worst = 0.0
        for rad in (self.radius, 1.5 * self.radius, 3.0 * self.radius):
            s, x = rad * np.cos(theta), rad * np.sin(theta)
            for fn in (self.f, self.df_ds, self.df_dx, self.d2f_dx2):
                vals = np.array([fn(si, xi) for si, xi in zip(s, x)], dtype=float)
                worst = max(worst, float(np.max(np.abs(vals))))
        return worst <= tol, worst


def gaussian_probe():
    """``f(s, x) = exp(-s) exp(-x^2 / 2)``."""
    def f(s, x):
        return np.exp(-s - 0.5 * np.square(x))

    return TestFunction(
        f=f, df_ds=lambda s, x: -f(s, x), df_dx=lambda s, x: -x * f(s, x),
        d2f_dx2=lambda s, x: (np.square(x) - 1.0) * f(s, x), radius=14.0, name="gaussian")


def odd_probe():
    """``f(s, x) = exp(-s) x exp(-x^2)``; its odd part exposes drift errors."""
    def f(s, x):
        return np.exp(-s) * x * np.exp(-np.square(x))

    def dx(s, x):
        return np.exp(-s) * (1.0 - 2.0 * np.square(x)) * np.exp(-np.square(x))

    def dxx(s, x):
        return np.exp(-s) * (4.0 * x ** 3 - 6.0 * x) * np.exp(-np.square(x))

    return TestFunction(f=f, df_ds=lambda s, x: -f(s, x), df_dx=dx, d2f_dx2=dxx,
                        radius=16.0, name="odd")


def static_probe():
    """``f(s, x) = exp(-x^2 / 2)``, constant in ``s`` (bounded but not decaying in ``s``)."""
    def f(s, x):
        return np.exp(-0.5 * np.square(x)) + 0.0 * np.asarray(s)

    return TestFunction(
        f=f, df_ds=lambda s, x: 0.0 * f(s, x), df_dx=lambda s, x: -x * f(s, x),
        d2f_dx2=lambda s, x: (np.square(x) - 1.0) * f(s, x), radius=np.inf, name="static")


def zero_probe():
    def zero(s, x):
        return 0.0 * np.asarray(x, dtype=float)

    return TestFunction(f=zero, df_ds=zero, df_dx=zero, d2f_dx2=zero, radius=0.0, name="zero")


PROBES = {"gaussian": gaussian_probe, "odd": odd_probe, "static": static_probe, "zero": zero_probe}


def apply_base_generator(model, tf, s, x):
    """``L f_s(x) = c f' + Q f''/2 + int [f(x+y) - f(x) - y f'(x) 1{|y|<=1}] nu(dy)``."""
    fx = float(tf.f(s, x))
    d1 = float(tf.df_dx(s, x))
    out = model.drift * d1 + 0.5 * model.variance * float(tf.d2f_dx2(s, x))
    if not model.jumps.is_zero:
        out += model.jumps.integrate(
            lambda y: float(tf.f(s, x + y)) - fx - (y * d1 if abs(y) <= 1.0 else 0.0))
    return out


def _jump_integrand(tc, tf, s, x, lf):
    fx = float(tf.f(s, x))

    def h(r):
        g = float(tc.clock.density(s, r))
        if g == 0.0:
            return 0.0
        if r < _SMALL_R:
            # P_r f - f = r L f + O(r^2)
            return r * lf * g
        return (tc.base.semigroup_apply(lambda y: float(tf.f(s, y)), r, x) - fx) * g

    return h


def apply_timechanged_generator(tc, tf, s, x):
    """``L'f(s, x)`` for the time-changed model ``tc``."""
    tc.clock._check_time(s)
    lf = apply_base_generator(tc.base, tf, s, x)
    out = float(tf.df_ds(s, x)) + float(tc.clock.beta(s)) * lf
    if tc.clock.has_jumps:
        pts = sorted({_SMALL_R, tc.clock.r_scale(s), 1.0})
        out += _quad.integrate(_jump_integrand(tc, tf, s, x, lf), 0.0, np.inf, points=pts,
                               what="generator jump integral")
    return out


def small_r_ratios(tc, tf, s, x, r=(1e-6, 1e-5, 1e-4)):
    """``(P_r f_s(x) - f(s, x)) / r`` at small ``r``; stays bounded (tends to ``L f_s(x)``)."""
    fx = float(tf.f(s, x))
    return np.array([(tc.base.semigroup_apply(lambda y: float(tf.f(s, y)), ri, x) - fx) / ri
                     for ri in r])


def difference_quotient(tc, tf, s, x, t, n_paths, seed, eps=DEFAULT_EPS):
    """Monte Carlo ``(E f(s+t, x + X_{Z_{s+t} - Z_s}) - f(s, x)) / t`` and its stderr.

    Paths are drawn in blocks with the two-stream convention of
    :meth:`TimeChangedModel.simulate`.  When every sample coincides the stderr is
    exactly 0.
    """
    if t <= 0.0:
        raise DomainError("t must be positive")
    n_paths = int(n_paths)
    law = tc.clock.increment_law(s, t)
    fx = float(tf.f(s, x))
    vals = np.empty(n_paths)
    for k, sl in blocks(n_paths, BLOCK):
        clock_rng, base_rng = block_rngs(seed, k)
        dz = law.sample(clock_rng, sl.stop - sl.start, eps=eps)
        dy = tc.base.sample_increment(dz, base_rng)
        vals[sl] = tf.f(s + t, x + dy)
    est = (float(np.mean(vals)) - fx) / t
    if n_paths < 2 or np.ptp(vals) == 0.0:
        return est, 0.0
    return est, float(np.std(vals, ddof=1) / np.sqrt(n_paths) / t)


@dataclass
class ConvergenceReport:
    """Difference quotients against ``L'f`` as ``t`` decreases.

    The signed error is modelled as ``alpha + k t + m t^2`` (``alpha + k t`` with two
    rows).  The check passes when

    * the absolute errors are nonincreasing within ``3 sigma`` of their difference,
    * the extrapolated intercept ``alpha`` is within ``3 sigma_alpha`` of zero
      (plus a higher-order allowance ``|m| t_min^2``), and
    * the final error is at most ``3 stderr + slope * t_final``, where
      ``slope = |k| + |m| t_final`` is the fitted bias slope.
    """

    s: float
    x: float
    generator: float
    t: np.ndarray
    quotient: np.ndarray
    stderr: np.ndarray
    alpha: float = 0.0
    alpha_stderr: float = 0.0
    slope: float = 0.0
    checks: dict = field(default_factory=dict)

    @property
    def error(self):
        return np.abs(self.quotient - self.generator)

    @property
    def passed(self):
        return all(self.checks.values())

    def rows(self):
        return [(float(t), float(q), float(se), float(e))
                for t, q, se, e in zip(self.t, self.quotient, self.stderr, self.error)]

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,quotient,stderr,abs_error\n")
        for row in self.rows():
            buf.write(",".join(format(v, ".17g") for v in row) + "\n")
        return buf.getvalue()

    def to_dict(self):
        return {"s": self.s, "x": self.x, "generator": self.generator, "rows": self.rows(),
                "alpha": self.alpha, "alpha_stderr": self.alpha_stderr, "slope": self.slope,
                "checks": dict(self.checks), "passed": self.passed}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lines = [f"L'f({self.s:g}, {self.x:g}) = {self.generator:.10g}",
                 f"{'t':>10} {'quotient':>14} {'stderr':>10} {'|err|':>10}"]
        for t, q, se, e in self.rows():
            lines.append(f"{t:10.4g} {q:14.8g} {se:10.3g} {e:10.3g}")
        lines.append(f"intercept {self.alpha:.3g} +- {self.alpha_stderr:.3g}, slope {self.slope:.4g}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _assess(rep):
    t, e, se = rep.t, rep.quotient - rep.generator, rep.stderr
    err = np.abs(e)
    tiny = 1e-12 * (1.0 + abs(rep.generator))
    steps = err[1:] <= err[:-1] + 3.0 * np.hypot(se[1:], se[:-1]) + tiny
    rep.checks["nonincreasing"] = bool(np.all(steps))
    if t.size < 2:
        rep.checks["final_within_bound"] = bool(err[-1] <= 3.0 * se[-1] + tiny)
        return rep
    deg = 2 if t.size >= 3 else 1
    design = np.vander(t, deg + 1, increasing=True)
    # rows of the pseudo-inverse give each coefficient as a linear combination of e
    pinv = np.linalg.pinv(design)
    coef = pinv @ e
    rep.alpha = float(coef[0])
    rep.alpha_stderr = float(np.sqrt(np.sum((pinv[0] * se) ** 2)))
    k = float(coef[1])
    m = float(coef[2]) if deg == 2 else 0.0
    tf = float(t[-1])
    rep.slope = abs(k) + abs(m) * tf
    allowance = abs(m) * float(np.min(t)) ** 2
    rep.checks["limit_matches"] = bool(abs(rep.alpha) <= 3.0 * rep.alpha_stderr + allowance + tiny)
    rep.checks["final_within_bound"] = bool(err[-1] <= 3.0 * se[-1] + rep.slope * tf + tiny)
    return rep


def convergence_report(tc, tf, s, x, t_list, n_paths, seed, eps=DEFAULT_EPS, generator=None):
    """Tabulate difference quotients for decreasing ``t_list`` and assess convergence.

    All rows reuse ``seed`` (common random numbers), which keeps the error column
    smooth in ``t``.
    """
    t_arr = np.asarray(t_list, dtype=float)
    if t_arr.size == 0 or np.any(t_arr <= 0.0) or np.any(np.diff(t_arr) >= 0.0):
        raise DomainError("t_list must be positive and strictly decreasing")
    gen = apply_timechanged_generator(tc, tf, s, x) if generator is None else float(generator)
    q = np.empty(t_arr.size)
    se = np.empty(t_arr.size)
    for i, t in enumerate(t_arr):
        q[i], se[i] = difference_quotient(tc, tf, s, x, t, n_paths, seed, eps)
    return _assess(ConvergenceReport(s=s, x=x, generator=gen, t=t_arr, quotient=q, stderr=se))
