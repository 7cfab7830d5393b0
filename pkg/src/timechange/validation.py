"""Seeded statistical checks of distributional identities.

Every report is a deterministic function of its inputs and seed, and serialises
to text and JSON.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .subordinator import DEFAULT_EPS


def _c(z):
    return [float(np.real(z)), float(np.imag(z))]


@dataclass(frozen=True)
class EcfEstimate:
    """Empirical characteristic function ``(1/N) sum exp(iu x_k)`` with per-component
    standard errors."""

    u: np.ndarray
    value: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    n: int

    @property
    def stderr(self):
        return np.hypot(self.stderr_re, self.stderr_im)


def empirical_cf(samples, u):
    """Empirical CF of ``samples`` at ``u`` (scalar or array)."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empirical_cf needs at least one sample")
    u = np.asarray(u, dtype=float)
    z = np.exp(1j * np.multiply.outer(u, x))
    val = z.mean(axis=-1)
    if x.size > 1:
        se_re = z.real.std(axis=-1, ddof=1) / np.sqrt(x.size)
        se_im = z.imag.std(axis=-1, ddof=1) / np.sqrt(x.size)
    else:
        se_re = se_im = np.zeros(u.shape)
    return EcfEstimate(u, val, se_re, se_im, x.size)


class _Report:
    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class CfMatchReport(_Report):
    t: float
    u: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray
    stderr: np.ndarray
    bias: np.ndarray
    n: int

    @property
    def diff(self):
        return np.abs(self.empirical - self.analytic)

    @property
    def bound(self):
        return 3.0 * self.stderr + self.bias

    @property
    def row_passed(self):
        return self.diff <= self.bound

    @property
    def passed(self):
        return bool(np.all(self.row_passed))

    def to_dict(self):
        rows = [{"u": float(u), "empirical": _c(e), "analytic": _c(a), "diff": float(d),
                 "bound": float(b), "pass": bool(p)}
                for u, e, a, d, b, p in zip(self.u, self.empirical, self.analytic, self.diff,
                                            self.bound, self.row_passed)]
        return {"test": "cf_match", "t": self.t, "n": self.n, "rows": rows, "passed": self.passed}

    def to_text(self):
        lines = [f"empirical CF of Y_{self.t:g} (N={self.n})",
                 f"{'u':>6} {'|diff|':>10} {'bound':>10}"]
        for u, d, b, p in zip(self.u, self.diff, self.bound, self.row_passed):
            lines.append(f"{u:6.3g} {d:10.3g} {b:10.3g}  {'ok' if p else 'FAIL'}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def endpoint_samples(tc, t, n_paths, seed, eps=DEFAULT_EPS):
    """``Y_t`` for ``n_paths`` seeded paths started at the origin."""
    return tc.simulate([0.0, float(t)], n_paths, seed, eps).y[:, -1]


def cf_match_report(tc, t, u_grid, n_paths, seed, eps=DEFAULT_EPS, analytic=None,
                    samples=None):
    """Compare the empirical CF of ``Y_t`` with ``exp(Psi_bar_t(u))``.

    The small-jump bias is the observed shift of the estimate when the run is
    repeated with the cutoff halved (same seed).  ``analytic`` overrides the
    model curve with a callable ``u -> log E[exp(iu Y_t)]``.
    """
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    y = endpoint_samples(tc, t, n_paths, seed, eps) if samples is None else samples
    est = empirical_cf(y, u)
    if tc.clock.has_jumps:
        half = empirical_cf(endpoint_samples(tc, t, n_paths, seed, 0.5 * eps), u)
        bias = np.abs(est.value - half.value)
    else:
        bias = np.zeros(u.shape)
    if analytic is None:
        curve = np.array([complex(tc.char_exponent_curve(t, v)) for v in u])
    else:
        curve = np.array([complex(analytic(v)) for v in u])
    return CfMatchReport(float(t), u, est.value, np.exp(curve), est.stderr, bias, est.n)


@dataclass
class IndependenceReport(_Report):
    times: tuple
    u1: float
    u2: float
    statistic: float
    stderr: float
    n: int

    @property
    def passed(self):
        return bool(self.statistic <= 3.0 * self.stderr)

    def to_dict(self):
        return {"test": "independence", "times": list(self.times), "u1": self.u1, "u2": self.u2,
                "statistic": self.statistic, "stderr": self.stderr, "n": self.n,
                "passed": self.passed}

    def to_text(self):
        return (f"increments over {self.times}: |joint - product| = {self.statistic:.3g}, "
                f"3 stderr = {3 * self.stderr:.3g}  {'PASS' if self.passed else 'FAIL'}")


def factorization(a, b, u1, u2):
    """``|phi_AB(u1, u2) - phi_A(u1) phi_B(u2)|`` with a delta-method stderr.

    Samples are centred at the first draw; this rotates every CF by a common
    phase, leaves the modulus unchanged and makes deterministic inputs give 0
    exactly.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    ua = np.exp(1j * u1 * (a - a[0]))
    vb = np.exp(1j * u2 * (b - b[0]))
    w = ua * vb
    um, vm, wm = ua.mean(), vb.mean(), w.mean()
    d = wm - um * vm
    infl = (w - wm) - vm * (ua - um) - um * (vb - vm)
    if n < 2:
        return float(abs(d)), 0.0
    se = np.hypot(infl.real.std(ddof=1), infl.imag.std(ddof=1)) / np.sqrt(n)
    return float(abs(d)), float(se)


def independence_test(tc, times, u1, u2, n_paths, seed, eps=DEFAULT_EPS):
    """Factorisation test for increments of ``Y`` over ``[t0, t1]`` and ``[t1, t2]``."""
    times = tuple(float(v) for v in times)
    if len(times) != 3 or not times[0] < times[1] < times[2]:
        raise DomainError("need three increasing times")
    y = tc.simulate(times, n_paths, seed, eps).y
    stat, se = factorization(y[:, 1] - y[:, 0], y[:, 2] - y[:, 1], u1, u2)
    return IndependenceReport(times, float(u1), float(u2), stat, se, int(n_paths))


@dataclass
class MomentReport(_Report):
    mean: float
    var: float
    sample_mean: float
    sample_var: float
    z_mean: float
    z_var: float
    degenerate: bool
    n: int

    @property
    def passed(self):
        ok = abs(self.z_mean) <= 3.0
        if not self.degenerate:
            ok = ok and abs(self.z_var) <= 3.0
        return bool(ok)

    def to_dict(self):
        return {"test": "moments", "mean": self.mean, "var": self.var,
                "sample_mean": self.sample_mean, "sample_var": self.sample_var,
                "z_mean": self.z_mean, "z_var": None if self.degenerate else self.z_var,
                "degenerate": self.degenerate, "n": self.n, "passed": self.passed}

    def to_text(self):
        zv = "skipped (degenerate)" if self.degenerate else f"{self.z_var:.3g}"
        return (f"moments (N={self.n}): z_mean = {self.z_mean:.3g}, z_var = {zv}  "
                f"{'PASS' if self.passed else 'FAIL'}")


def moment_test(samples, mean, var):
    """z-scores of the sample mean and variance against analytic values.

    The variance z-score uses the fourth central moment.  Constant samples are
    flagged degenerate and only the mean is tested (``z_mean = 0`` when it is
    exact, ``inf`` otherwise).
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ValueError("moment_test needs at least two samples")
    m = float(x.mean())
    c = x - m
    s2 = float(np.mean(c * c)) * n / (n - 1)
    if s2 == 0.0:
        z = 0.0 if m == mean else np.inf
        return MomentReport(float(mean), float(var), m, 0.0, z, 0.0, True, n)
    z_mean = (m - mean) / np.sqrt(s2 / n)
    m4 = float(np.mean(c ** 4))
    z_var = (s2 - var) / np.sqrt(max(m4 - s2 * s2, 1e-300) / n)
    return MomentReport(float(mean), float(var), m, s2, float(z_mean), float(z_var), False, n)


@dataclass
class SuiteReport(_Report):
    reports: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.reports.values())

    def to_dict(self):
        return {"passed": self.passed,
                "reports": {k: r.to_dict() for k, r in self.reports.items()}}

    def to_text(self):
        return "\n\n".join(f"[{k}]\n{r.to_text()}" for k, r in self.reports.items()) + \
            f"\n\nOVERALL {'PASS' if self.passed else 'FAIL'}"


def run_suite(tc, t, u_grid, times, n_paths, seed, eps=DEFAULT_EPS, u_pair=(1.0, 1.0)):
    """CF match at ``t``, increment independence over ``times`` and clock moments at ``t``."""
    out = SuiteReport()
    out.reports["cf_match"] = cf_match_report(tc, t, u_grid, n_paths, seed, eps)
    out.reports["independence"] = independence_test(tc, times, u_pair[0], u_pair[1],
                                                    n_paths, seed + 1, eps)
    z = tc.simulate([0.0, float(t)], n_paths, seed + 2, eps).z[:, -1]
    law = tc.clock.increment_law(0.0, float(t))
    out.reports["clock_moments"] = moment_test(z, law.mean(), law.variance())
    return out
