"""Lévy processes run on an additive clock: ``Y_t = X_{Z_t}``.

For a Lévy base ``X`` with triplet ``(c, Q, nu)`` and a clock ``(beta, g)``,
``Y`` is additive with local triplet::

    Q_s  = beta(s) Q
    c_s  = beta(s) c + int_0^oo E[X_r 1{|X_r|<=1}] g(s, r) dr
    nu_s = beta(s) nu + int_0^oo P(X_r in dx) g(s, r) dr        (on x != 0)

and local exponent ``Psi_s(u) = psi_s(-Psi_X(u))``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _quad
from .errors import DomainError, SingularOriginError, UnsupportedModelError
from .levy import LevyModel
from .streams import BLOCK, block_rngs, blocks
from .subordinator import DEFAULT_EPS, SubordinatorSpec


@dataclass(frozen=True, eq=False)
class TimeChangedModel:
    """Base Lévy process ``base`` subordinated by the independent clock ``clock``."""

    base: LevyModel
    clock: SubordinatorSpec

    def _points(self, s):
        sc = self.clock.r_scale(s)
        return sorted({sc, 1.0, *self.base.kinks()})

    # ------------------------------------------------------------------
    # local characteristics

    def local_triplet(self, s):
        """Drift, Gaussian variance and jump-measure handle of ``Y`` at time ``s``."""
        self.clock._check_time(s)
        beta = float(self.clock.beta(s))
        drift = beta * self.base.drift
        if self.clock.has_jumps:
            drift += _quad.integrate(
                lambda r: self.base.truncated_mean(r) * float(self.clock.density(s, r)),
                0.0, np.inf, points=self._points(s), what="subordinated drift")
        return LocalTriplet(s, drift, beta * self.base.variance, SubordinatedJumps(self, s))

    def subordinated_jump_density(self, s, x):
        return SubordinatedJumps(self, s).density(x)

    def jump_measure_mgf(self, s, lam):
        return SubordinatedJumps(self, s).mgf(lam)

    def local_char_exponent(self, s, u, closed_form=True):
        """``Psi_s(u) = psi_s(-Psi_X(u))``; vectorised over ``u``."""
        return self.clock.laplace_exponent(s, -np.asarray(self.base.char_exponent(u)),
                                           closed_form=closed_form)

    def char_exponent_curve(self, t, u, closed_form=True):
        """``int_0^t Psi_s(u) ds``, so that ``E[exp(iu Y_t)] = exp(curve)``."""
        return self.clock.integrated_laplace_exponent(
            t, -np.asarray(self.base.char_exponent(u)), closed_form=closed_form)

    # ------------------------------------------------------------------
    # exponential moments

    def _check_exp_moment(self, s, kappa):
        if not self.clock.has_jumps or kappa <= 0.0:
            return
        if self.clock.abscissa is not None:
            bound = float(self.clock.abscissa(s))
            if kappa >= bound:
                raise DomainError(
                    f"exponential moment diverges at s={s}: base log-mgf {kappa:.6g} "
                    f">= clock abscissa {bound:.6g}")
            return
        # no abscissa: require e^{kappa r} g(s, r) to decay along a doubling ladder
        sc = self.clock.r_scale(s)
        r = 50.0 * sc * 2.0 ** np.arange(8)
        h = np.exp(kappa * r) * np.asarray(self.clock.density(s, r), dtype=float) * r * r
        if not np.all(np.isfinite(h)) or not h[-1] < h[0]:
            raise DomainError(f"exponential moment appears to diverge at s={s}")

    def _exp_points(self, s, kappa):
        if self.clock.abscissa is not None and kappa > 0.0:
            return sorted({self.clock.r_scale(s), 1.0 / (float(self.clock.abscissa(s)) - kappa)})
        return [self.clock.r_scale(s)]

    def local_log_mgf(self, s, lam):
        """``log E[exp(lam dY)] / dt`` at time ``s``::

            beta(s) kappa_X(lam) + int_0^oo (E[e^{lam X_r}] - 1) g(s, r) dr
        """
        self.clock._check_time(s)
        kappa = float(self.base.log_mgf(lam))
        val = float(self.clock.beta(s)) * kappa
        if self.clock.has_jumps:
            self._check_exp_moment(s, kappa)
            val += _quad.integrate(lambda r: _expm1_weighted(kappa, r, self.clock.density(s, r)),
                                   0.0, np.inf, points=self._exp_points(s, kappa),
                                   what="local log-mgf")
        return val

    def log_mgf_curve(self, t, lam, tol=1e-10):
        """``log E[exp(lam Y_t)]``, by time quadrature of :meth:`local_log_mgf`.

        On ``[0, domain_start]`` the clock's integrated closed form is evaluated
        at the real point ``-kappa_X(lam)``, which is legitimate once the
        exponential moment of the clock is checked to exist there.
        """
        if t < 0.0:
            raise DomainError("t must be nonnegative")
        if t == 0.0:
            return 0.0
        t0 = self.clock.domain_start
        kappa = float(self.base.log_mgf(lam))
        head = 0.0
        if t0 > 0.0:
            if self.clock.integrated_laplace is None:
                raise SingularOriginError(
                    f"clock '{self.clock.name}' has no closed form on [0, {t0}]")
            self._check_exp_moment(min(t, t0), kappa)
            head = float(np.real(self.clock.integrated_laplace(min(t, t0), -kappa)))
            if t <= t0:
                return head
        for s in np.linspace(max(t0, 1e-12), t, 5):
            self._check_exp_moment(s, kappa)
        body = _quad.time_integral(lambda ss: np.array([self.local_log_mgf(s, lam) for s in ss]),
                                   t0, t, tol=tol, what="log-mgf curve")
        return head + float(body)

    # ------------------------------------------------------------------
    # simulation

    def simulate(self, grid, n_paths, seed, eps=DEFAULT_EPS, workers=None):
        """Simulate ``(Z, Y)`` on ``grid`` for ``n_paths`` paths.

        Paths are produced in blocks; block ``k`` draws its clock and base
        increments from the two streams derived from ``(seed, k)``, so the output
        does not depend on ``workers``.
        """
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0.0):
            raise DomainError("grid must be strictly increasing")
        n_paths = int(n_paths)
        z = np.empty((n_paths, grid.size))
        y = np.empty((n_paths, grid.size))
        # build increment laws and their sampling tables up front
        for j in range(1, grid.size):
            law = self.clock.increment_law(grid[j - 1], grid[j] - grid[j - 1])
            if self.clock.has_jumps:
                law._inverse_table(eps)

        def run(item):
            k, sl = item
            clock_rng, base_rng = block_rngs(seed, k)
            n = sl.stop - sl.start
            zb = self.clock.sample_path(grid, clock_rng, n, eps=eps)
            dy = self.base.sample_increment(np.diff(zb, axis=1), base_rng)
            z[sl] = zb
            y[sl, 0] = 0.0
            y[sl, 1:] = np.cumsum(dy, axis=1)

        items = list(blocks(n_paths, BLOCK))
        if workers and workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                list(pool.map(run, items))
        else:
            for item in items:
                run(item)
        return SimulatedPaths(grid, z, y)

    def sample_path(self, grid, seed, eps=DEFAULT_EPS):
        """One path of ``Y`` on ``grid`` (``Y = 0`` at ``grid[0]``)."""
        return self.simulate(grid, 1, seed, eps).y[0]


def _expm1_weighted(kappa, r, g):
    # (e^{kappa r} - 1) g without overflow where g has already underflowed
    g = float(g)
    if g <= 0.0:
        return 0.0
    if kappa * r < 1.0:
        return np.expm1(kappa * r) * g
    return np.exp(kappa * r + np.log(g)) - g


@dataclass(frozen=True)
class SimulatedPaths:
    times: np.ndarray
    z: np.ndarray
    y: np.ndarray

    def increments(self):
        return np.diff(self.y, axis=1)


@dataclass(frozen=True)
class LocalTriplet:
    """Characteristics of ``Y`` at calendar time ``s``."""

    s: float
    drift: float
    variance: float
    jumps: "SubordinatedJumps"

    def char_exponent(self, u, method="fubini"):
        """Lévy-Khintchine exponent assembled from the triplet."""
        u = np.asarray(u, dtype=float)
        out = 1j * u * self.drift - 0.5 * u * u * self.variance
        return out + self.jumps.cf_integral(u, method=method)


class SubordinatedJumps:
    """Lazy handle on the jump measure ``nu_s`` of the time-changed process.

    The atom of ``P(X_r in dx)`` at ``x = 0`` is excluded.
    """

    def __init__(self, model, s):
        self.model = model
        self.s = s
        self._beta = float(model.clock.beta(s))

    def _g(self, r):
        return float(self.model.clock.density(self.s, r))

    def density(self, x):
        """Density of ``nu_s`` at ``x != 0`` (needs a base transition density)."""
        base = self.model.base
        if not base.has_density:
            raise UnsupportedModelError("base process has no transition density")
        x = float(x)
        if x == 0.0:
            raise DomainError("the jump measure lives on x != 0")
        val = 0.0
        if self._beta and not base.jumps.is_zero:
            val += self._beta * base.jumps.rate * float(base.jumps.law.pdf(x))
        clock = self.model.clock
        if clock.has_jumps:
            sc = clock.r_scale(self.s)

            def integrand(tau):
                if abs(tau) > 700.0:
                    return 0.0
                r = np.exp(tau)
                if r <= 0.0:
                    return 0.0
                g = self._g(r)
                if g == 0.0:
                    return 0.0
                return float(base.transition_density(r, x)) * g * r

            pts = [np.log(sc), np.log(x * x / base.variance)]
            val += _quad.integrate(integrand, -np.inf, np.inf, points=pts, epsabs=1e-14,
                                   what="subordinated jump density")
        return val

    def mgf(self, lam):
        """``int e^{lam x} nu_s(dx)``; raises :class:`DomainError` when it diverges."""
        base = self.model.base
        kappa = float(base.log_mgf(lam))
        val = self._beta * base.jumps.mgf(lam) if self._beta else 0.0
        if self.model.clock.has_jumps:
            self.model._check_exp_moment(self.s, kappa)
            atom = base.variance == 0.0

            def integrand(r):
                g = self._g(r)
                if g <= 0.0:
                    return 0.0
                h = np.exp(kappa * r + np.log(g))
                if atom:
                    h -= base.atom_at_zero(r) * g
                return h

            val += _quad.integrate(integrand, 0.0, np.inf,
                                   points=self.model._exp_points(self.s, kappa),
                                   what="jump-measure mgf")
        return val

    def total_mass(self):
        return self.mgf(0.0)

    def mass_outside(self):
        """``nu_s({|x| > 1})``."""
        base = self.model.base
        val = self._beta * base.jumps.mass_outside()
        if self.model.clock.has_jumps:
            val += _quad.integrate(lambda r: base.truncated_moments(r)[0] * self._g(r),
                                   0.0, np.inf, points=self.model._points(self.s),
                                   what="jump mass outside the unit ball")
        return val

    def cf_integral(self, u, method="fubini"):
        """``int (e^{iux} - 1 - iux 1{|x|<=1}) nu_s(dx)``.

        ``method="fubini"`` integrates over clock jump sizes ``r`` first (exact
        Gaussian-mixture inner expectations); ``method="density"`` integrates the
        jump density over ``x`` directly and is much slower.
        """
        u_arr = np.asarray(u, dtype=float)
        out = np.array([self._cf_one(v, method) for v in u_arr.ravel()]).reshape(u_arr.shape)
        return out if out.ndim else complex(out)

    def _cf_one(self, u, method):
        base = self.model.base
        val = 0j
        if self._beta and not base.jumps.is_zero:
            psi = complex(base.char_exponent(u))
            val += self._beta * (psi - 1j * u * base.drift + 0.5 * u * u * base.variance)
        if not self.model.clock.has_jumps or u == 0.0:
            return val
        if method == "fubini":
            psi = complex(base.char_exponent(u))
            return val + _quad.integrate(
                lambda r: (np.expm1(r * psi) - 1j * u * base.truncated_mean(r)) * self._g(r),
                0.0, np.inf, points=self.model._points(self.s), complex_func=True,
                what="jump-measure cf integral")
        if method == "density":
            if self._beta and not base.jumps.is_zero:
                raise UnsupportedModelError("density route covers the clock-jump part only")

            def integrand(x):
                if x == 0.0:
                    return 0j
                k = np.expm1(1j * u * x) - (1j * u * x if abs(x) <= 1.0 else 0.0)
                return k * self.density(x)

            sc = np.sqrt(self.model.clock.r_scale(self.s) * max(base.variance, 1e-300))
            return val + _quad.integrate(integrand, -np.inf, np.inf,
                                         points=[-1.0, -sc, 0.0, sc, 1.0], complex_func=True,
                                         epsabs=1e-9, what="jump-measure cf integral (x)")
        raise ValueError(f"unknown method {method!r}")
