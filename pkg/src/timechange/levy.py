"""Base Lévy processes on the real line.

A :class:`LevyModel` is a characteristic triplet ``(drift, variance, jumps)``
with the truncation convention ``1{|y| <= 1}`` everywhere::

    Psi(u) = i u c - u^2 Q / 2 + int (e^{iuy} - 1 - iuy 1{|y|<=1}) nu(dy)

Jump measures are finite: either zero or ``rate * F`` for a probability law
``F``.  With normal (or point) jump laws the law of ``X_r`` is a Poisson
mixture of Gaussians, which gives exact densities, truncated moments and
semigroup actions; any other jump law falls back to seeded Monte Carlo.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats
from scipy.special import ndtr

from . import _quad
from .errors import DomainError, UnsupportedModelError
from .streams import as_generator

_SQRT2PI = np.sqrt(2.0 * np.pi)


def _normal_window(mean, var, lo=-1.0, hi=1.0):
    """``P(lo<=W<=hi)``, ``E[W 1{lo<=W<=hi}]``, ``E[W^2 1{lo<=W<=hi}]`` for
    ``W ~ N(mean, var)``; ``var == 0`` is a point mass."""
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    sd = np.sqrt(var)
    point = sd == 0.0
    safe = np.where(point, 1.0, sd)
    alpha = (lo - mean) / safe
    beta = (hi - mean) / safe
    phi_a = np.exp(-0.5 * alpha**2) / _SQRT2PI
    phi_b = np.exp(-0.5 * beta**2) / _SQRT2PI
    p = ndtr(beta) - ndtr(alpha)
    m1 = mean * p - safe * (phi_b - phi_a)
    m2 = (mean**2 + var) * p - safe * ((hi + mean) * phi_b - (lo + mean) * phi_a)
    inside = ((mean >= lo) & (mean <= hi)).astype(float)
    p = np.where(point, inside, p)
    m1 = np.where(point, mean * inside, m1)
    m2 = np.where(point, mean**2 * inside, m2)
    return p, m1, m2


@dataclass(frozen=True)
class NormalJumps:
    """Gaussian jump sizes ``N(mean, std^2)``; ``std == 0`` gives jumps of fixed size."""

    mean: float = 0.0
    std: float = 1.0

    def __post_init__(self):
        if not self.std >= 0.0:
            raise ValueError("jump std must be nonnegative")

    @property
    def atomic(self):
        return self.std == 0.0

    def pdf(self, y):
        if self.atomic:
            return None
        return stats.norm.pdf(y, self.mean, self.std)

    def sample(self, rng, size):
        return rng.normal(self.mean, self.std, size)

    def sample_sums(self, rng, counts):
        """Sums of ``counts[i]`` i.i.d. jumps, exactly (sums of normals are normal)."""
        counts = np.asarray(counts)
        return counts * self.mean + np.sqrt(counts) * self.std * rng.standard_normal(counts.shape)

    def mgf(self, theta):
        return np.exp(self.mean * theta + 0.5 * self.std**2 * theta**2)

    def cf(self, u):
        return np.exp(1j * u * self.mean - 0.5 * self.std**2 * u**2)

    def expect(self, h, complex_func=False):
        """``E[h(Y)]`` by quadrature in the standardised variable."""
        if self.atomic:
            return h(self.mean)
        mu, sd = self.mean, self.std
        pts = [0.0, (-1.0 - mu) / sd, (1.0 - mu) / sd]
        return _quad.integrate(lambda z: h(mu + sd * z) * np.exp(-0.5 * z * z) / _SQRT2PI,
                               -np.inf, np.inf, points=pts, complex_func=complex_func,
                               what="jump-law expectation")

    def window(self):
        """``(P(|Y|<=1), E[Y 1{|Y|<=1}], E[Y^2 1{|Y|<=1}])``."""
        return tuple(float(v) for v in _normal_window(self.mean, self.std**2))


@dataclass(frozen=True)
class DensityJumps:
    """Jump law given by a density and a sampler.

    Transition quantities of a model using it are computed by seeded Monte Carlo.
    """

    density: Callable
    sampler: Callable
    mgf_fn: Optional[Callable] = None
    breakpoints: tuple = ()

    def __post_init__(self):
        mass = self.expect(lambda y: 1.0)
        if abs(mass - 1.0) > 1e-8:
            raise ValueError(f"jump density integrates to {mass!r}, not 1")

    atomic = False

    def pdf(self, y):
        return self.density(y)

    def sample(self, rng, size):
        return np.asarray(self.sampler(rng, size), dtype=float)

    def sample_sums(self, rng, counts):
        counts = np.asarray(counts)
        flat = counts.ravel()
        total = int(flat.sum())
        out = np.zeros(flat.shape)
        if total:
            owner = np.repeat(np.arange(flat.size), flat)
            out = np.bincount(owner, weights=self.sample(rng, total), minlength=flat.size)
        return out.reshape(counts.shape)

    def mgf(self, theta):
        if self.mgf_fn is None:
            raise UnsupportedModelError("jump law has no closed-form exponential moment")
        return self.mgf_fn(theta)

    def expect(self, h, complex_func=False):
        pts = (-1.0, 0.0, 1.0) + tuple(self.breakpoints)
        return _quad.integrate(lambda y: h(y) * self.density(y), -np.inf, np.inf, points=pts,
                               complex_func=complex_func, what="jump-law expectation")

    def window(self):
        vals = []
        for k in range(3):
            vals.append(_quad.integrate(lambda y, k=k: y**k * self.density(y), -1.0, 1.0,
                                        points=(0.0,) + tuple(self.breakpoints)))
        return tuple(vals)


@dataclass(frozen=True)
class JumpMeasure:
    """Finite jump measure ``rate * F``; ``rate == 0`` (or no law) is the zero measure."""

    rate: float = 0.0
    law: object = None

    def __post_init__(self):
        if self.rate < 0.0:
            raise ValueError("jump rate must be nonnegative")
        if self.rate > 0.0 and self.law is None:
            raise ValueError("a positive jump rate needs a jump-size law")

    @classmethod
    def zero(cls):
        return cls()

    @property
    def is_zero(self):
        return self.rate == 0.0 or self.law is None

    def integrate(self, h, complex_func=False):
        """``int h(y) nu(dy)``."""
        if self.is_zero:
            return 0j if complex_func else 0.0
        return self.rate * self.law.expect(h, complex_func=complex_func)

    @property
    def compensator(self):
        """``int y 1{|y|<=1} nu(dy)``."""
        return 0.0 if self.is_zero else self.rate * self.law.window()[1]

    def mass_outside(self):
        """``nu({|y| > 1})``."""
        return 0.0 if self.is_zero else self.rate * (1.0 - self.law.window()[0])

    def levy_integral(self):
        """``int (1 ^ y^2) nu(dy)``; finite for every finite measure."""
        if self.is_zero:
            return 0.0
        p_in, _, m2 = self.law.window()
        return self.rate * (m2 + 1.0 - p_in)

    def mgf(self, theta):
        """``int e^{theta y} nu(dy)``."""
        return 0.0 if self.is_zero else self.rate * self.law.mgf(theta)


@dataclass(frozen=True)
class LevyModel:
    """Lévy process on the line through its characteristic triplet.

    :param drift: ``c`` in the Lévy-Khintchine exponent (truncation ``1{|y|<=1}``)
    :param variance: Gaussian coefficient ``Q >= 0``
    :param jumps: finite jump measure
    :param exponent: optional closed form of ``Psi(u)``; checked against the
        quadrature evaluation at construction
    :param mc_paths: Monte Carlo sample size used when no exact transition law is
        available (``0`` disables the fallback)
    :param mc_seed: seed of that fallback
    :param dim: state dimension; only ``1`` is implemented
    """

    drift: float = 0.0
    variance: float = 0.0
    jumps: JumpMeasure = field(default_factory=JumpMeasure)
    exponent: Optional[Callable] = None
    mc_paths: int = 0
    mc_seed: int = 0
    dim: int = 1
    name: str = ""

    def __post_init__(self):
        if self.dim != 1:
            raise NotImplementedError("only one-dimensional models are implemented")
        if not self.variance >= 0.0:
            raise ValueError("Gaussian variance must be nonnegative")
        if self.exponent is not None:
            u = np.arange(-5.0, 6.0)
            closed = np.asarray(self.exponent(u), dtype=complex)
            direct = self.char_exponent(u, closed_form=False)
            bad = np.max(np.abs(closed - direct))
            if bad > 1e-10:
                raise ValueError(f"closed-form exponent disagrees with Lévy-Khintchine by {bad:.2e}")

    # ------------------------------------------------------------------
    # exponent and exponential moments

    def char_exponent(self, u, closed_form=True):
        """``Psi(u)`` with ``E[exp(iuX_s)] = exp(s Psi(u))``; vectorised over ``u``."""
        u_arr = np.asarray(u, dtype=float)
        if closed_form and self.exponent is not None:
            out = np.asarray(self.exponent(u_arr), dtype=complex)
        else:
            out = 1j * u_arr * self.drift - 0.5 * u_arr**2 * self.variance + 0j
            if not self.jumps.is_zero:
                extra = np.array([
                    self.jumps.integrate(
                        lambda y, v=v: np.exp(1j * v * y) - 1.0 - 1j * v * y * (abs(y) <= 1.0),
                        complex_func=True)
                    for v in u_arr.ravel()
                ]).reshape(u_arr.shape)
                out = out + extra
        return out if out.ndim else complex(out)

    def log_mgf(self, lam):
        """``kappa(lam) = log E[exp(lam X_1)]`` (needs the jump law's exponential moment)."""
        lam = np.asarray(lam, dtype=float)
        val = lam * self.drift + 0.5 * lam**2 * self.variance
        if not self.jumps.is_zero:
            val = val + self.jumps.mgf(lam) - self.jumps.rate - lam * self.jumps.compensator
        return val if val.ndim else float(val)

    def exp_moment(self, lam, r):
        """``E[exp(lam X_r)]``."""
        return np.exp(np.asarray(r) * self.log_mgf(lam))

    # ------------------------------------------------------------------
    # transition law

    @property
    def effective_drift(self):
        """Deterministic drift rate once small-jump compensation is absorbed."""
        return self.drift - self.jumps.compensator

    @property
    def gaussian_mixture(self):
        """Whether ``X_r`` is an exact Poisson mixture of Gaussians."""
        return self.jumps.is_zero or isinstance(self.jumps.law, NormalJumps)

    @property
    def has_density(self):
        return self.variance > 0.0 and self.gaussian_mixture

    def mixture(self, r):
        """Weights, means and variances of the Gaussian mixture law of ``X_r``."""
        if not self.gaussian_mixture:
            raise UnsupportedModelError("transition law is not a Gaussian mixture")
        b = self.effective_drift
        if self.jumps.is_zero or r == 0.0:
            return np.ones(1), np.array([b * r]), np.array([self.variance * r])
        lam = self.jumps.rate * r
        k = np.arange(int(lam + 12.0 * np.sqrt(lam)) + 30)
        w = stats.poisson.pmf(k, lam)
        keep = w > 1e-20 * w.max()
        k, w = k[keep], w[keep]
        law = self.jumps.law
        return w, b * r + k * law.mean, self.variance * r + k * law.std**2

    def transition_density(self, r, x):
        """``p_r(x)``, the density of ``X_r``; needs ``variance > 0``."""
        if not self.has_density:
            raise UnsupportedModelError("model has no transition density")
        if r <= 0.0:
            raise DomainError("transition density needs r > 0")
        w, m, v = self.mixture(r)
        x = np.asarray(x, dtype=float)[..., None]
        dens = w * np.exp(-0.5 * (x - m) ** 2 / v) / np.sqrt(2.0 * np.pi * v)
        return dens.sum(axis=-1)

    def atom_at_zero(self, r):
        """``P(X_r = 0)``."""
        if r == 0.0:
            return 1.0
        w, m, v = self.mixture(r)
        return float(np.sum(w[(v == 0.0) & (m == 0.0)]))

    def sample_increment(self, r, rng, size=None):
        """Draw ``X_r``; ``r`` may be an array of durations (one draw each).

        A zero duration returns exactly 0.
        """
        rng = as_generator(rng)
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0):
            raise DomainError("durations must be nonnegative")
        shape = r.shape if size is None else np.broadcast_shapes(r.shape, np.atleast_1d(size).tolist())
        r = np.broadcast_to(r, shape)
        out = self.effective_drift * r
        if self.variance > 0.0:
            out = out + np.sqrt(self.variance * r) * rng.standard_normal(shape)
        if not self.jumps.is_zero:
            counts = rng.poisson(self.jumps.rate * r)
            out = out + self.jumps.law.sample_sums(rng, counts)
        out = np.where(r == 0.0, 0.0, out)
        return out if out.ndim else float(out)

    def _mc_sample(self, r):
        if self.mc_paths <= 0:
            raise UnsupportedModelError(
                "no exact transition law and the Monte Carlo fallback is disabled")
        return self.sample_increment(np.full(self.mc_paths, float(r)),
                                     np.random.default_rng(self.mc_seed))

    def semigroup_apply(self, f, r, x, return_stderr=False):
        """``P_r f(x) = E[f(x + X_r)]`` for bounded ``f``.

        Exact mixture quadrature when available, otherwise the seeded Monte Carlo
        fallback; with ``return_stderr`` a ``(value, stderr)`` pair is returned.
        """
        if r < 0.0:
            raise DomainError("r must be nonnegative")
        if r == 0.0:
            val, se = f(x), 0.0
        elif self.gaussian_mixture:
            w, m, v = self.mixture(r)
            val = 0.0
            for wk, mk, vk in zip(w, m, v):
                if vk == 0.0:
                    val += wk * f(x + mk)
                    continue
                sd = np.sqrt(vk)
                centre = -(x + mk) / sd
                val += wk * _quad.integrate(
                    lambda z: f(x + mk + sd * z) * np.exp(-0.5 * z * z) / _SQRT2PI,
                    -14.0, 14.0, points=[0.0, centre], what="semigroup action")
            se = 0.0
        else:
            vals = f(x + self._mc_sample(r))
            val, se = float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(vals.size))
        return (val, se) if return_stderr else val

    def truncated_moments(self, r):
        """``(P(|X_r|>1), E[X_r 1{|X_r|<=1}], E[X_r^2 1{|X_r|<=1}])``."""
        if r < 0.0:
            raise DomainError("r must be nonnegative")
        if r == 0.0:
            return 0.0, 0.0, 0.0
        if self.gaussian_mixture:
            w, m, v = self.mixture(r)
            p, m1, m2 = _normal_window(m, v)
            return float(1.0 - w @ p), float(w @ m1), float(w @ m2)
        xs = self._mc_sample(r)
        inside = np.abs(xs) <= 1.0
        return float(np.mean(~inside)), float(np.mean(xs * inside)), float(np.mean(xs**2 * inside))

    def truncated_mean(self, r):
        """``E[X_r 1{|X_r| <= 1}]``."""
        return self.truncated_moments(r)[1]

    def kinks(self):
        """Durations at which truncated moments are not smooth (deterministic parts
        of the law crossing ``|x| = 1``); used as quadrature breakpoints."""
        if self.variance > 0.0 or not self.gaussian_mixture:
            return []
        b = self.effective_drift
        if b == 0.0:
            return []
        shifts = [0.0]
        if not self.jumps.is_zero and self.jumps.law.atomic:
            shifts = [k * self.jumps.law.mean for k in range(4)]
        out = []
        for s in shifts:
            for edge in (-1.0, 1.0):
                r = (edge - s) / b
                if r > 0.0:
                    out.append(r)
        return sorted(out)

    def sato_bound_check(self, r_grid=None):
        """Ratio test for ``max{P(|X_r|>1), |E[X_r 1]|, E[X_r^2 1]} <= C (r ^ 1)``."""
        if r_grid is None:
            r_grid = np.logspace(-4, 0, 9)
        r_grid = np.sort(np.asarray(r_grid, dtype=float))
        if r_grid.size == 0 or np.any(r_grid <= 0.0):
            raise DomainError("need a nonempty grid of positive durations")
        rows = np.array([self.truncated_moments(r) for r in r_grid])
        worst = np.max(np.abs(rows), axis=1)
        ratio = worst / np.minimum(r_grid, 1.0)
        return SatoReport(r_grid, rows[:, 0], rows[:, 1], rows[:, 2], ratio)


@dataclass(frozen=True)
class SatoReport:
    """Result of :meth:`LevyModel.sato_bound_check`.

    ``passed`` holds when all ratios are finite and the ratio at the smallest
    duration is at most twice the ratio at the grid point nearest ``100 * r_min``
    (no blow-up as ``r -> 0``).
    """

    r: np.ndarray
    tail: np.ndarray
    mean: np.ndarray
    second: np.ndarray
    ratio: np.ndarray

    @property
    def max_ratio(self):
        return float(np.max(self.ratio))

    @property
    def passed(self):
        if not np.all(np.isfinite(self.ratio)):
            return False
        ref = int(np.argmin(np.abs(np.log(self.r) - np.log(100.0 * self.r[0]))))
        return bool(self.ratio[0] <= 2.0 * self.ratio[ref] + 1e-300)


# ----------------------------------------------------------------------
# constructors


def brownian(drift=0.0, variance=1.0):
    """Brownian motion with drift (``variance = 0`` gives a pure drift)."""
    return LevyModel(drift=float(drift), variance=float(variance), name="brownian")


def pure_drift(drift=1.0):
    return LevyModel(drift=float(drift), name="drift")


def zero_process():
    return LevyModel(name="zero")


def merton(drift=0.0, variance=1.0, rate=1.0, jump_mean=0.0, jump_std=0.5):
    """Brownian motion plus compound Poisson jumps with ``N(jump_mean, jump_std^2)`` sizes."""
    law = NormalJumps(float(jump_mean), float(jump_std))
    jumps = JumpMeasure(float(rate), law)
    comp = jumps.compensator

    def exponent(u):
        u = np.asarray(u, dtype=float)
        return (1j * u * drift - 0.5 * u**2 * variance
                + rate * (law.cf(u) - 1.0) - 1j * u * comp)

    return LevyModel(drift=float(drift), variance=float(variance), jumps=jumps,
                     exponent=exponent, name="merton")


def point_jumps(rate=1.0, size=1.0, drift=0.0, variance=0.0):
    """Compound Poisson process with jumps of fixed ``size``."""
    return LevyModel(drift=float(drift), variance=float(variance),
                     jumps=JumpMeasure(float(rate), NormalJumps(float(size), 0.0)),
                     name="point_jumps")
