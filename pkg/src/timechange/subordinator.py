"""Additive subordinators: nondecreasing clocks with independent, nonstationary increments.

A clock is described by a drift rate ``beta(s) >= 0`` and a time-dependent jump
density ``g(s, r) >= 0`` with ``int (1 ^ r) g(s, r) dr < oo``.  Its Laplace
exponent at calendar time ``s`` is::

    psi_s(u) = -u beta(s) + int_0^oo (e^{-ur} - 1) g(s, r) dr,    Re(u) >= 0

and ``E[exp(-u Z_t)] = exp(int_0^t psi_s(u) ds)``.
"""
import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import gammainc

from . import _quad
from .errors import DomainError, QuadratureError, SingularOriginError
from .streams import as_generator

DEFAULT_EPS = 1e-4
_TABLE = 4096


def _as_fn(value):
    if callable(value):
        return value
    const = float(value)
    return lambda s: np.full(np.shape(s), const) if np.ndim(s) else const


@dataclass(frozen=True, eq=False)
class SubordinatorSpec:
    """Drift rate ``beta`` and jump density ``density`` of an additive subordinator.

    ``density`` (``None`` for a pure-drift clock) must broadcast over arrays of
    ``s`` and ``r``.  The optional closed forms short-cut quadrature:

    ``laplace(s, u)``
        ``psi_s(u)``
    ``integrated_laplace(t, u)``
        ``int_0^t psi_s(u) ds``; required for time integrals from the origin
        when ``domain_start > 0``
    ``tail(s, r)``
        ``int_r^oo g(s, x) dx``
    ``small_mean(s, eps)``
        ``int_0^eps r g(s, r) dr``
    ``scale(s)``
        typical jump size, used to split improper integrals
    ``abscissa(s)``
        ``sup{theta : int e^{theta r} g(s, r) dr < oo}``
    ``beta_integral(s0, s1)``
        ``int_{s0}^{s1} beta``
    """

    beta: Callable
    density: Optional[Callable] = None
    domain_start: float = 0.0
    laplace: Optional[Callable] = None
    integrated_laplace: Optional[Callable] = None
    tail: Optional[Callable] = None
    small_mean: Optional[Callable] = None
    scale: Optional[Callable] = None
    abscissa: Optional[Callable] = None
    beta_integral: Optional[Callable] = None
    name: str = ""
    validate: bool = True

    def __post_init__(self):
        if self.domain_start < 0.0:
            raise ValueError("domain_start must be nonnegative")
        if self.validate:
            self.check()

    # ------------------------------------------------------------------
    # validity

    def check_grid(self):
        t0 = self.domain_start
        return t0 + np.array([0.0, 0.25, 1.0, 3.0]) * max(1.0, t0)

    def check(self):
        """Assert ``beta >= 0``, ``g >= 0`` and ``int (1 ^ r) g dr < oo`` on a grid of ``s``."""
        for s in self.check_grid():
            if float(self.beta(s)) < 0.0:
                raise ValueError(f"negative drift rate at s={s}")
            if self.density is None:
                continue
            sc = self.r_scale(s)
            r = sc * np.logspace(-8, 3, 60)
            g = np.asarray(self.density(s, r), dtype=float)
            if np.any(g < 0.0) or not np.all(np.isfinite(g)):
                raise ValueError(f"jump density negative or non-finite at s={s}")
            self.levy_integral(s)

    def levy_integral(self, s):
        """``int (1 ^ r) g(s, r) dr`` by quadrature (raises if it does not converge)."""
        if self.density is None:
            return 0.0
        sc = self.r_scale(s)
        return _quad.integrate(lambda r: min(r, 1.0) * float(self.density(s, r)), 0.0, np.inf,
                               points=sorted({sc, 1.0}), what="int (1^r) g(s,r) dr")

    @property
    def has_jumps(self):
        return self.density is not None

    def r_scale(self, s):
        return float(self.scale(s)) if self.scale is not None else 1.0

    def _check_time(self, s):
        if s < self.domain_start * (1.0 - 1e-12):
            raise DomainError(f"s={s} precedes the clock's domain start {self.domain_start}")

    # ------------------------------------------------------------------
    # Laplace exponent

    def laplace_exponent(self, s, u, closed_form=True):
        """``psi_s(u)`` for ``Re(u) >= 0``; vectorised over ``u``."""
        self._check_time(s)
        u = np.asarray(u, dtype=complex)
        if np.any(u.real < 0.0):
            raise DomainError("the Laplace exponent needs Re(u) >= 0")
        if closed_form and self.laplace is not None:
            out = np.asarray(self.laplace(s, u), dtype=complex)
        else:
            out = np.array([self._laplace_quad(s, v) for v in u.ravel()]).reshape(u.shape)
        return out if out.ndim else complex(out)

    def _laplace_quad(self, s, u):
        val = -u * float(self.beta(s))
        if self.density is not None and u != 0:
            sc = self.r_scale(s)
            val += _quad.integrate(lambda r: np.expm1(-u * r) * float(self.density(s, r)),
                                   0.0, np.inf, points=[sc], complex_func=True,
                                   what="Laplace exponent")
        return val

    def _local(self, s_nodes, u):
        """``psi`` on an array of times: result shape ``s_nodes.shape + u.shape``."""
        u = np.asarray(u, dtype=complex)
        if self.laplace is not None:
            s = s_nodes.reshape(s_nodes.shape + (1,) * u.ndim)
            return np.asarray(self.laplace(s, u[None, ...]), dtype=complex)
        return np.stack([np.asarray(self.laplace_exponent(s, u, closed_form=False))
                         for s in s_nodes])

    def integrated_laplace_exponent(self, t, u, closed_form=True, tol=1e-8):
        """``int_0^t psi_s(u) ds``.

        The closed form is used when available; otherwise ``[domain_start, t]`` is
        integrated numerically and ``[0, domain_start]`` taken from the closed
        form, which must then exist.
        """
        u = np.asarray(u, dtype=complex)
        if np.any(u.real < 0.0):
            raise DomainError("the Laplace exponent needs Re(u) >= 0")
        if t < 0.0:
            raise DomainError("t must be nonnegative")
        if t == 0.0:
            out = np.zeros(u.shape, dtype=complex)
        elif closed_form and self.integrated_laplace is not None:
            out = np.asarray(self.integrated_laplace(t, u), dtype=complex)
        else:
            t0 = self.domain_start
            if t0 > 0.0 and self.integrated_laplace is None:
                raise SingularOriginError(
                    f"clock '{self.name}' starts at {t0} and has no closed form on [0, {t0}]")
            head = np.asarray(self.integrated_laplace(min(t, t0), u)) if t0 > 0.0 else 0.0
            out = head
            if t > t0:
                out = out + _quad.time_integral(lambda s: self._local(s, u), t0, t, tol=tol,
                                                what="integrated Laplace exponent")
            out = np.asarray(out, dtype=complex)
        return out if out.ndim else complex(out)

    # ------------------------------------------------------------------
    # increments

    def drift_integral(self, s0, s1):
        if self.beta_integral is not None:
            return float(self.beta_integral(s0, s1))
        if s1 <= s0:
            return 0.0
        return float(_quad.time_integral(lambda s: np.asarray(self.beta(s), dtype=float), s0, s1,
                                         tol=1e-12, what="drift integral"))

    def increment_law(self, s, duration):
        """Law of ``Z_{s+duration} - Z_s``."""
        if duration <= 0.0:
            raise DomainError("duration must be positive")
        if s < 0.0:
            raise DomainError("s must be nonnegative")
        return self._law(float(s), float(duration))

    @functools.lru_cache(maxsize=256)
    def _law(self, s, duration):
        return IncrementLaw(self, s, duration)

    def sample_path(self, grid, rng, n_paths=None, eps=DEFAULT_EPS):
        """Clock values on ``grid`` with ``Z = 0`` at ``grid[0]``.

        :return: array ``(len(grid),)`` or ``(n_paths, len(grid))``
        """
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0.0):
            raise DomainError("grid must be strictly increasing")
        if grid[0] < 0.0:
            raise DomainError("grid must start at a nonnegative time")
        rng = as_generator(rng)
        size = 1 if n_paths is None else int(n_paths)
        out = np.zeros((size, grid.size))
        for j in range(1, grid.size):
            law = self.increment_law(grid[j - 1], grid[j] - grid[j - 1])
            out[:, j] = out[:, j - 1] + law.sample(rng, size, eps=eps)
        return out[0] if n_paths is None else out


class IncrementLaw:
    """Infinitely divisible law of ``Z_{s+duration} - Z_s``.

    Drift ``b = int beta`` and Lévy density ``G(r) = int g(v, r) dv`` over the
    interval, both by composite Gauss-Legendre in ``v``.  Sampling keeps jumps
    ``>= eps`` exactly (compound Poisson, inverse tail-mass table) and replaces
    smaller jumps by their mean ``int_0^eps r G(r) dr``.
    """

    def __init__(self, spec, start, duration, order=16):
        self.spec = spec
        self.start = start
        self.duration = duration
        self.end = start + duration
        self.drift = spec.drift_integral(start, self.end)
        self._order = order
        self._panels = 4
        self._nodes, self._weights = _quad.gauss_panels(start, self.end, order, self._panels)
        self._tables = {}
        if spec.has_jumps:
            self._refine()

    def __repr__(self):
        return f"IncrementLaw([{self.start}, {self.end}], drift={self.drift})"

    def _refine(self, probe=DEFAULT_EPS, tol=1e-10):
        # double the panels until the jump mass above `probe` is stable
        probe = probe * self.spec.r_scale(self.end)
        prev = self._tail_sum(np.array([probe]))[0]
        for _ in range(7):
            nodes, weights = _quad.gauss_panels(self.start, self.end, self._order, 2 * self._panels)
            old = (self._nodes, self._weights)
            self._nodes, self._weights = nodes, weights
            self._panels *= 2
            cur = self._tail_sum(np.array([probe]))[0]
            if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
                self._nodes, self._weights = old
                self._panels //= 2
                return
            prev = cur

    # -- Lévy density and its functionals --------------------------------

    def density(self, r):
        """``G(r) = int_s^{s+duration} g(v, r) dv``."""
        r = np.asarray(r, dtype=float)
        if not self.spec.has_jumps:
            return np.zeros(r.shape)
        g = self.spec.density(self._nodes[:, None], r.ravel()[None, :])
        return (self._weights @ g).reshape(r.shape)

    def _tail_sum(self, r):
        if self.spec.tail is not None:
            t = self.spec.tail(self._nodes[:, None], r[None, :])
            return self._weights @ t
        return self._numeric_tail()(r)

    def tail_mass(self, r):
        """``int_r^oo G(x) dx``."""
        r = np.asarray(r, dtype=float)
        if not self.spec.has_jumps:
            return np.zeros(r.shape)
        return self._tail_sum(r.ravel()).reshape(r.shape)

    def small_jump_mean(self, eps):
        """``int_0^eps r G(r) dr``."""
        if not self.spec.has_jumps:
            return 0.0
        if self.spec.small_mean is not None:
            return float(self._weights @ self.spec.small_mean(self._nodes, eps))
        return _quad.integrate(lambda r: r * float(self.density(r)), 0.0, eps,
                               what="small-jump mean")

    def _jump_moment(self, k):
        if not self.spec.has_jumps:
            return 0.0
        sc = self.spec.r_scale(self.end)
        pts = [sc * 1e-3, sc, 10.0 * sc]
        return _quad.integrate(lambda r: r**k * float(self.density(r)), 0.0, np.inf, points=pts,
                               what=f"jump moment {k}")

    def mean(self):
        """``E[Z_{s+duration} - Z_s]``."""
        return self.drift + self._jump_moment(1)

    def variance(self):
        return self._jump_moment(2)

    def laplace_exponent(self, u):
        """``log E[exp(-u increment)] = int_s^{s+duration} psi_v(u) dv``."""
        u = np.asarray(u, dtype=complex)
        return _quad.time_integral(lambda v: self.spec._local(v, u), self.start, self.end,
                                   what="increment Laplace exponent")

    def laplace_transform(self, u):
        return np.exp(self.laplace_exponent(u))

    # -- sampling ---------------------------------------------------------

    def _numeric_tail(self):
        # tail mass by cumulative trapezoid of r G(r) on a log grid, used when
        # the clock has no closed-form tail
        if "numeric" not in self._tables:
            sc = self.spec.r_scale(self.end)
            lo = 1e-12 * sc
            hi = sc
            while hi * self.density(hi) > 1e-18 * max(1.0, sc * self.density(sc)) and hi < 1e12 * sc:
                hi *= 2.0
            x = np.linspace(math.log(lo), math.log(hi), 8 * _TABLE)
            rg = np.exp(x) * self.density(np.exp(x))
            seg = 0.5 * (rg[1:] + rg[:-1]) * np.diff(x)
            tail = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))

            def fn(r):
                r = np.asarray(r, dtype=float)
                return np.interp(np.log(np.maximum(r, lo)), x, tail)

            self._tables["numeric"] = fn
        return self._tables["numeric"]

    def _inverse_table(self, eps):
        key = ("inv", eps)
        if key not in self._tables:
            total = float(self.tail_mass(np.array([eps]))[0])
            hi = eps
            if total > 0.0:
                for _ in range(200):
                    if self.tail_mass(np.array([hi]))[0] <= 1e-17 * total:
                        break
                    hi *= 2.0
            r = np.geomspace(eps, max(hi, 2.0 * eps), _TABLE)
            tail = self.tail_mass(r)
            pos = tail > 0.0
            log_t = np.log(tail[pos])
            # enforce monotonicity against rounding in the summed table
            log_t = np.minimum.accumulate(log_t)
            self._tables[key] = (total, np.log(r[pos]), log_t)
        return self._tables[key]

    def sample_jumps(self, rng, n, eps=DEFAULT_EPS):
        """``n`` i.i.d. jump sizes from ``G 1{r>=eps} / int_eps^oo G``."""
        total, log_r, log_t = self._inverse_table(eps)
        if n == 0:
            return np.zeros(0)
        if total <= 0.0:
            raise DomainError("no jump mass above eps")
        target = math.log(total) + np.log1p(-rng.random(n))
        # invert the monotone piecewise-linear (log r, log tail) interpolant
        return np.exp(np.interp(-target, -log_t, log_r))

    def sample(self, rng, size=None, eps=DEFAULT_EPS):
        """Draw increments: ``b + int_0^eps r G(r) dr + sum of jumps >= eps``."""
        if eps <= 0.0:
            raise DomainError("eps must be positive")
        rng = as_generator(rng)
        n = 1 if size is None else int(size)
        out = np.full(n, self.drift)
        if self.spec.has_jumps:
            out += self.small_jump_mean(eps)
            total = self._inverse_table(eps)[0]
            counts = rng.poisson(total, n)
            k = int(counts.sum())
            if k:
                owner = np.repeat(np.arange(n), counts)
                out += np.bincount(owner, weights=self.sample_jumps(rng, k, eps), minlength=n)
        return float(out[0]) if size is None else out


# ----------------------------------------------------------------------
# constructors


def trivial_clock():
    """``Z_t = t``: unit drift, no jumps."""
    return SubordinatorSpec(
        beta=_as_fn(1.0), laplace=lambda s, u: -u + 0.0 * s,
        integrated_laplace=lambda t, u: -u * t,
        beta_integral=lambda s0, s1: s1 - s0, name="trivial")


def drift_clock(beta, beta_integral=None, name="drift"):
    """Deterministic clock ``Z_t = int_0^t beta``."""
    beta = _as_fn(beta)
    return SubordinatorSpec(beta=beta, laplace=lambda s, u: -u * beta(s),
                            beta_integral=beta_integral, name=name)


def exponential_kernel(beta=0.0, a=1.0, b=1.0, domain_start=0.0, integrated_laplace=None,
                       name="exponential_kernel"):
    """Clock with jump density ``g(s, r) = a(s) exp(-r / b(s))`` and drift ``beta(s)``.

    ``beta``, ``a`` and ``b`` are constants or vectorised functions of ``s``.
    """
    beta_fn, a_fn, b_fn = _as_fn(beta), _as_fn(a), _as_fn(b)

    def density(s, r):
        return a_fn(s) * np.exp(-r / b_fn(s))

    def laplace(s, u):
        bs = b_fn(s)
        return -u * beta_fn(s) - a_fn(s) * bs * bs * u / (1.0 + bs * u)

    def tail(s, r):
        bs = b_fn(s)
        return a_fn(s) * bs * np.exp(-r / bs)

    def small_mean(s, eps):
        bs = b_fn(s)
        return a_fn(s) * bs * bs * gammainc(2.0, eps / bs)

    beta_integral = None
    if not callable(beta):
        beta_integral = lambda s0, s1: float(beta) * (s1 - s0)  # noqa: E731

    return SubordinatorSpec(
        beta=beta_fn, density=density, domain_start=domain_start, laplace=laplace,
        integrated_laplace=integrated_laplace, tail=tail, small_mean=small_mean,
        scale=b_fn, abscissa=lambda s: 1.0 / b_fn(s), beta_integral=beta_integral, name=name)
