"""Symmetric self-decomposable additive model as a time-changed Brownian motion.

The additive process with jump density::

    g_Y(t, y) = gamma / (nu^2 t^(gamma+1)) * exp(-|y| / (nu t^gamma))

and no Gaussian part or drift has the same law as standard Brownian motion run
on the clock with ``beta = 0`` and::

    g(t, r) = a_t exp(-r / b_t),   a_t = gamma / (nu^3 t^(2 gamma + 1)),   b_t = 2 nu^2 t^(2 gamma)

Closed forms used as oracles throughout the package:

* ``psi_t(u) = -a_t b_t^2 u / (1 + b_t u)``
* ``int_0^t psi_s(u) ds = -(1/nu) log(1 + 2 nu^2 t^(2 gamma) u)``
* ``Psi_bar_t(u) = -(1/nu) log(1 + nu^2 u^2 t^(2 gamma))``
* ``int e^{lam y} g_Y(t, y) dy = 2 gamma / (nu t (1 - lam^2 nu^2 t^(2 gamma)))``
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .levy import brownian
from .subordination import TimeChangedModel
from .subordinator import exponential_kernel

DOMAIN_START = 1e-3


@dataclass(frozen=True)
class SelfDecParams:
    gamma: float
    nu: float

    def __post_init__(self):
        if not (self.gamma > 0.0 and self.nu > 0.0):
            raise ValueError("gamma and nu must be positive")

    def a(self, t):
        t = _positive(t)
        return self.gamma / (self.nu ** 3 * t ** (2.0 * self.gamma + 1.0))

    def b(self, t):
        t = _positive(t)
        return 2.0 * self.nu ** 2 * t ** (2.0 * self.gamma)

    def mgf_bound(self, t):
        """``1 / (nu t^gamma)``: exponential moments of the jump measure exist below it."""
        return 1.0 / (self.nu * _positive(t) ** self.gamma)


def _positive(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise DomainError("calendar time must be positive")
    return t if t.ndim else float(t)


def gy_density(p, t, y):
    """Jump density ``g_Y(t, y)`` of the additive process."""
    t = _positive(t)
    y = np.asarray(y, dtype=float)
    scale = p.nu * t ** p.gamma
    out = p.gamma / (p.nu ** 2 * t ** (p.gamma + 1.0)) * np.exp(-np.abs(y) / scale)
    return out if out.ndim else float(out)


def clock_density(p, t, r):
    """Clock jump density ``a_t exp(-r / b_t)``."""
    return p.a(t) * np.exp(-np.asarray(r, dtype=float) / p.b(t))


def jump_mgf_closed(p, t, lam):
    """``int e^{lam y} g_Y(t, y) dy``; finite for ``|lam| < 1 / (nu t^gamma)``."""
    t = _positive(t)
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) >= p.mgf_bound(t)):
        raise DomainError(f"|lambda| must be below 1/(nu t^gamma) = {p.mgf_bound(t):.6g}")
    x = lam * lam * p.nu ** 2 * t ** (2.0 * p.gamma)
    out = 2.0 * p.gamma / (p.nu * t * (1.0 - x))
    return out if out.ndim else float(out)


def char_curve_closed(p, t, u):
    """``log E[exp(iu Y_t)] = -(1/nu) log(1 + nu^2 u^2 t^(2 gamma))``."""
    u = np.asarray(u, dtype=float)
    out = -np.log1p(p.nu ** 2 * u * u * float(t) ** (2.0 * p.gamma)) / p.nu
    return out if out.ndim else float(out)


def log_mgf_closed(p, t, lam):
    """``log E[exp(lam Y_t)] = -(1/nu) log(1 - nu^2 lam^2 t^(2 gamma))``."""
    x = p.nu ** 2 * lam * lam * float(t) ** (2.0 * p.gamma)
    if x >= 1.0:
        raise DomainError(f"E[exp(lam Y_t)] is infinite: nu^2 lam^2 t^(2 gamma) = {x:.6g} >= 1")
    return -np.log1p(-x) / p.nu


def integrated_laplace_closed(p, t, u):
    """``int_0^t psi_s(u) ds = -(1/nu) log(1 + 2 nu^2 t^(2 gamma) u)`` (principal branch)."""
    if np.all(np.asarray(t) == 0.0):
        return np.zeros_like(np.asarray(u, dtype=complex if np.iscomplexobj(u) else float))
    return -np.log(1.0 + p.b(t) * np.asarray(u)) / p.nu


def clock(p, domain_start=DOMAIN_START):
    return exponential_kernel(
        beta=0.0, a=p.a, b=p.b, domain_start=domain_start,
        integrated_laplace=lambda t, u: integrated_laplace_closed(p, t, u),
        name=f"selfdec(gamma={p.gamma:g}, nu={p.nu:g})")


def build_timechanged(p, domain_start=DOMAIN_START):
    """Standard Brownian motion on the self-decomposable clock."""
    return TimeChangedModel(brownian(0.0, 1.0), clock(p, domain_start))
