"""European option prices from the characteristic curve of ``Y``.

Under the pricing measure ``log S_T = log S_0 + rho T + omega + Y_T`` with the
martingale correction ``omega = -log E[exp(Y_T)]``.  ``omega`` is always computed
from the real moment generating function of ``Y_T``, never by pushing the
characteristic exponent to complex arguments.

Prices come from a Fourier-cosine expansion of the density of ``log S_T`` on the
truncation range ``c1 +- L sqrt(c2 + sqrt(c4))``; the fourth cumulant widens the
range for heavy-tailed laws.
"""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ConvergenceError, DomainError, InadmissibleModelError
from .subordinator import DEFAULT_EPS


@dataclass(frozen=True)
class MarketSpec:
    spot: float
    rate: float
    maturity: float
    strikes: tuple = (100.0,)

    def __post_init__(self):
        if not self.spot > 0.0 or not self.maturity > 0.0:
            raise DomainError("spot and maturity must be positive")
        k = np.atleast_1d(np.asarray(self.strikes, dtype=float))
        if k.size == 0 or np.any(k <= 0.0):
            raise DomainError("strikes must be a nonempty list of positive numbers")
        object.__setattr__(self, "strikes", tuple(float(v) for v in k))

    @property
    def discount(self):
        return float(np.exp(-self.rate * self.maturity))

    @property
    def forward(self):
        return self.spot / self.discount


class RiskNeutralModel:
    """Risk-neutral law of ``log S_T``.

    :param curve: ``u -> log E[exp(iu Y_T)]`` for real ``u`` (vectorised)
    :param log_mgf: ``lam -> log E[exp(lam Y_T)]`` for real ``lam``
    :param market: :class:`MarketSpec`
    """

    def __init__(self, curve, log_mgf, market, paths=None):
        self.curve = curve
        self.log_mgf = log_mgf
        self.market = market
        self.paths = paths
        try:
            self.omega = -float(log_mgf(1.0))
        except DomainError as exc:
            raise InadmissibleModelError(
                f"E[exp(Y_T)] does not exist, so no martingale correction: {exc}") from exc
        m = market
        self.shift = np.log(m.spot) + m.rate * m.maturity + self.omega

    @classmethod
    def from_timechanged(cls, tc, market):
        T = market.maturity
        return cls(lambda u: tc.char_exponent_curve(T, u),
                   lambda lam: tc.log_mgf_curve(T, lam), market, paths=tc)

    def cf(self, u):
        """``E[exp(iu log S_T)]``.

        Purely imaginary ``u = -i lam`` is evaluated as ``E[S_T^lam]`` via the MGF.
        """
        if np.iscomplexobj(u) and np.ndim(u) == 0 and complex(u).real == 0.0:
            lam = -complex(u).imag
            return complex(np.exp(lam * self.shift + self.log_mgf(lam)))
        u = np.asarray(u, dtype=float)
        return np.exp(1j * u * self.shift + np.asarray(self.curve(u)))

    def martingale_residual(self):
        """``|E[S_T] - S_0 e^{rho T}| / (S_0 e^{rho T})``."""
        fwd = self.market.forward
        return abs(self.cf(-1j) - fwd) / fwd

    def cumulants(self, h=1e-2, h4=1e-1):
        """Cumulants ``c1, c2, c4`` of ``log S_T`` by central differences of the curve at 0.

        ``c4`` uses the wider step ``h4`` since a fourth difference amplifies
        quadrature noise by ``h4**-4``.
        """
        c = np.asarray(self.curve(np.array([-h, 0.0, h])), dtype=complex)
        c1 = float((c[2] - c[0]).imag / (2.0 * h))
        c2 = float(-(c[2] - 2.0 * c[1] + c[0]).real / (h * h))
        w = np.asarray(self.curve(h4 * np.arange(-2.0, 3.0)), dtype=complex).real
        c4 = float((w[0] - 4.0 * w[1] + 6.0 * w[2] - 4.0 * w[3] + w[4]) / h4 ** 4)
        return self.shift + c1, max(c2, 0.0), max(c4, 0.0)


def riskneutral_cf(model, u):
    return model.cf(u)


def _payoff_coefficients(kind, a, b, logk, strike, u):
    """``int (e^z - K)^+ cos(u (z - a)) dz`` over ``[a, b]`` (call) or the put analogue."""
    if kind == "call":
        lo, hi = max(a, logk), b
        sign = 1.0
    else:
        lo, hi = a, min(b, logk)
        sign = -1.0
    if hi <= lo:
        return np.zeros_like(u)
    ul, uh = u * (lo - a), u * (hi - a)
    chi = (np.exp(hi) * (np.cos(uh) + u * np.sin(uh))
           - np.exp(lo) * (np.cos(ul) + u * np.sin(ul))) / (1.0 + u * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = np.where(u == 0.0, hi - lo, (np.sin(uh) - np.sin(ul)) / np.where(u == 0.0, 1.0, u))
    return sign * (chi - strike * psi)


def _cos(model, strikes, kind, L, M):
    c1, c2, c4 = model.cumulants()
    spread = c2 + np.sqrt(c4)
    width = L * np.sqrt(spread) if spread > 0.0 else L
    a, b = c1 - width, c1 + width
    k = np.arange(M)
    u = k * np.pi / (b - a)
    phi = model.cf(u)
    coef = (2.0 / (b - a)) * np.real(phi * np.exp(-1j * u * a))
    coef[0] *= 0.5
    prices = [coef @ _payoff_coefficients(kind, a, b, np.log(K), K, u) for K in strikes]
    return model.market.discount * np.array(prices)


def cos_price(model, strikes=None, kind="call", L=10.0, M=1024, tol=1e-6):
    """Cosine-expansion prices of European options.

    Raises :class:`ConvergenceError` if doubling ``M`` moves any price by more than
    ``tol``.
    """
    if kind not in ("call", "put"):
        raise ValueError("kind must be 'call' or 'put'")
    strikes = model.market.strikes if strikes is None else strikes
    strikes = np.atleast_1d(np.asarray(strikes, dtype=float))
    p1 = _cos(model, strikes, kind, L, M)
    p2 = _cos(model, strikes, kind, L, 2 * M)
    shift = float(np.max(np.abs(p2 - p1)))
    if shift > tol:
        raise ConvergenceError(f"cosine expansion unstable: |price(M) - price(2M)| = {shift:.3g}")
    return p2


def cos_price_call(model, strike, L=10.0, M=1024):
    return float(cos_price(model, [strike], "call", L, M)[0])


def cos_price_put(model, strike, L=10.0, M=1024):
    return float(cos_price(model, [strike], "put", L, M)[0])


def put_from_parity(call, market, strike):
    """``put = call - S_0 + K e^{-rho T}``."""
    if strike < 0.0:
        raise DomainError("strike must be nonnegative")
    if strike == 0.0:
        warnings.warn("zero strike: the put is worthless and parity degenerates", stacklevel=2)
    return call - market.spot + strike * market.discount


def black_scholes_call(spot, strike, rate, sigma, maturity):
    sd = sigma * np.sqrt(maturity)
    d1 = (np.log(spot / strike) + rate * maturity) / sd + 0.5 * sd
    return spot * stats.norm.cdf(d1) - strike * np.exp(-rate * maturity) * stats.norm.cdf(d1 - sd)


@dataclass(frozen=True)
class McPrice:
    strikes: np.ndarray
    price: np.ndarray
    stderr: np.ndarray
    n: int


def mc_price(model, strikes=None, kind="call", n_paths=10**6, seed=0, eps=DEFAULT_EPS):
    """Monte Carlo prices from simulated ``Y_T`` (needs a model built from a time change)."""
    if model.paths is None:
        raise DomainError("Monte Carlo pricing needs a time-changed model")
    m = model.market
    strikes = np.atleast_1d(np.asarray(m.strikes if strikes is None else strikes, dtype=float))
    y = model.paths.simulate([0.0, m.maturity], n_paths, seed, eps).y[:, -1]
    s_t = np.exp(model.shift + y)
    price, se = [], []
    for K in strikes:
        pay = np.maximum(s_t - K, 0.0) if kind == "call" else np.maximum(K - s_t, 0.0)
        price.append(m.discount * pay.mean())
        se.append(m.discount * pay.std(ddof=1) / np.sqrt(pay.size))
    return McPrice(strikes, np.array(price), np.array(se), int(n_paths))
