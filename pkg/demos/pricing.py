"""Call prices under the self-decomposable model: cosine expansion vs Monte Carlo.

Also prints the Black-Scholes implied volatility of each price, which shows the
smile produced by the jumps.
"""
import numpy as np
from scipy import optimize

from timechange.pricing import MarketSpec, RiskNeutralModel, black_scholes_call, cos_price, mc_price
from timechange.selfdec import SelfDecParams, build_timechanged


def implied_vol(price, market, strike):
    f = lambda v: black_scholes_call(market.spot, strike, market.rate, v, market.maturity) - price  # noqa: E731
    return optimize.brentq(f, 1e-4, 5.0)


def main():
    market = MarketSpec(spot=100.0, rate=0.02, maturity=1.0, strikes=(70.0, 85.0, 100.0, 115.0, 130.0))
    model = RiskNeutralModel.from_timechanged(build_timechanged(SelfDecParams(0.5, 0.2)), market)
    print(f"martingale correction omega = {model.omega:.10f}, "
          f"forward residual = {model.martingale_residual():.1e}")
    cos = cos_price(model)
    mc = mc_price(model, n_paths=400_000, seed=11)
    print(f"{'strike':>8} {'cos':>12} {'mc':>12} {'se':>8} {'impl.vol':>9}")
    for k, c, m, s in zip(market.strikes, cos, mc.price, mc.stderr):
        print(f"{k:8.1f} {c:12.6f} {m:12.6f} {s:8.4f} {implied_vol(c, market, k):9.4f}")
    print("max |cos - mc| / se:", f"{np.max(np.abs(cos - mc.price) / mc.stderr):.2f}")


if __name__ == "__main__":
    main()
