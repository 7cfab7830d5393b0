import numpy as np
import pytest

from timechange import SelfDecParams, build_timechanged
from timechange.errors import DomainError, InadmissibleModelError
from timechange.levy import brownian
from timechange.pricing import (MarketSpec, RiskNeutralModel, black_scholes_call, cos_price,
                                cos_price_call, cos_price_put, put_from_parity, riskneutral_cf)
from timechange.subordination import TimeChangedModel
from timechange.subordinator import trivial_clock

BS_CALL = 10.4505835721856
BS_PUT = 5.57352602225697


@pytest.fixture(scope="module")
def bs_model():
    market = MarketSpec(100.0, 0.05, 1.0, (60.0, 80.0, 90.0, 100.0, 110.0, 120.0, 150.0))
    return RiskNeutralModel.from_timechanged(TimeChangedModel(brownian(0.0, 0.04), trivial_clock()),
                                             market)


@pytest.fixture(scope="module")
def selfdec_model():
    market = MarketSpec(100.0, 0.0, 1.0, (80.0, 100.0, 125.0))
    return RiskNeutralModel.from_timechanged(build_timechanged(SelfDecParams(0.5, 0.2)), market)


def test_market_validation():
    with pytest.raises(DomainError):
        MarketSpec(-1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        MarketSpec(1.0, 0.0, 1.0, ())


def test_black_scholes_limit(bs_model):
    assert bs_model.omega == pytest.approx(-0.02, abs=1e-14)
    assert cos_price_call(bs_model, 100.0) == pytest.approx(BS_CALL, abs=1e-8)
    assert cos_price_put(bs_model, 100.0) == pytest.approx(BS_PUT, abs=1e-8)
    k = np.array(bs_model.market.strikes)
    np.testing.assert_allclose(cos_price(bs_model), black_scholes_call(100.0, k, 0.05, 0.2, 1.0),
                               atol=1e-8)
    assert black_scholes_call(100.0, 100.0, 0.05, 0.2, 1.0) == pytest.approx(BS_CALL, abs=1e-12)


def test_cf_and_martingale(bs_model):
    u = 1.7
    expected = np.exp(1j * u * (np.log(100.0) + 0.05 - 0.02) - 0.5 * 0.04 * u * u)
    assert abs(riskneutral_cf(bs_model, u) - expected) < 1e-14
    assert bs_model.martingale_residual() <= 1e-8


def test_parity(bs_model):
    m = bs_model.market
    call = cos_price_call(bs_model, 110.0)
    put = cos_price_put(bs_model, 110.0)
    assert abs(put_from_parity(call, m, 110.0) - put) <= 1e-8
    assert put_from_parity(BS_CALL, m, 100.0) == pytest.approx(BS_PUT, abs=1e-12)
    with pytest.warns(UserWarning):
        assert put_from_parity(100.0, m, 0.0) == 0.0


def test_deep_itm_and_bounds(bs_model):
    m = bs_model.market
    assert cos_price_call(bs_model, 1e-4) == pytest.approx(100.0 - 1e-4 * m.discount, abs=1e-6)
    prices = cos_price(bs_model)
    k = np.array(m.strikes)
    assert np.all(prices >= np.maximum(0.0, 100.0 - k * m.discount) - 1e-8)


def test_selfdec_prices_shape(selfdec_model):
    assert selfdec_model.omega == pytest.approx(-0.204109972601276, rel=1e-10)
    assert selfdec_model.martingale_residual() <= 1e-8
    k = np.linspace(60.0, 160.0, 21)
    p = cos_price(selfdec_model, k)
    assert np.all(np.diff(p) <= 1e-12)
    assert np.all(np.diff(p, 2) >= -1e-8)


def test_selfdec_inadmissible():
    market = MarketSpec(100.0, 0.0, 1.0)
    with pytest.raises(InadmissibleModelError):
        RiskNeutralModel.from_timechanged(build_timechanged(SelfDecParams(0.5, 1.0)), market)


def test_omega_crosscheck_via_jump_mgf():
    # log E[e^{Y_T}] = int_0^T int (e^x - 1) nu_s(dx) ds for the symmetric driftless model;
    # on [0, t0] the closed form covers the singular head
    from timechange import _quad
    from timechange.selfdec import log_mgf_closed
    p = SelfDecParams(0.5, 0.2)
    tc = build_timechanged(p)
    t0 = tc.clock.domain_start
    body = _quad.time_integral(
        lambda ss: np.array([tc.jump_measure_mgf(s, 1.0) - tc.jump_measure_mgf(s, 0.0) for s in ss]),
        t0, 1.0, tol=1e-10)
    head = log_mgf_closed(p, t0, 1.0)
    assert head + body == pytest.approx(tc.log_mgf_curve(1.0, 1.0), rel=1e-8)


def test_cumulants_match_closed_form():
    # log E exp(lam Y_1) = -(1/nu) log(1 - nu^2 lam^2): c2 = 2 nu, c4 = 12 nu^3
    p = SelfDecParams(0.5, 0.2)
    m = RiskNeutralModel.from_timechanged(build_timechanged(p), MarketSpec(100.0, 0.0, 1.0))
    c1, c2, c4 = m.cumulants()
    assert c1 == pytest.approx(m.shift, abs=1e-8)
    assert c2 == pytest.approx(2 * p.nu, rel=1e-4)
    assert c4 == pytest.approx(12 * p.nu ** 3, rel=5e-3)


def test_heavy_tail_parity():
    p = SelfDecParams(0.5, 0.2)
    market = MarketSpec(100.0, 0.0, 1.0, (100.0,))
    m = RiskNeutralModel.from_timechanged(build_timechanged(p), market)
    call = cos_price(m, kind="call")[0]
    put = cos_price(m, kind="put")[0]
    assert abs(put_from_parity(call, market, 100.0) - put) < 1e-8
