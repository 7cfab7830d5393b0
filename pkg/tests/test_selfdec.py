import math

import numpy as np
import pytest
from scipy.integrate import quad

from timechange.errors import DomainError
from timechange.selfdec import (SelfDecParams, build_timechanged, char_curve_closed, clock,
                                clock_density, gy_density, jump_mgf_closed, log_mgf_closed)

CASES = [SelfDecParams(0.5, 0.2), SelfDecParams(1.0, 0.5), SelfDecParams(1.5, 1.0)]


def test_params_validated():
    with pytest.raises(ValueError):
        SelfDecParams(0.0, 1.0)
    with pytest.raises(ValueError):
        SelfDecParams(1.0, -1.0)


def test_gy_density_values():
    p = SelfDecParams(1.0, 1.0)
    assert gy_density(p, 1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert gy_density(p, 0.7, 0.3) == gy_density(p, 0.7, -0.3)
    q = SelfDecParams(0.5, 0.2)
    mass = 2 * quad(lambda y: gy_density(q, 1.0, y), 0.0, np.inf)[0]
    assert mass == pytest.approx(5.0, rel=1e-9)
    with pytest.raises(DomainError):
        gy_density(p, 0.0, 1.0)


def test_clock_density_values():
    p = SelfDecParams(0.5, 1.0)
    assert p.a(1.0) == 0.5 and p.b(1.0) == 2.0
    assert clock_density(p, 1.0, 2.0) == pytest.approx(0.5 * math.exp(-1), rel=1e-15)
    q = SelfDecParams(0.5, 0.2)
    assert q.a(1.0) * q.b(1.0) == pytest.approx(5.0, rel=1e-14)
    r = SelfDecParams(0.5, 0.5)
    assert r.a(1.0) * r.b(1.0) ** 2 == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(DomainError):
        clock_density(p, -1.0, 1.0)


def test_jump_mgf_closed():
    p = SelfDecParams(0.5, 0.2)
    assert jump_mgf_closed(p, 1.0, 0.0) == pytest.approx(5.0)
    assert jump_mgf_closed(p, 1.0, 1.0) == pytest.approx(5.208333333333333, rel=1e-14)
    assert jump_mgf_closed(p, 1.0, -1.0) == jump_mgf_closed(p, 1.0, 1.0)
    vals = [jump_mgf_closed(p, 1.0, lam) for lam in (1.0, 4.0, 4.9, 4.999)]
    assert np.all(np.diff(vals) > 0) and vals[-1] > 1e3
    with pytest.raises(DomainError):
        jump_mgf_closed(p, 1.0, 5.0)


def test_char_curve_closed():
    p = SelfDecParams(1.0, 0.5)
    assert char_curve_closed(p, 1.0, 0.0) == 0.0
    assert char_curve_closed(p, 1.0, 1.0) == pytest.approx(-0.446287102628419530, rel=1e-15)
    assert char_curve_closed(p, 1.3, 2.0) == char_curve_closed(p, 1.3, -2.0)


@pytest.mark.parametrize("p", CASES)
def test_char_curve_rederived_by_quadrature(p):
    # integrate psi_s(u^2/2) in calendar time directly
    for t in (0.5, 2.0):
        for u in (0.5, 3.0):
            w = 0.5 * u * u
            f = lambda s: -p.a(s) * p.b(s) ** 2 * w / (1 + p.b(s) * w)  # noqa: E731
            val = quad(f, 0.0, t, epsabs=0, epsrel=1e-12, limit=200)[0]
            assert val == pytest.approx(char_curve_closed(p, t, u), rel=1e-9)


@pytest.mark.parametrize("p", CASES)
def test_psi_closed_vs_quadrature(p):
    c = clock(p)
    for t in (0.25, 1.0, 2.0):
        for u in (0.1, 1.0, 10.0):
            a = c.laplace_exponent(t, u)
            b = c.laplace_exponent(t, u, closed_form=False)
            assert abs(a - b) <= 1e-8 * abs(a)


def test_log_mgf_closed():
    p = SelfDecParams(0.5, 0.2)
    assert log_mgf_closed(p, 1.0, 1.0) == pytest.approx(0.204109972601276, rel=1e-13)
    with pytest.raises(DomainError):
        log_mgf_closed(SelfDecParams(0.5, 1.0), 1.0, 1.0)


def test_build_timechanged_triplet():
    tc = build_timechanged(SelfDecParams(1.0, 0.5))
    assert tc.clock.domain_start == 1e-3
    for t in (0.01, 1.0, 3.0):
        tr = tc.local_triplet(t)
        assert tr.variance == 0.0 and abs(tr.drift) < 1e-15


def test_law_equality_levels():
    p = SelfDecParams(1.5, 1.0)
    tc = build_timechanged(p)
    assert tc.jump_measure_mgf(0.8, 0.6) == pytest.approx(jump_mgf_closed(p, 0.8, 0.6), rel=1e-9)
    assert tc.subordinated_jump_density(0.8, 0.4) == pytest.approx(gy_density(p, 0.8, 0.4), rel=1e-9)


def test_clock_mean_matches_simulation():
    p = SelfDecParams(1.0, 0.5)
    z = build_timechanged(p).simulate([0.0, 1.5], 100_000, seed=21).z[:, -1]
    assert abs(z.mean() - 2 * p.nu * 1.5 ** (2 * p.gamma)) <= 3 * z.std() / math.sqrt(z.size)
