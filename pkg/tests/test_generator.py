import math

import numpy as np
import pytest

from timechange.generator import (apply_base_generator, apply_timechanged_generator,
                                  convergence_report, difference_quotient, gaussian_probe,
                                  odd_probe, small_r_ratios, static_probe, zero_probe)
from timechange.levy import brownian, merton, pure_drift
from timechange.subordination import TimeChangedModel
from timechange.subordinator import SubordinatorSpec, drift_clock, exponential_kernel, trivial_clock

# -1 + int_0^oo ((1 + r)^{-1/2} - 1) e^{-r} dr = e sqrt(pi) erfc(1) - 2
EXP_KERNEL_GENERATOR = -1.24212784385868789
# self-decomposable clock (gamma=1, nu=0.5) at (s, x) = (1, 0), gaussian probe
SELFDEC_GENERATOR = -0.599292593078565


def test_probes_decay():
    for probe in (gaussian_probe(), odd_probe()):
        ok, worst = probe.check_decay()
        assert ok, worst


def test_base_generator_examples():
    f = gaussian_probe()
    assert apply_base_generator(brownian(), f, 0.0, 0.0) == pytest.approx(-0.5)
    assert apply_base_generator(pure_drift(1.0), f, 0.0, 0.0) == 0.0
    const = static_probe()
    const_x = type(const)(f=lambda s, x: 1.0 + 0 * np.asarray(x), df_ds=lambda s, x: 0.0,
                          df_dx=lambda s, x: 0.0, d2f_dx2=lambda s, x: 0.0)
    assert apply_base_generator(brownian(0.3, 2.0), const_x, 0.0, 1.0) == 0.0


def test_base_generator_with_jumps_matches_semigroup():
    m = merton(0.1, 0.3, 1.5, 0.2, 0.4)
    f = odd_probe()
    lf = apply_base_generator(m, f, 0.0, 0.3)
    r = 1e-4
    num = (m.semigroup_apply(lambda y: f.f(0.0, y), r, 0.3) - f.f(0.0, 0.3)) / r
    assert num == pytest.approx(lf, abs=1e-3)


def test_identity_clock_generator(identity_bm):
    assert apply_timechanged_generator(identity_bm, gaussian_probe(), 0.0, 0.0) == pytest.approx(-1.5)
    for x in (-0.7, 1.1):
        f = odd_probe()
        direct = f.df_ds(0.2, x) + apply_base_generator(identity_bm.base, f, 0.2, x)
        assert apply_timechanged_generator(identity_bm, f, 0.2, x) == pytest.approx(direct, abs=1e-14)


def test_static_function_no_clock():
    quiet = SubordinatorSpec(beta=lambda s: 0.0 * np.asarray(s), name="stopped")
    tc = TimeChangedModel(brownian(), quiet)
    assert apply_timechanged_generator(tc, static_probe(), 1.0, 0.4) == 0.0


def test_exp_kernel_generator(unit_exp_bm):
    val = apply_timechanged_generator(unit_exp_bm, gaussian_probe(), 0.0, 0.0)
    assert val == pytest.approx(EXP_KERNEL_GENERATOR, abs=1e-9)


def test_selfdec_generator(selfdec_1_05):
    val = apply_timechanged_generator(selfdec_1_05, gaussian_probe(), 1.0, 0.0)
    assert val == pytest.approx(SELFDEC_GENERATOR, abs=1e-9)


def test_small_r_ratio_bounded(selfdec_1_05):
    f = gaussian_probe()
    ratios = small_r_ratios(selfdec_1_05, f, 1.0, 0.0)
    lf = apply_base_generator(selfdec_1_05.base, f, 1.0, 0.0)
    np.testing.assert_allclose(ratios, lf, rtol=1e-3)


def test_deterministic_quotient():
    tc = TimeChangedModel(pure_drift(0.7), trivial_clock())
    f = odd_probe()
    est, se = difference_quotient(tc, f, 0.2, 0.1, 0.01, 50, seed=1)
    assert se == 0.0
    exact = (f.f(0.21, 0.1 + 0.007) - f.f(0.2, 0.1)) / 0.01
    assert est == pytest.approx(exact, rel=1e-12)


def test_quotient_reproducible(selfdec_1_05):
    a = difference_quotient(selfdec_1_05, gaussian_probe(), 1.0, 0.0, 0.05, 20_000, seed=8)
    b = difference_quotient(selfdec_1_05, gaussian_probe(), 1.0, 0.0, 0.05, 20_000, seed=8)
    assert a == b


def test_quotient_identity_bm(identity_bm):
    est, se = difference_quotient(identity_bm, gaussian_probe(), 0.0, 0.0, 0.01, 10 ** 6, seed=3)
    # Taylor bias at t = 0.01 is about 1.3 t
    assert abs(est + 1.5) <= 3 * se + 1.5 * 0.01


def test_convergence_zero_probe(selfdec_1_05):
    rep = convergence_report(selfdec_1_05, zero_probe(), 1.0, 0.0, [0.1, 0.05], 1000, seed=2)
    assert np.all(rep.quotient == 0.0) and np.all(rep.error == 0.0) and rep.passed


def test_convergence_identity_clock(identity_bm):
    rep = convergence_report(identity_bm, gaussian_probe(), 0.0, 0.0, [0.1, 0.05, 0.025],
                             200_000, seed=5)
    assert rep.generator == pytest.approx(-1.5)
    assert np.all(np.diff(rep.error) < 0)
    assert rep.passed, rep.to_text()
    assert rep.to_csv().splitlines()[0] == "t,quotient,stderr,abs_error"


def test_convergence_detects_wrong_generator(identity_bm):
    rep = convergence_report(identity_bm, gaussian_probe(), 0.0, 0.0, [0.1, 0.05, 0.025],
                             200_000, seed=5, generator=-1.4)
    assert not rep.passed


def test_convergence_deterministic_drift_clock():
    tc = TimeChangedModel(pure_drift(1.0), drift_clock(lambda s: 1.0 + s))
    rep = convergence_report(tc, odd_probe(), 0.3, 0.2, [0.1, 0.05, 0.025], 10, seed=0)
    assert np.all(rep.stderr == 0.0) and rep.passed


def test_t_list_validation(identity_bm):
    with pytest.raises(ValueError):
        convergence_report(identity_bm, gaussian_probe(), 0.0, 0.0, [0.01, 0.1], 10, seed=0)
