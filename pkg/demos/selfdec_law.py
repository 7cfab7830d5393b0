"""Brownian motion on the self-decomposable clock.

Compares the quadrature-based jump measure and characteristic curve with their
closed forms, then checks the simulated law of ``Y_1`` against the curve.
"""
import numpy as np

from timechange.selfdec import (SelfDecParams, build_timechanged, char_curve_closed, gy_density,
                                jump_mgf_closed)
from timechange.validation import cf_match_report


def main():
    p = SelfDecParams(gamma=1.0, nu=0.5)
    tc = build_timechanged(p)

    print("jump density g_t(y): quadrature vs closed form")
    for t in (0.5, 1.0, 2.0):
        for y in (-1.0, 0.3, 2.0):
            num, ref = tc.subordinated_jump_density(t, y), gy_density(p, t, y)
            print(f"  t={t:<4} y={y:<5} {num:.12e}  {ref:.12e}  rel {abs(num / ref - 1):.1e}")

    print("jump-measure MGF at t=1")
    for lam in (-1.0, 0.5, 1.0):
        num, ref = tc.jump_measure_mgf(1.0, lam), jump_mgf_closed(p, 1.0, lam)
        print(f"  lam={lam:<5} {num:.12e}  {ref:.12e}")

    u = np.array([-5.0, -2.0, -1.0, 1.0, 2.0, 5.0])
    curve = tc.char_exponent_curve(1.0, u)
    print("characteristic curve at t=1, max abs diff vs closed form:",
          f"{np.max(np.abs(curve - char_curve_closed(p, 1.0, u))):.1e}")

    rep = cf_match_report(tc, 1.0, u, 100_000, seed=1, analytic=lambda v: char_curve_closed(p, 1.0, v))
    print(rep.to_text())


if __name__ == "__main__":
    main()
