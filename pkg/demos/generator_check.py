"""Difference quotients of the semigroup against the time-dependent generator.

For a test function ``f(s, x)`` the quotient ``(E f(s+t, X_{s+t}) - f(s, x)) / t``
should approach ``(d/ds + L_s) f`` as ``t`` shrinks.  The identity clock is the
control case with a known generator value of -1.5.
"""
from timechange.generator import convergence_report, gaussian_probe, odd_probe
from timechange.levy import brownian
from timechange.selfdec import SelfDecParams, build_timechanged
from timechange.subordination import TimeChangedModel
from timechange.subordinator import trivial_clock


def main():
    t_list = [0.2, 0.1, 0.05, 0.025]
    cases = [
        ("identity clock, gaussian probe", TimeChangedModel(brownian(0.0, 1.0), trivial_clock()),
         gaussian_probe(), 0.0, 0.0),
        ("selfdec clock, gaussian probe", build_timechanged(SelfDecParams(1.0, 0.5)),
         gaussian_probe(), 1.0, 0.0),
        ("selfdec clock, odd probe", build_timechanged(SelfDecParams(1.0, 0.5)),
         odd_probe(), 1.0, 0.3),
    ]
    for title, tc, probe, s, x in cases:
        rep = convergence_report(tc, probe, s, x, t_list, 400_000, seed=5)
        print(f"== {title}")
        print(rep.to_text())


if __name__ == "__main__":
    main()
