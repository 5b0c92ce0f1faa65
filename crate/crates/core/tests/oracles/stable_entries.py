"""Frozen reference values for stable_entries, computed at 40 digits.

Run `python3 stable_entries.py` and paste the output into tests/green.rs.
Needs mpmath.
"""
from mpmath import mp, mpf, sqrt, exp, expm, matrix

mp.dps = 40

CASES = [
    # (nu, r, t)
    (2, "2", "0.5"),
    (2, "1", "0.5"),
    (2, "0.5", "3"),
    (2, "1.000001", "2"),
    (2, "10", "3"),
    (mpf("0.7"), "4", "1.5"),
]


def entries(nu, r, t):
    nu, r, t = mpf(nu), mpf(r), mpf(t)
    # longitudinal block of the generator acting on (rho, u.xi/|xi|)
    a = matrix([[0, -r], [r, -nu * r * r]])
    e = expm(a * t)
    # e = [[g_minus, -r m], [r m, g_plus]] with the sign of the coupling
    # fixed by the generator; only m, g_minus and g_plus are reported
    m = e[1, 0] / r
    return m, e[0, 0], e[1, 1]


for nu, r, t in CASES:
    m, gm, gp = entries(nu, r, t)
    print(f"({mp.nstr(mpf(nu), 17)}, {r}, {t}, {mp.nstr(m, 17)}, {mp.nstr(gm, 17)}, {mp.nstr(gp, 17)}),")
