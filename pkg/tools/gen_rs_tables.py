"""Regenerate src/zll/_rs_tables.py.

Taylor coefficients of Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
about p = 1/2, computed by formal power-series division at 80 digits.
"""

from pathlib import Path

import mpmath as mp

DEGREE = 72


def cos_series(a, b, deg, power):
    # coefficients of cos(a * x**power + b) up to x**deg
    out = [mp.mpf(0)] * (deg + 1)
    for k in range(deg // power + 1):
        # d^k/du^k cos(u + b) at u = 0 is cos(b + k pi/2)
        out[k * power] = a**k * mp.cos(b + k * mp.pi / 2) / mp.factorial(k)
    return out


def main():
    mp.mp.dps = 80
    num = cos_series(2 * mp.pi, -5 * mp.pi / 8, DEGREE, 2)
    den = [-c for c in cos_series(2 * mp.pi, 0, DEGREE, 1)]
    q = []  # Psi(1/2 + x) is even in x; odd terms vanish
    for n in range(DEGREE + 1):
        s = num[n] - sum(q[j] * den[n - j] for j in range(n))
        q.append(s / den[0] if n % 2 == 0 else mp.mpf(0))
    lines = [
        '"""Taylor coefficients of the Riemann-Siegel kernel Psi about p = 1/2.',
        "",
        "Generated by tools/gen_rs_tables.py; do not edit.",
        '"""',
        "",
        "PSI_TAYLOR = (",
    ]
    lines += [f"    {mp.nstr(c, 20, min_fixed=-1, max_fixed=1) if c else '0.0'}," for c in q]
    lines.append(")")
    out = Path(__file__).resolve().parents[1] / "src" / "zll" / "_rs_tables.py"
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
