"""Regenerate the Bessel low-pass ladder prototype table embedded in crowpair.synth.

Doubly terminated (1 ohm) all-pole ladder synthesis of the unit-delay Bessel
transfer function by Cauer continued-fraction expansion, in 60-digit
arithmetic because the double-precision expansion loses accuracy above
order 5. Also prints the 3 dB angular frequency of each unit-delay response.

Run:  python scripts/generate_bessel_table.py
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 60


def bessel_poly(n: int) -> list:
    """Reverse Bessel polynomial coefficients, ascending powers, normalised D(0)=1."""
    c = [mp.factorial(2 * n - k) / (mp.power(2, n - k) * mp.factorial(k) * mp.factorial(n - k)) for k in range(n + 1)]
    return [x / c[0] for x in c]


def pmul(a, b):
    out = [mp.mpf(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def trim(a, tol):
    a = list(a)
    while a and abs(a[-1]) < tol:
        a.pop()
    return a


def ladder(n: int) -> list:
    d = bessel_poly(n)
    dm = [x * (-1) ** i for i, x in enumerate(d)]
    e = pmul(d, dm)
    e[0] -= 1  # N(s)N(-s) = D(s)D(-s) - 1
    e = trim(e, mp.mpf(10) ** -50)
    roots = mp.polyroots(list(reversed(e)), maxsteps=500, extraprec=400)
    lhp = sorted(roots, key=lambda z: mp.re(z))[:n]
    nn = [mp.mpf(1)]
    for r in lhp:
        nn = pmul(nn, [-r, 1])
    nn = [mp.re(x) for x in nn]
    scale = mp.sqrt(abs(e[-1]))
    nn = [x * scale for x in nn]
    a = [x + y for x, y in zip(d, nn)]
    b = [x - y for x, y in zip(d, nn)]
    a = trim(a, mp.mpf(10) ** -40)
    b = trim(b, mp.mpf(10) ** -40)
    if len(a) < len(b):
        a, b = b, a
    g = []
    while b and len(g) < n:
        q = a[-1] / b[-1]
        g.append(q)
        shifted = [mp.mpf(0)] + [q * x for x in b]
        rem = [x - (shifted[i] if i < len(shifted) else 0) for i, x in enumerate(a)]
        a, b = b, trim(rem, mp.mpf(10) ** -40)
    return g


def f3db(n: int):
    d = bessel_poly(n)

    def mag2(w):
        v = sum(c * (1j * w) ** k for k, c in enumerate(d))
        return abs(v) ** 2 - 2

    return mp.findroot(mag2, mp.mpf(1.5 + 0.1 * n))


if __name__ == "__main__":
    for n in range(2, 11):
        g = ladder(n)
        print(f"    {n}: (" + ", ".join(mp.nstr(x, 12) for x in g) + f"),  # w3dB = {mp.nstr(f3db(n), 12)}")
